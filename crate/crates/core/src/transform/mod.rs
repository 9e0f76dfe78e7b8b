//! Reductions between problem variants and hardness gadgets.
//!
//! A [`Reduction`] keeps the source and the target instance together with
//! what is needed to map a verifying target schedule back to a verifying
//! source schedule. Gadgets start from problems that are not scheduling
//! problems, so they decode witnesses instead (an assignment, a vertex set).

mod cnf;
mod generalize;
mod mis_gadget;
mod rjit;
mod sat_gadget;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{verify_schedule, ClientId, DayId, Instance, Schedule};

pub use cnf::{parse_dimacs, preprocess, to_dimacs, Cnf, Preprocessed};
pub use generalize::{
    agreeable_to_day_independent, machines_to_days, pad_hardness, per_client_k_to_uniform, totalize,
};
pub use mis_gadget::{
    gadget_from_mis, mis_gadget_decomposition, parse_colored_graph, ColoredGraph, MisGadget, MisRole,
};
pub use rjit::{import_unrelated_jit, parse_unrelated_jit, JitJob, UnrelatedJit};
pub use sat_gadget::{gadget_from_3sat, SatGadget, SatRole};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    PerClientToUniform,
    Totalize,
    AgreeableToDayIndependent,
    MachinesToDays,
    PadHardness,
}

impl ReductionKind {
    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::PerClientToUniform => "per-client-to-uniform",
            ReductionKind::Totalize => "totalize",
            ReductionKind::AgreeableToDayIndependent => "agreeable-to-day-independent",
            ReductionKind::MachinesToDays => "machines-to-days",
            ReductionKind::PadHardness => "pad-hardness",
        }
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
enum PullBack {
    /// Keeps the target days and clients that stand for source ones.
    Project {
        days: Vec<Option<DayId>>,
        clients: Vec<Option<ClientId>>,
    },
    /// Packs colour classes of the day-invariant conflict graph onto
    /// machines.
    Recolour,
    /// Undoes `free_days` conflict-free days and then `layers` blocking
    /// layers, newest first.
    Padding { free_days: usize, layers: usize },
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub kind: ReductionKind,
    pub source: Instance,
    pub target: Instance,
    /// Human-readable statement of what the target preserves.
    pub certificate: String,
    pull: PullBack,
}

impl Reduction {
    /// Maps a schedule of the target to one of the source. The result
    /// verifies on the source whenever the input verifies on the target.
    pub fn pull_back(&self, target_schedule: &Schedule) -> Result<Schedule> {
        if target_schedule.m() != self.target.m() {
            return Err(Error::InvalidInstance(format!(
                "schedule has {} days, target has {}",
                target_schedule.m(),
                self.target.m()
            )));
        }
        match &self.pull {
            PullBack::Project { days, clients } => Ok(project(&self.source, target_schedule, days, clients)),
            PullBack::Recolour => {
                let report = verify_schedule(&self.target, target_schedule);
                if !report.ok() {
                    return Err(Error::InvalidInstance(format!(
                        "target schedule does not verify: {}",
                        report.first_violation.unwrap_or_default()
                    )));
                }
                Ok(generalize::pack_colour_classes(&self.source))
            }
            PullBack::Padding { free_days, layers } => Ok(generalize::unpad(
                &self.source,
                target_schedule,
                *free_days,
                *layers,
            )),
        }
    }
}

fn project(
    source: &Instance,
    sched: &Schedule,
    days: &[Option<DayId>],
    clients: &[Option<ClientId>],
) -> Schedule {
    let mut out = vec![Vec::new(); source.m()];
    for (t, set) in sched.days.iter().enumerate() {
        let Some(s) = days[t] else { continue };
        for &c in set {
            if let Some(Some(j)) = clients.get(c) {
                if source.job(s, *j).is_some() {
                    out[s].push(*j);
                }
            }
        }
    }
    Schedule::new(out)
}
