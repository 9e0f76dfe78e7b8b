//! Problem instances, schedules and schedule verification.
//!
//! Clients and days are 0-based everywhere in this crate. Files and
//! user-facing messages are 1-based.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::conflict;
use crate::error::{Error, Result};

pub type ClientId = usize;
pub type DayId = usize;

/// A just-in-time job occupying the half-open interval `(due - p, due]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Job {
    pub processing_time: u64,
    pub due_date: u64,
}

impl Job {
    pub fn new(processing_time: u64, due_date: u64) -> Result<Self> {
        if processing_time == 0 {
            return Err(Error::InvalidInstance("processing_time must be at least 1".into()));
        }
        if due_date < processing_time {
            return Err(Error::InvalidInstance("due_date < processing_time".into()));
        }
        Ok(Job {
            processing_time,
            due_date,
        })
    }

    /// Shorthand for tests and generators where validity is known.
    pub fn pd(processing_time: u64, due_date: u64) -> Self {
        Self::new(processing_time, due_date).expect("invalid job")
    }

    #[inline]
    pub fn start(&self) -> u64 {
        self.due_date - self.processing_time
    }

    #[inline]
    pub fn end(&self) -> u64 {
        self.due_date
    }

    /// Touching intervals do not conflict.
    #[inline]
    pub fn conflicts_with(&self, other: &Job) -> bool {
        self.start().max(other.start()) < self.end().min(other.end())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fairness {
    Uniform(usize),
    PerClient(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    m: usize,
    /// `jobs[day][client]`
    jobs: Vec<Vec<Option<Job>>>,
    fairness: Fairness,
    machines: usize,
}

impl Instance {
    pub fn new(
        n: usize,
        m: usize,
        jobs: Vec<Vec<Option<Job>>>,
        fairness: Fairness,
        machines: usize,
    ) -> Result<Self> {
        if jobs.len() != m {
            return Err(Error::InvalidInstance(format!(
                "expected {m} days of jobs, found {}",
                jobs.len()
            )));
        }
        for (day, row) in jobs.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "day {} has {} jobs, expected {n}",
                    day + 1,
                    row.len()
                )));
            }
            for (client, job) in row.iter().enumerate() {
                if let Some(job) = job {
                    if job.processing_time == 0 || job.due_date < job.processing_time {
                        return Err(Error::InvalidInstance(format!(
                            "day {}, client {}: due_date < processing_time or zero processing time",
                            day + 1,
                            client + 1
                        )));
                    }
                }
            }
        }
        if let Fairness::PerClient(ks) = &fairness {
            if ks.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "k_per_client has {} entries, expected {n}",
                    ks.len()
                )));
            }
        }
        if machines == 0 {
            return Err(Error::InvalidInstance("machines must be at least 1".into()));
        }
        Ok(Instance {
            n,
            m,
            jobs,
            fairness,
            machines,
        })
    }

    /// Total, single-machine instance with a uniform fairness parameter.
    pub fn uniform(jobs: Vec<Vec<Job>>, k: usize) -> Result<Self> {
        let m = jobs.len();
        let n = jobs.first().map_or(0, Vec::len);
        let jobs = jobs
            .into_iter()
            .map(|row| row.into_iter().map(Some).collect())
            .collect();
        Instance::new(n, m, jobs, Fairness::Uniform(k), 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn fairness(&self) -> &Fairness {
        &self.fairness
    }

    pub fn jobs(&self) -> &[Vec<Option<Job>>] {
        &self.jobs
    }

    #[inline]
    pub fn job(&self, day: DayId, client: ClientId) -> Option<&Job> {
        self.jobs[day][client].as_ref()
    }

    pub fn day(&self, day: DayId) -> &[Option<Job>] {
        &self.jobs[day]
    }

    /// Number of days client `client` must be served.
    pub fn requirement(&self, client: ClientId) -> usize {
        match &self.fairness {
            Fairness::Uniform(k) => *k,
            Fairness::PerClient(ks) => ks[client],
        }
    }

    pub fn uniform_k(&self) -> Option<usize> {
        match self.fairness {
            Fairness::Uniform(k) => Some(k),
            Fairness::PerClient(_) => None,
        }
    }

    pub fn is_total(&self) -> bool {
        self.jobs.iter().all(|row| row.iter().all(Option::is_some))
    }

    pub fn with_fairness(&self, fairness: Fairness) -> Result<Self> {
        Instance::new(self.n, self.m, self.jobs.clone(), fairness, self.machines)
    }

    pub fn with_k(&self, k: usize) -> Self {
        let mut out = self.clone();
        out.fairness = Fairness::Uniform(k);
        out
    }

    pub fn with_machines(&self, machines: usize) -> Result<Self> {
        Instance::new(self.n, self.m, self.jobs.clone(), self.fairness.clone(), machines)
    }

    pub fn max_due_date(&self) -> u64 {
        self.jobs
            .iter()
            .flatten()
            .flatten()
            .map(|j| j.due_date)
            .max()
            .unwrap_or(0)
    }

    /// Core solvers accept only total, single-machine, uniform instances.
    pub(crate) fn require_core(&self, algorithm: &'static str) -> Result<usize> {
        if !self.is_total() {
            return Err(Error::precondition(
                algorithm,
                "instance has absent jobs; apply transform::totalize first",
            ));
        }
        if self.machines != 1 {
            return Err(Error::precondition(algorithm, "requires a single machine (M=1)"));
        }
        self.uniform_k().ok_or_else(|| {
            Error::precondition(
                algorithm,
                "requires a uniform fairness parameter; apply transform::per_client_k_to_uniform first",
            )
        })
    }
}

/// One set of served clients per day.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    pub days: Vec<Vec<ClientId>>,
}

impl Schedule {
    /// Sorts and deduplicates every day-set.
    pub fn new(mut days: Vec<Vec<ClientId>>) -> Self {
        for day in &mut days {
            day.sort_unstable();
            day.dedup();
        }
        Schedule { days }
    }

    pub fn empty(m: usize) -> Self {
        Schedule {
            days: vec![Vec::new(); m],
        }
    }

    pub fn m(&self) -> usize {
        self.days.len()
    }

    /// `Z`-counts: number of days each client is served.
    pub fn counts(&self, n: usize) -> Vec<usize> {
        let mut counts = vec![0; n];
        for day in &self.days {
            for &c in day {
                if c < n {
                    counts[c] += 1;
                }
            }
        }
        counts
    }

    pub fn serves(&self, day: DayId, client: ClientId) -> bool {
        self.days[day].binary_search(&client).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub feasible: bool,
    pub fair: bool,
    pub per_client_counts: Vec<usize>,
    pub first_violation: Option<String>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.feasible && self.fair
    }
}

/// Ground-truth feasibility and fairness check.
pub fn verify_schedule(inst: &Instance, sched: &Schedule) -> VerificationReport {
    let n = inst.n();
    let mut violation: Option<String> = None;
    let mut feasible = true;

    if sched.m() != inst.m() {
        feasible = false;
        violation = Some(format!(
            "schedule has {} days, instance has {}",
            sched.m(),
            inst.m()
        ));
    }

    let mut counts = vec![0usize; n];
    for (day, set) in sched.days.iter().enumerate().take(inst.m()) {
        let mut intervals = Vec::with_capacity(set.len());
        let mut seen = std::collections::BTreeSet::new();
        for &client in set {
            if client >= n {
                feasible = false;
                violation.get_or_insert_with(|| {
                    format!("day {}: unknown client {}", day + 1, client + 1)
                });
                continue;
            }
            if !seen.insert(client) {
                continue;
            }
            match inst.job(day, client) {
                Some(job) => {
                    counts[client] += 1;
                    intervals.push((job.start(), job.end(), client));
                }
                None => {
                    feasible = false;
                    violation.get_or_insert_with(|| {
                        format!("day {}: client {} has no job that day", day + 1, client + 1)
                    });
                }
            }
        }
        if let Some((a, b)) = conflict::depth_witness(&intervals, inst.machines()) {
            feasible = false;
            violation.get_or_insert_with(|| {
                if inst.machines() == 1 {
                    format!(
                        "day {}: clients {} and {} conflict",
                        day + 1,
                        a.min(b) + 1,
                        a.max(b) + 1
                    )
                } else {
                    format!(
                        "day {}: more than {} overlapping jobs at the start of client {}",
                        day + 1,
                        inst.machines(),
                        b + 1
                    )
                }
            });
        }
    }

    let mut fair = true;
    for (client, &count) in counts.iter().enumerate() {
        let need = inst.requirement(client);
        if count < need {
            fair = false;
            violation.get_or_insert_with(|| {
                format!(
                    "client {} served on {count} days, needs {need}",
                    client + 1
                )
            });
        }
    }

    VerificationReport {
        feasible,
        fair,
        per_client_counts: counts,
        first_violation: violation,
    }
}

/// Structural properties used to pick an algorithm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceClass {
    pub unit_processing: bool,
    pub day_independent_p: bool,
    pub day_independent_d: bool,
    pub agreeable: bool,
    /// A client order witnessing agreeable due dates, when one exists.
    pub agreeable_order: Option<Vec<ClientId>>,
    pub total: bool,
    pub uniform_fairness: bool,
    pub trivial_k: bool,
}

pub fn classify(inst: &Instance) -> InstanceClass {
    let jobs = inst.jobs();
    let present = || jobs.iter().flatten().flatten();
    let unit_processing = present().all(|j| j.processing_time == 1);

    let day_independent = |f: fn(&Job) -> u64| {
        (0..inst.n()).all(|c| {
            let mut vals = jobs.iter().filter_map(|row| row[c].as_ref()).map(f);
            match vals.next() {
                Some(first) => vals.all(|v| v == first),
                None => true,
            }
        })
    };
    let day_independent_p = day_independent(|j| j.processing_time);
    let day_independent_d = day_independent(|j| j.due_date);
    let total = inst.is_total();
    let agreeable_order = if total { agreeable_order(inst) } else { None };
    let (uniform_fairness, trivial_k) = match inst.uniform_k() {
        Some(k) => (true, k == 0 || k >= inst.m() || k + 1 == inst.m()),
        None => (false, false),
    };

    InstanceClass {
        unit_processing,
        day_independent_p,
        day_independent_d,
        agreeable: agreeable_order.is_some(),
        agreeable_order,
        total,
        uniform_fairness,
        trivial_k,
    }
}

/// Finds a client order with non-decreasing due dates on every day.
///
/// Sorting by the full due-date vector is exact: if two clients are ordered
/// one way on some day and strictly the other way on another, no order
/// exists, and otherwise the lexicographic order respects every day.
pub fn agreeable_order(inst: &Instance) -> Option<Vec<ClientId>> {
    if !inst.is_total() {
        return None;
    }
    let due = |c: ClientId| -> Vec<u64> {
        (0..inst.m())
            .map(|d| inst.job(d, c).map_or(0, |j| j.due_date))
            .collect()
    };
    let mut order: Vec<ClientId> = (0..inst.n()).collect();
    let keys: Vec<Vec<u64>> = order.iter().map(|&c| due(c)).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
    is_agreeable_order(inst, &order).then_some(order)
}

pub fn is_agreeable_order(inst: &Instance, order: &[ClientId]) -> bool {
    if order.len() != inst.n() {
        return false;
    }
    let mut seen = vec![false; inst.n()];
    for &c in order {
        if c >= inst.n() || std::mem::replace(&mut seen[c], true) {
            return false;
        }
    }
    (0..inst.m()).all(|day| {
        order.windows(2).all(|w| match (inst.job(day, w[0]), inst.job(day, w[1])) {
            (Some(a), Some(b)) => a.due_date <= b.due_date,
            _ => false,
        })
    })
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} m={} M={} ", self.n, self.m, self.machines)?;
        match &self.fairness {
            Fairness::Uniform(k) => write!(f, "k={k}"),
            Fairness::PerClient(ks) => write!(f, "k_j={ks:?}"),
        }
    }
}
