//! Rewrites of generalized instances into the core problem: per-client
//! fairness, absent jobs, agreeable due dates and several machines, plus the
//! two paddings that lift hardness to more days.

use crate::conflict::{interval_coloring, DayIntervals};
use crate::error::{Error, Result};
use crate::instance::{classify, is_agreeable_order, ClientId, Fairness, Instance, Job, Schedule};

use super::{PullBack, Reduction, ReductionKind};

fn identity_map(m: usize, n: usize) -> PullBack {
    PullBack::Project {
        days: (0..m).map(Some).collect(),
        clients: (0..n).map(Some).collect(),
    }
}

/// Unit job ending at `end`.
fn unit(end: u64) -> Option<Job> {
    Some(Job::pd(1, end))
}

/// Replaces per-client requirements `k_j` by the uniform requirement `m` on
/// twice as many days. Two new mutually conflicting clients must share the
/// `2m` days, so one of them runs every day; on the added days client `j`
/// is blocked by them exactly `k_j` times and free otherwise.
pub fn per_client_k_to_uniform(inst: &Instance) -> Result<Reduction> {
    const ALG: &str = "per_client_k_to_uniform";
    if !inst.is_total() {
        return Err(Error::precondition(
            ALG,
            "instance has absent jobs; apply transform::totalize first",
        ));
    }
    if inst.machines() != 1 {
        return Err(Error::precondition(ALG, "requires a single machine (M=1)"));
    }
    let (n, m) = (inst.n(), inst.m());
    let ks: Vec<usize> = (0..n).map(|j| inst.requirement(j)).collect();
    if let Some(j) = (0..n).find(|&j| ks[j] > m) {
        return Err(Error::precondition(
            ALG,
            format!("client {} requires {} > m = {m} days", j + 1, ks[j]),
        ));
    }
    let d_max = inst.max_due_date();
    let width = n.max(1) as u64;
    let guard = Some(Job::pd(width, d_max + width));

    let mut jobs = Vec::with_capacity(2 * m);
    for day in 0..m {
        let mut row = inst.day(day).to_vec();
        row.extend([guard, guard]);
        jobs.push(row);
    }
    for t in 0..m {
        let mut row: Vec<Option<Job>> = (0..n)
            .map(|j| {
                let j1 = j as u64 + 1;
                if t < ks[j] {
                    unit(d_max + j1)
                } else {
                    unit(d_max + width + j1)
                }
            })
            .collect();
        row.extend([guard, guard]);
        jobs.push(row);
    }
    let target = Instance::new(n + 2, 2 * m, jobs, Fairness::Uniform(m), 1)?;
    Ok(Reduction {
        kind: ReductionKind::PerClientToUniform,
        certificate: format!(
            "source with per-client requirements is fair iff the {}-day target is {m}-fair; \
             source days and clients are kept, clients {} and {} alternate on every day",
            2 * m,
            n + 1,
            n + 2
        ),
        source: inst.clone(),
        target,
        pull: PullBack::Project {
            days: (0..2 * m).map(|d| (d < m).then_some(d)).collect(),
            clients: (0..n + 2).map(|c| (c < n).then_some(c)).collect(),
        },
    })
}

/// Fills in absent jobs. `ceil(m/k)` auxiliary clients, mutually conflicting
/// on every day, need all `k * ceil(m/k)` days between them, so one of them
/// runs every day and blocks the replacement jobs and the added days.
pub fn totalize(inst: &Instance) -> Result<Reduction> {
    const ALG: &str = "totalize";
    let k = inst
        .uniform_k()
        .ok_or_else(|| Error::precondition(ALG, "requires a uniform fairness parameter"))?;
    if inst.machines() != 1 {
        return Err(Error::precondition(ALG, "requires a single machine (M=1)"));
    }
    let (n, m) = (inst.n(), inst.m());
    let d_max = inst.max_due_date();
    let blocked = |j: ClientId| unit(d_max + j as u64 + 1);

    let (aux, extra) = if k == 0 { (0, 0) } else { (m.div_ceil(k), k * m.div_ceil(k) - m) };
    let aux_job = Some(Job::pd(n.max(1) as u64, d_max + n.max(1) as u64));
    let mut jobs = Vec::with_capacity(m + extra);
    for day in 0..m {
        let mut row: Vec<Option<Job>> = (0..n).map(|j| inst.job(day, j).copied().or(blocked(j))).collect();
        row.extend(std::iter::repeat_n(aux_job, aux));
        jobs.push(row);
    }
    for _ in 0..extra {
        let mut row: Vec<Option<Job>> = (0..n).map(blocked).collect();
        row.extend(std::iter::repeat_n(aux_job, aux));
        jobs.push(row);
    }
    let target = Instance::new(n + aux, m + extra, jobs, Fairness::Uniform(k), 1)?;
    Ok(Reduction {
        kind: ReductionKind::Totalize,
        certificate: format!(
            "source with absent jobs is {k}-fair iff the total target with {aux} auxiliary clients \
             and {extra} added days is {k}-fair"
        ),
        source: inst.clone(),
        target,
        pull: PullBack::Project {
            days: (0..m + extra).map(|d| (d < m).then_some(d)).collect(),
            clients: (0..n + aux).map(|c| (c < n).then_some(c)).collect(),
        },
    })
}

/// Relabels an agreeable instance so that the client at position `q` of
/// `order` has due date `q` (1-based) on every day. Its processing time
/// reaches back to the earliest position it conflicts with, which keeps
/// every daily conflict graph unchanged: with due dates sorted along the
/// order, the earlier clients conflicting with a job form a contiguous run
/// ending just before it.
pub fn agreeable_to_day_independent(inst: &Instance, order: &[ClientId]) -> Result<Reduction> {
    const ALG: &str = "agreeable_to_day_independent";
    if !is_agreeable_order(inst, order) {
        return Err(Error::precondition(
            ALG,
            "order is not a permutation with non-decreasing due dates on every day",
        ));
    }
    let (n, m) = (inst.n(), inst.m());
    let mut jobs = vec![vec![None; n]; m];
    for (day, row) in jobs.iter_mut().enumerate() {
        let dues: Vec<u64> = order.iter().map(|&c| inst.job(day, c).expect("total").due_date).collect();
        for (i, &c) in order.iter().enumerate() {
            let start = inst.job(day, c).expect("total").start();
            let first = dues[..i].partition_point(|&d| d <= start);
            row[c] = Some(Job::pd((i - first + 1) as u64, i as u64 + 1));
        }
    }
    let target = Instance::new(n, m, jobs, inst.fairness().clone(), inst.machines())?;
    Ok(Reduction {
        kind: ReductionKind::AgreeableToDayIndependent,
        certificate: "every daily conflict graph is unchanged, so feasible fair schedules coincide".into(),
        source: inst.clone(),
        target,
        pull: identity_map(m, n),
    })
}

/// Replaces `M` machines by `M` times as many single-machine days. Both
/// sides are fair exactly when `k * chi <= m * M` for the chromatic number
/// `chi` of the day-invariant conflict graph, provided `k <= m`.
pub fn machines_to_days(inst: &Instance) -> Result<Reduction> {
    const ALG: &str = "machines_to_days";
    let k = inst
        .uniform_k()
        .ok_or_else(|| Error::precondition(ALG, "requires a uniform fairness parameter"))?;
    if !inst.is_total() {
        return Err(Error::precondition(
            ALG,
            "instance has absent jobs; apply transform::totalize first",
        ));
    }
    let class = classify(inst);
    if !(class.day_independent_p && class.day_independent_d) {
        return Err(Error::precondition(
            ALG,
            "requires day-independent processing times and due dates",
        ));
    }
    let (n, m, machines) = (inst.n(), inst.m(), inst.machines());
    if machines == 1 {
        return Ok(Reduction {
            kind: ReductionKind::MachinesToDays,
            certificate: "single machine: identity".into(),
            source: inst.clone(),
            target: inst.clone(),
            pull: identity_map(m, n),
        });
    }
    if k > m {
        return Err(Error::precondition(
            ALG,
            format!("k = {k} exceeds m = {m}; the source is infeasible and extra days would not be"),
        ));
    }
    let row = if m == 0 { vec![None; n] } else { inst.day(0).to_vec() };
    let target = Instance::new(n, m * machines, vec![row; m * machines], Fairness::Uniform(k), 1)?;
    Ok(Reduction {
        kind: ReductionKind::MachinesToDays,
        certificate: format!(
            "{m} days on {machines} machines are {k}-fair iff {} single-machine copies of the day are",
            m * machines
        ),
        source: inst.clone(),
        target,
        pull: PullBack::Recolour,
    })
}

/// Source schedule built from a colouring: `k` consecutive copies of each
/// colour class, slot `s` on day `s mod m` and machine `s / m`. With `k <= m`
/// the copies of one class land on distinct days.
pub(super) fn pack_colour_classes(source: &Instance) -> Schedule {
    let m = source.m();
    let k = source.uniform_k().unwrap_or(0);
    let mut days = vec![Vec::new(); m];
    if m == 0 || k == 0 {
        return Schedule::new(days);
    }
    let classes = interval_coloring(&DayIntervals::of(source, 0)).classes();
    let mut slot = 0;
    for class in &classes {
        for _ in 0..k {
            days[slot % m].extend(class.iter().copied());
            slot += 1;
        }
    }
    Schedule::new(days)
}

/// Adds `b` blocking layers, then `a` conflict-free days.
///
/// A blocking layer adds a client whose job covers every existing job on
/// every existing day, and one new day on which all clients hold the same
/// unit job. It keeps 1-fairness: the new client can always take the new
/// day. A conflict-free day raises `k` by one.
pub fn pad_hardness(inst: &Instance, a: usize, b: usize) -> Result<Reduction> {
    const ALG: &str = "pad_hardness";
    let k = inst
        .uniform_k()
        .ok_or_else(|| Error::precondition(ALG, "requires a uniform fairness parameter"))?;
    if b > 0 {
        if k != 1 {
            return Err(Error::precondition(ALG, format!("blocking layers require k = 1 (k = {k})")));
        }
        if !inst.is_total() {
            return Err(Error::precondition(ALG, "blocking layers require a total instance"));
        }
        if inst.machines() != 1 {
            return Err(Error::precondition(ALG, "blocking layers require a single machine (M=1)"));
        }
    }
    let (n0, m0) = (inst.n(), inst.m());
    let mut jobs: Vec<Vec<Option<Job>>> = inst.jobs().to_vec();
    let mut n = n0;
    for _ in 0..b {
        let cover = jobs.iter().flatten().flatten().map(|j| j.due_date).max().unwrap_or(0).max(1);
        for row in &mut jobs {
            row.push(Some(Job::pd(cover, cover)));
        }
        n += 1;
        jobs.push(vec![unit(1); n]);
    }
    for _ in 0..a {
        jobs.push((0..n).map(|j| unit(j as u64 + 1)).collect());
    }
    let target = Instance::new(n, m0 + a + b, jobs, Fairness::Uniform(k + a), inst.machines())?;
    Ok(Reduction {
        kind: ReductionKind::PadHardness,
        certificate: format!(
            "(m, k) = ({m0}, {k}) lifted to ({}, {}) by {b} blocking layers and {a} conflict-free days",
            m0 + a + b,
            k + a
        ),
        source: inst.clone(),
        target,
        pull: PullBack::Padding { free_days: a, layers: b },
    })
}

pub(super) fn unpad(source: &Instance, sched: &Schedule, free_days: usize, layers: usize) -> Schedule {
    let (n0, m0) = (source.n(), source.m());
    debug_assert_eq!(sched.m(), m0 + layers + free_days);
    let mut days: Vec<Vec<ClientId>> = sched.days[..m0 + layers].to_vec();
    for t in (0..layers).rev() {
        let x = n0 + t;
        let new_day = m0 + t;
        let new_day_set = days.pop().expect("layer day");
        debug_assert_eq!(days.len(), new_day);
        if !new_day_set.contains(&x) {
            if let Some(i) = days.iter().position(|set| set.contains(&x)) {
                // Day i only serves x, because x conflicts with every job
                // there; hand it to whoever used the layer day instead.
                days[i] = new_day_set.iter().copied().filter(|&c| c < x).take(1).collect();
            }
        }
        for set in &mut days {
            set.retain(|&c| c < x);
        }
    }
    Schedule::new(days)
}
