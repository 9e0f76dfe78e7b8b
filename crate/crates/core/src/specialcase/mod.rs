//! Polynomial-time regimes: trivial fairness levels, `k = m - 1` through
//! 2-SAT, unit processing times through bipartite matching, day-independent
//! due dates through a layered DP, and day-independent jobs through the
//! chromatic number.

mod daydue;
pub mod dispatch;

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::conflict::{self, DayIntervals};
use crate::error::{Error, Result};
use crate::instance::{classify, ClientId, Instance, Schedule};
use crate::kernels::{hopcroft_karp, Lit, TwoSat};

pub use daydue::{solve_day_independent_d, solve_day_independent_d_with_budget};
pub use dispatch::{dispatch, dispatch_with, solve_any, DispatchConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Trivial,
    TwoSat,
    Matching,
    DayDue,
    Chromatic,
    Treewidth,
    Ilp,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Trivial,
        Algorithm::TwoSat,
        Algorithm::Matching,
        Algorithm::DayDue,
        Algorithm::Chromatic,
        Algorithm::Treewidth,
        Algorithm::Ilp,
        Algorithm::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Trivial => "trivial",
            Algorithm::TwoSat => "twosat",
            Algorithm::Matching => "matching",
            Algorithm::DayDue => "daydue",
            Algorithm::Chromatic => "chromatic",
            Algorithm::Treewidth => "treewidth",
            Algorithm::Ilp => "ilp",
            Algorithm::Oracle => "oracle",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolverOutcome {
    pub answer: Answer,
    pub witness: Option<Schedule>,
    pub algorithm: Algorithm,
    /// Size counters such as variables, clauses, states or search nodes.
    pub stats: BTreeMap<String, u64>,
    #[serde(serialize_with = "ser_duration_ms")]
    pub elapsed: Duration,
    /// Transformations applied before the final solver, in order.
    pub route: Vec<String>,
}

fn ser_duration_ms<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

impl SolverOutcome {
    pub(crate) fn new(algorithm: Algorithm, answer: Answer, witness: Option<Schedule>) -> Self {
        debug_assert_eq!(answer == Answer::Yes, witness.is_some());
        SolverOutcome {
            answer,
            witness,
            algorithm,
            stats: BTreeMap::new(),
            elapsed: Duration::ZERO,
            route: Vec::new(),
        }
    }

    pub(crate) fn yes(algorithm: Algorithm, witness: Schedule) -> Self {
        Self::new(algorithm, Answer::Yes, Some(witness))
    }

    pub(crate) fn no(algorithm: Algorithm) -> Self {
        Self::new(algorithm, Answer::No, None)
    }

    pub(crate) fn undecided(algorithm: Algorithm) -> Self {
        Self::new(algorithm, Answer::Undecided, None)
    }

    pub(crate) fn stat(mut self, key: &str, value: usize) -> Self {
        self.stats.insert(key.to_string(), value as u64);
        self
    }

    pub(crate) fn timed(mut self, since: Instant) -> Self {
        self.elapsed = since.elapsed();
        self
    }

    pub fn is_yes(&self) -> bool {
        self.answer == Answer::Yes
    }
}

/// Instances with `k = 0` or `k >= m`.
pub fn solve_trivial(inst: &Instance) -> Result<SolverOutcome> {
    let t0 = Instant::now();
    let k = inst.require_core("trivial")?;
    let (n, m) = (inst.n(), inst.m());
    let out = if k == 0 || n == 0 {
        SolverOutcome::yes(Algorithm::Trivial, Schedule::empty(m))
    } else if k > m {
        SolverOutcome::no(Algorithm::Trivial)
    } else if k == m {
        let edgeless = (0..m).all(|d| conflict::clique_number(&DayIntervals::of(inst, d)) <= 1);
        if edgeless {
            SolverOutcome::yes(Algorithm::Trivial, Schedule::new(vec![(0..n).collect(); m]))
        } else {
            SolverOutcome::no(Algorithm::Trivial)
        }
    } else {
        return Err(Error::precondition(
            "trivial",
            format!("requires k = 0 or k >= m (k = {k}, m = {m})"),
        ));
    };
    Ok(out.timed(t0))
}

/// The 2-SAT formula for `k = m - 1`: variable `day * n + client` says the
/// client is served that day.
pub fn two_sat_formula(inst: &Instance) -> Result<TwoSat> {
    let k = inst.require_core("twosat")?;
    let (n, m) = (inst.n(), inst.m());
    if k + 1 != m {
        return Err(Error::precondition(
            "twosat",
            format!("requires k = m - 1 (k = {k}, m = {m})"),
        ));
    }
    let var = |day: usize, client: ClientId| day * n + client;
    let mut sat = TwoSat::new(n * m);
    for day in 0..m {
        for (a, b) in conflict::conflict_pairs(&DayIntervals::of(inst, day).items) {
            sat.add_clause(Lit::neg(var(day, a)), Lit::neg(var(day, b)));
        }
    }
    for client in 0..n {
        for d1 in 0..m {
            for d2 in d1 + 1..m {
                sat.add_clause(Lit::pos(var(d1, client)), Lit::pos(var(d2, client)));
            }
        }
    }
    Ok(sat)
}

pub fn assignment_to_schedule(n: usize, m: usize, assignment: &[bool]) -> Schedule {
    Schedule::new(
        (0..m)
            .map(|day| (0..n).filter(|&c| assignment[day * n + c]).collect())
            .collect(),
    )
}

pub fn schedule_to_assignment(n: usize, sched: &Schedule) -> Vec<bool> {
    let mut a = vec![false; n * sched.m()];
    for (day, set) in sched.days.iter().enumerate() {
        for &c in set {
            a[day * n + c] = true;
        }
    }
    a
}

pub fn solve_two_sat(inst: &Instance) -> Result<SolverOutcome> {
    let t0 = Instant::now();
    let sat = two_sat_formula(inst)?;
    let (vars, clauses) = (sat.vars(), sat.clauses().len());
    let out = match sat.solve() {
        Some(a) => SolverOutcome::yes(
            Algorithm::TwoSat,
            assignment_to_schedule(inst.n(), inst.m(), &a),
        ),
        None => SolverOutcome::no(Algorithm::TwoSat),
    };
    Ok(out.stat("variables", vars).stat("clauses", clauses).timed(t0))
}

/// Size of the maximum matching between jobs and (due-date slot or
/// rejection) vertices; the instance is YES iff it equals `n * m`.
pub fn unit_matching(inst: &Instance) -> Result<(usize, Option<Schedule>)> {
    let k = inst.require_core("matching")?;
    if !classify(inst).unit_processing {
        return Err(Error::precondition("matching", "requires p_{i,j}=1 for every job"));
    }
    let (n, m) = (inst.n(), inst.m());
    if k > m && n > 0 {
        return Ok((0, None));
    }
    let reject_per_client = m - k.min(m);
    let mut slots: BTreeMap<(usize, u64), usize> = BTreeMap::new();
    for day in 0..m {
        for client in 0..n {
            let d = inst.job(day, client).expect("total").due_date;
            let next = slots.len();
            slots.entry((day, d)).or_insert(next);
        }
    }
    // Renumber so right vertex ids follow the sorted (day, due date) order.
    for (id, v) in slots.values_mut().enumerate() {
        *v = id;
    }
    let due_vertices = slots.len();
    let right = due_vertices + n * reject_per_client;
    let mut adj = vec![Vec::new(); n * m];
    for day in 0..m {
        for client in 0..n {
            let d = inst.job(day, client).expect("total").due_date;
            let list = &mut adj[day * n + client];
            list.push(slots[&(day, d)]);
            let base = due_vertices + client * reject_per_client;
            list.extend(base..base + reject_per_client);
        }
    }
    let matching = hopcroft_karp(n * m, right, &adj);
    if matching.size < n * m {
        return Ok((matching.size, None));
    }
    let days = (0..m)
        .map(|day| {
            (0..n)
                .filter(|&c| matching.mate_left[day * n + c].is_some_and(|v| v < due_vertices))
                .collect()
        })
        .collect();
    Ok((matching.size, Some(Schedule::new(days))))
}

pub fn solve_unit_matching(inst: &Instance) -> Result<SolverOutcome> {
    let t0 = Instant::now();
    let (size, witness) = unit_matching(inst)?;
    let out = match witness {
        Some(s) => SolverOutcome::yes(Algorithm::Matching, s),
        None => SolverOutcome::no(Algorithm::Matching),
    };
    Ok(out.stat("matching_size", size).stat("jobs", inst.n() * inst.m()).timed(t0))
}

/// Chromatic number of the day-invariant conflict graph.
pub fn day_invariant_chi(inst: &Instance) -> Result<usize> {
    inst.require_core("chromatic")?;
    let class = classify(inst);
    if !(class.day_independent_p && class.day_independent_d) {
        return Err(Error::precondition(
            "chromatic",
            "requires day-independent processing times and due dates",
        ));
    }
    if inst.m() == 0 {
        return Ok(0);
    }
    Ok(conflict::interval_coloring(&DayIntervals::of(inst, 0)).chi)
}

pub fn solve_chromatic(inst: &Instance) -> Result<SolverOutcome> {
    let t0 = Instant::now();
    let k = inst.require_core("chromatic")?;
    let class = classify(inst);
    if !(class.day_independent_p && class.day_independent_d) {
        return Err(Error::precondition(
            "chromatic",
            "requires day-independent processing times and due dates",
        ));
    }
    let (n, m) = (inst.n(), inst.m());
    if n == 0 || k == 0 {
        return Ok(SolverOutcome::yes(Algorithm::Chromatic, Schedule::empty(m)).timed(t0));
    }
    let coloring = conflict::interval_coloring(&DayIntervals::of(inst, 0));
    let chi = coloring.chi;
    let out = if k.saturating_mul(chi) <= m {
        let classes = coloring.classes();
        let days = (0..m).map(|day| classes[day % chi].clone()).collect();
        SolverOutcome::yes(Algorithm::Chromatic, Schedule::new(days))
    } else {
        SolverOutcome::no(Algorithm::Chromatic)
    };
    Ok(out.stat("chi", chi).timed(t0))
}

/// Runs one named algorithm without any routing.
pub fn solve_with(inst: &Instance, algorithm: Algorithm, config: &DispatchConfig) -> Result<SolverOutcome> {
    match algorithm {
        Algorithm::Trivial => solve_trivial(inst),
        Algorithm::TwoSat => solve_two_sat(inst),
        Algorithm::Matching => solve_unit_matching(inst),
        Algorithm::DayDue => solve_day_independent_d_with_budget(inst, config.daydue_max_states),
        Algorithm::Chromatic => solve_chromatic(inst),
        Algorithm::Treewidth => dispatch::run_treewidth(inst, None, config),
        Algorithm::Ilp => dispatch::run_ilp(inst, config),
        Algorithm::Oracle => crate::oracle::solve_exhaustive(inst, &config.oracle_budget),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{verify_schedule, Job};
    use crate::oracle::{solve_exhaustive, SearchBudget};

    fn uniform(rows: Vec<Vec<(u64, u64)>>, k: usize) -> Instance {
        Instance::uniform(
            rows.into_iter()
                .map(|r| r.into_iter().map(|(p, d)| Job::pd(p, d)).collect())
                .collect(),
            k,
        )
        .unwrap()
    }

    fn check(inst: &Instance, out: &SolverOutcome) {
        if let Some(w) = &out.witness {
            assert!(verify_schedule(inst, w).ok(), "{:?}", verify_schedule(inst, w));
        }
        let oracle = solve_exhaustive(inst, &SearchBudget::default()).unwrap();
        assert_eq!(out.answer, oracle.answer, "{inst}");
    }

    #[test]
    fn trivial_regimes() {
        let clash = uniform(vec![vec![(2, 2), (2, 2)]; 3], 3);
        assert_eq!(solve_trivial(&clash).unwrap().answer, Answer::No);
        assert!(solve_trivial(&clash.with_k(0)).unwrap().witness.unwrap().days.iter().all(Vec::is_empty));
        let free = uniform(vec![vec![(1, 1), (1, 2)]; 3], 3);
        let out = solve_trivial(&free).unwrap();
        assert_eq!(out.witness.unwrap().days, vec![vec![0, 1]; 3]);
        assert!(solve_trivial(&free.with_k(1)).is_err());
    }

    #[test]
    fn two_sat_examples() {
        let single = uniform(vec![vec![(1, 1)]; 2], 1);
        check(&single, &solve_two_sat(&single).unwrap());
        let pair = uniform(vec![vec![(2, 2), (2, 2)]; 2], 1);
        let out = solve_two_sat(&pair).unwrap();
        assert!(out.is_yes());
        check(&pair, &out);
        let triple = uniform(vec![vec![(2, 2); 3]; 2], 1);
        assert_eq!(solve_two_sat(&triple).unwrap().answer, Answer::No);
        assert!(solve_two_sat(&triple.with_k(0)).is_err());
    }

    #[test]
    fn matching_examples() {
        // Distinct due dates on day 1, shared on days 2 and 3.
        let inst = uniform(vec![vec![(1, 1), (1, 2)], vec![(1, 3), (1, 3)], vec![(1, 3), (1, 3)]], 1);
        let out = solve_unit_matching(&inst).unwrap();
        assert!(out.is_yes());
        check(&inst, &out);
        let one = uniform(vec![vec![(1, 1)]], 1);
        assert!(solve_unit_matching(&one).unwrap().is_yes());
        let crowd = uniform(vec![vec![(1, 4); 3]; 2], 2);
        assert_eq!(solve_unit_matching(&crowd).unwrap().answer, Answer::No);
        let err = solve_unit_matching(&uniform(vec![vec![(2, 2)]], 1)).unwrap_err();
        assert!(err.to_string().contains("requires p_{i,j}=1"));
    }

    #[test]
    fn chromatic_examples() {
        let pair = uniform(vec![vec![(2, 2), (2, 2)]; 4], 2);
        assert!(solve_chromatic(&pair).unwrap().is_yes());
        assert_eq!(solve_chromatic(&pair.with_k(3)).unwrap().answer, Answer::No);
        let free = uniform(vec![vec![(1, 1), (1, 2), (1, 3)]; 3], 3);
        assert!(solve_chromatic(&free).unwrap().is_yes());
        let varying = uniform(vec![vec![(1, 1)], vec![(1, 2)]], 1);
        assert!(solve_chromatic(&varying).is_err());
    }
}
