//! Layered DP for day-independent due dates.
//!
//! Clients are processed by non-decreasing due date. A state records, for
//! every day, the position of the last client served that day (0 = none).
//! Serving the next client on day `i` is possible iff its job starts no
//! earlier than the due date of that last client, so each layer extends the
//! states by every `k`-subset of days that passes this check.

use std::collections::HashMap;
use std::time::Instant;

use super::{Algorithm, SolverOutcome};
use crate::error::{Error, Result};
use crate::instance::{classify, Instance, Schedule};

pub const DEFAULT_MAX_STATES: usize = 1 << 22;

type State = Box<[u32]>;

pub fn solve_day_independent_d(inst: &Instance) -> Result<SolverOutcome> {
    solve_day_independent_d_with_budget(inst, DEFAULT_MAX_STATES)
}

pub fn solve_day_independent_d_with_budget(inst: &Instance, max_states: usize) -> Result<SolverOutcome> {
    let t0 = Instant::now();
    let k = inst.require_core("daydue")?;
    if !classify(inst).day_independent_d {
        return Err(Error::precondition("daydue", "requires day-independent due dates"));
    }
    let (n, m) = (inst.n(), inst.m());
    if n == 0 || k == 0 {
        return Ok(SolverOutcome::yes(Algorithm::DayDue, Schedule::empty(m)).timed(t0));
    }
    if k > m {
        return Ok(SolverOutcome::no(Algorithm::DayDue).timed(t0));
    }

    let due = |c: usize| inst.job(0, c).expect("total").due_date;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&c| (due(c), c));
    // due_at[q] is the due date of the client at 1-based position q; 0 for none.
    let due_at: Vec<u64> = std::iter::once(0).chain(order.iter().map(|&c| due(c))).collect();
    let subsets = k_subsets(m, k);

    // layers[q] maps each state after q clients to (previous state, day mask).
    let mut layers: Vec<HashMap<State, (State, u64)>> = Vec::with_capacity(n + 1);
    let root: State = vec![0u32; m].into_boxed_slice();
    layers.push(HashMap::from([(root.clone(), (root, 0))]));
    let mut total_states = 1usize;

    for q in 1..=n {
        let client = order[q - 1];
        let d = due_at[q];
        let p: Vec<u64> = (0..m)
            .map(|day| inst.job(day, client).expect("total").processing_time)
            .collect();
        let mut next: HashMap<State, (State, u64)> = HashMap::new();
        let mut keys: Vec<&State> = layers[q - 1].keys().collect();
        keys.sort_unstable();
        for state in keys {
            for &mask in &subsets {
                let ok = (0..m)
                    .all(|day| mask >> day & 1 == 0 || p[day] <= d - due_at[state[day] as usize]);
                if !ok {
                    continue;
                }
                let mut succ = state.clone();
                for (day, slot) in succ.iter_mut().enumerate() {
                    if mask >> day & 1 == 1 {
                        *slot = q as u32;
                    }
                }
                next.entry(succ).or_insert_with(|| (state.clone(), mask));
            }
        }
        total_states += next.len();
        if total_states > max_states {
            return Ok(SolverOutcome::undecided(Algorithm::DayDue)
                .stat("states", total_states)
                .timed(t0));
        }
        if next.is_empty() {
            return Ok(SolverOutcome::no(Algorithm::DayDue)
                .stat("states", total_states)
                .timed(t0));
        }
        layers.push(next);
    }

    let mut days = vec![Vec::new(); m];
    let mut state = layers[n].keys().min().expect("non-empty").clone();
    for q in (1..=n).rev() {
        let (prev, mask) = layers[q][&state].clone();
        for (day, set) in days.iter_mut().enumerate() {
            if mask >> day & 1 == 1 {
                set.push(order[q - 1]);
            }
        }
        state = prev;
    }
    Ok(SolverOutcome::yes(Algorithm::DayDue, Schedule::new(days))
        .stat("states", total_states)
        .timed(t0))
}

/// All `k`-subsets of `m` days as bitmasks, in increasing order.
fn k_subsets(m: usize, k: usize) -> Vec<u64> {
    assert!(m < 64, "at most 63 days");
    (0u64..1 << m).filter(|s| s.count_ones() as usize == k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{verify_schedule, Job};
    use crate::specialcase::Answer;

    fn inst(p: Vec<Vec<u64>>, d: &[u64], k: usize) -> Instance {
        Instance::uniform(
            p.into_iter()
                .map(|row| row.into_iter().zip(d).map(|(p, &d)| Job::pd(p, d)).collect())
                .collect(),
            k,
        )
        .unwrap()
    }

    #[test]
    fn small_examples() {
        let one = inst(vec![vec![1], vec![1]], &[1], 1);
        assert!(solve_day_independent_d(&one).unwrap().is_yes());

        let pair = inst(vec![vec![2, 2], vec![2, 2]], &[2, 2], 1);
        let out = solve_day_independent_d(&pair).unwrap();
        assert!(verify_schedule(&pair, out.witness.as_ref().unwrap()).ok());

        let triple = inst(vec![vec![2, 2, 2], vec![2, 2, 2]], &[2, 2, 2], 1);
        assert_eq!(solve_day_independent_d(&triple).unwrap().answer, Answer::No);
    }

    #[test]
    fn processing_time_may_vary_by_day() {
        // Client 2 (d=3) clashes with client 1 (d=1) only on day 1.
        let i = inst(vec![vec![1, 3], vec![1, 1]], &[1, 3], 2);
        assert_eq!(solve_day_independent_d(&i).unwrap().answer, Answer::No);
        let out = solve_day_independent_d(&i.with_k(1)).unwrap();
        assert!(verify_schedule(&i.with_k(1), out.witness.as_ref().unwrap()).ok());
    }

    #[test]
    fn rejects_day_dependent_due_dates() {
        let i = Instance::uniform(vec![vec![Job::pd(1, 1)], vec![Job::pd(1, 2)]], 1).unwrap();
        assert!(solve_day_independent_d(&i).is_err());
    }

    #[test]
    fn budget_yields_undecided() {
        let i = inst(vec![vec![1, 1, 1]; 3], &[1, 2, 3], 1);
        assert_eq!(solve_day_independent_d_with_budget(&i, 2).unwrap().answer, Answer::Undecided);
    }
}
