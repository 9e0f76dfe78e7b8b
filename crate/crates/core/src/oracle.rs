//! Exhaustive ground-truth solver.
//!
//! Each day contributes only its maximal feasible client sets: serving more
//! clients never hurts fairness, so some solution uses maximal sets only. The
//! search walks the days (fewest candidate sets first), prunes when a client
//! can no longer reach its requirement on the remaining days, and memoizes
//! failed `(day, remaining need)` pairs.

use std::collections::HashSet;
use std::time::Instant;

use crate::conflict::{max_depth, DayIntervals, Interval};
use crate::error::{Error, Result};
use crate::instance::{ClientId, DayId, Instance, Schedule};
use crate::specialcase::{Algorithm, SolverOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
    /// Cap on candidate sets enumerated for a single day.
    pub max_day_sets: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 1 << 24,
            max_day_sets: 1 << 16,
        }
    }
}

struct OverBudget;

/// Maximal feasible client sets of one day, each sorted, in a deterministic
/// order. `None` if more than `cap` exist.
pub fn maximal_day_sets(inst: &Instance, day: DayId, cap: usize) -> Option<Vec<Vec<ClientId>>> {
    let items = DayIntervals::of(inst, day).items;
    let mut out = Vec::new();
    let res = if inst.machines() == 1 {
        let mut sorted = items.clone();
        sorted.sort_by_key(|iv| (iv.start, iv.end, iv.client));
        maximal_independent(&sorted, 0, &mut Vec::new(), &mut out, cap)
    } else {
        maximal_depth_bounded(&items, inst.machines(), 0, &mut Vec::new(), &mut out, cap)
    };
    res.ok()?;
    for set in &mut out {
        set.sort_unstable();
    }
    out.sort();
    Some(out)
}

/// Maximal independent sets of an interval graph. Chosen intervals are
/// pairwise disjoint, so a set is maximal iff no interval fits entirely in a
/// gap between consecutive chosen intervals (or before the first, or after
/// the last).
fn maximal_independent(
    sorted: &[Interval],
    frontier: u64,
    chosen: &mut Vec<ClientId>,
    out: &mut Vec<Vec<ClientId>>,
    cap: usize,
) -> std::result::Result<(), OverBudget> {
    let later: Vec<&Interval> = sorted.iter().filter(|iv| iv.start >= frontier).collect();
    if later.is_empty() {
        if out.len() >= cap {
            return Err(OverBudget);
        }
        out.push(chosen.clone());
        return Ok(());
    }
    let first_end = later.iter().map(|iv| iv.end).min().expect("non-empty");
    for iv in later {
        // Anything ending before this start would fit in the gap.
        if iv.start >= first_end {
            break;
        }
        chosen.push(iv.client);
        maximal_independent(sorted, iv.end, chosen, out, cap)?;
        chosen.pop();
    }
    Ok(())
}

/// Maximal client sets whose overlap depth stays within `machines`.
fn maximal_depth_bounded(
    items: &[Interval],
    machines: usize,
    next: usize,
    chosen: &mut Vec<Interval>,
    out: &mut Vec<Vec<ClientId>>,
    cap: usize,
) -> std::result::Result<(), OverBudget> {
    if next == items.len() {
        let maximal = items.iter().all(|iv| {
            chosen.iter().any(|c| c.client == iv.client) || {
                chosen.push(*iv);
                let too_deep = max_depth(chosen) > machines;
                chosen.pop();
                too_deep
            }
        });
        if maximal {
            if out.len() >= cap {
                return Err(OverBudget);
            }
            out.push(chosen.iter().map(|iv| iv.client).collect());
        }
        return Ok(());
    }
    chosen.push(items[next]);
    if max_depth(chosen) <= machines {
        maximal_depth_bounded(items, machines, next + 1, chosen, out, cap)?;
    }
    chosen.pop();
    maximal_depth_bounded(items, machines, next + 1, chosen, out, cap)
}

/// Every feasible (not necessarily maximal) client set of one day.
pub fn all_day_sets(inst: &Instance, day: DayId, cap: usize) -> Option<Vec<Vec<ClientId>>> {
    let items = DayIntervals::of(inst, day).items;
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn rec(
        items: &[Interval],
        machines: usize,
        next: usize,
        chosen: &mut Vec<Interval>,
        out: &mut Vec<Vec<ClientId>>,
        cap: usize,
    ) -> bool {
        if next == items.len() {
            out.push(chosen.iter().map(|iv| iv.client).collect());
            return out.len() <= cap;
        }
        if !rec(items, machines, next + 1, chosen, out, cap) {
            return false;
        }
        chosen.push(items[next]);
        let ok = max_depth(chosen) > machines || rec(items, machines, next + 1, chosen, out, cap);
        chosen.pop();
        ok
    }
    rec(&items, inst.machines(), 0, &mut chosen, &mut out, cap).then_some(out)
}

struct Search<'a> {
    order: Vec<DayId>,
    sets: Vec<Vec<Vec<ClientId>>>,
    /// avail[t][j]: days among order[t..] on which client j can be served.
    avail: Vec<Vec<usize>>,
    failed: HashSet<(usize, Vec<usize>)>,
    nodes: u64,
    budget: &'a SearchBudget,
    picks: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, t: usize, need: &[usize]) -> std::result::Result<bool, OverBudget> {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return Err(OverBudget);
        }
        if need.iter().all(|&x| x == 0) {
            return Ok(true);
        }
        if t == self.order.len() || need.iter().zip(&self.avail[t]).any(|(n, a)| n > a) {
            return Ok(false);
        }
        if self.failed.contains(&(t, need.to_vec())) {
            return Ok(false);
        }
        for idx in 0..self.sets[t].len() {
            let mut next = need.to_vec();
            for &c in &self.sets[t][idx] {
                next[c] = next[c].saturating_sub(1);
            }
            self.picks.push(idx);
            if self.run(t + 1, &next)? {
                return Ok(true);
            }
            self.picks.pop();
        }
        self.failed.insert((t, need.to_vec()));
        Ok(false)
    }
}

fn day_sets_for_search(
    inst: &Instance,
    budget: &SearchBudget,
) -> Result<Option<Vec<Vec<Vec<ClientId>>>>> {
    let mut all = Vec::with_capacity(inst.m());
    for day in 0..inst.m() {
        match maximal_day_sets(inst, day, budget.max_day_sets) {
            Some(s) => all.push(s),
            None => return Ok(None),
        }
    }
    Ok(Some(all))
}

pub fn solve_exhaustive(inst: &Instance, budget: &SearchBudget) -> Result<SolverOutcome> {
    let t0 = Instant::now();
    let (n, m) = (inst.n(), inst.m());
    let need: Vec<usize> = (0..n).map(|j| inst.requirement(j)).collect();
    if need.iter().all(|&x| x == 0) {
        return Ok(SolverOutcome::yes(Algorithm::Oracle, Schedule::empty(m)).timed(t0));
    }
    let Some(per_day) = day_sets_for_search(inst, budget)? else {
        return Ok(SolverOutcome::undecided(Algorithm::Oracle)
            .stat("max_day_sets", budget.max_day_sets)
            .timed(t0));
    };

    let mut order: Vec<DayId> = (0..m).collect();
    order.sort_by_key(|&d| (per_day[d].len(), d));
    let sets: Vec<Vec<Vec<ClientId>>> = order.iter().map(|&d| per_day[d].clone()).collect();
    let mut avail = vec![vec![0usize; n]; m + 1];
    for t in (0..m).rev() {
        let mut row = avail[t + 1].clone();
        let mut seen = vec![false; n];
        for set in &sets[t] {
            for &c in set {
                seen[c] = true;
            }
        }
        for (c, s) in seen.into_iter().enumerate() {
            row[c] += s as usize;
        }
        avail[t] = row;
    }

    let mut search = Search {
        order,
        sets,
        avail,
        failed: HashSet::new(),
        nodes: 0,
        budget,
        picks: Vec::new(),
    };
    let result = search.run(0, &need);
    let nodes = search.nodes as usize;
    let out = match result {
        Err(OverBudget) => SolverOutcome::undecided(Algorithm::Oracle),
        Ok(false) => SolverOutcome::no(Algorithm::Oracle),
        Ok(true) => {
            let mut days = vec![Vec::new(); m];
            for (t, &idx) in search.picks.iter().enumerate() {
                days[search.order[t]] = search.sets[t][idx].clone();
            }
            SolverOutcome::yes(Algorithm::Oracle, Schedule::new(days))
        }
    };
    Ok(out.stat("nodes", nodes).timed(t0))
}

/// Number of feasible fair schedules. The flag is false when the budget ran
/// out, in which case the count is a lower bound.
pub fn count_solutions(inst: &Instance, budget: &SearchBudget) -> Result<(u128, bool)> {
    let (n, m) = (inst.n(), inst.m());
    let mut per_day = Vec::with_capacity(m);
    for day in 0..m {
        match all_day_sets(inst, day, budget.max_day_sets) {
            Some(s) => per_day.push(s),
            None => return Ok((0, false)),
        }
    }
    let need: Vec<usize> = (0..n).map(|j| inst.requirement(j)).collect();
    let mut avail = vec![vec![0usize; n]; m + 1];
    for t in (0..m).rev() {
        avail[t] = avail[t + 1].clone();
        for (c, a) in avail[t].iter_mut().enumerate() {
            if per_day[t].iter().any(|s| s.contains(&c)) {
                *a += 1;
            }
        }
    }
    let suffix_total: Vec<u128> = {
        let mut v = vec![1u128; m + 1];
        for t in (0..m).rev() {
            v[t] = v[t + 1].saturating_mul(per_day[t].len() as u128);
        }
        v
    };

    fn rec(
        t: usize,
        need: &[usize],
        per_day: &[Vec<Vec<ClientId>>],
        avail: &[Vec<usize>],
        suffix_total: &[u128],
        nodes: &mut u64,
        max_nodes: u64,
    ) -> std::result::Result<u128, u128> {
        *nodes += 1;
        if *nodes > max_nodes {
            return Err(0);
        }
        if need.iter().all(|&x| x == 0) {
            return Ok(suffix_total[t]);
        }
        if t == per_day.len() || need.iter().zip(&avail[t]).any(|(n, a)| n > a) {
            return Ok(0);
        }
        let mut total = 0u128;
        for set in &per_day[t] {
            let mut next = need.to_vec();
            for &c in set {
                next[c] = next[c].saturating_sub(1);
            }
            match rec(t + 1, &next, per_day, avail, suffix_total, nodes, max_nodes) {
                Ok(x) => total += x,
                Err(x) => return Err(total + x),
            }
        }
        Ok(total)
    }

    let mut nodes = 0;
    match rec(0, &need, &per_day, &avail, &suffix_total, &mut nodes, budget.max_nodes) {
        Ok(c) => Ok((c, true)),
        Err(c) => Ok((c, false)),
    }
}

/// Largest number of maximal feasible sets on any day, capped.
pub fn max_day_set_count(inst: &Instance, cap: usize) -> Result<usize> {
    let mut best = 0;
    for day in 0..inst.m() {
        let count = maximal_day_sets(inst, day, cap)
            .map(|s| s.len())
            .ok_or_else(|| Error::Budget(format!("day {} has more than {cap} maximal sets", day + 1)))?;
        best = best.max(count);
    }
    Ok(best)
}
