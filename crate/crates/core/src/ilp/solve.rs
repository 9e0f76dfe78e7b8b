//! Exact feasibility search for the scheduling ILP.
//!
//! A variable whose set is contained in another set of the same type can be
//! fixed to 0: moving its count to the larger set keeps every row satisfied.
//! The remaining variables are searched day slot by day slot, with counts
//! within a type generated in non-decreasing variable order so that every
//! integer point is visited once. Branches are cut when some client cannot
//! reach its covering row on the remaining slots, and failed
//! `(slot, first allowed variable, residual rows)` states are remembered.

use std::collections::HashSet;

use super::model::IlpModel;

pub const DEFAULT_MAX_NODES: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IlpSolution {
    Feasible(Vec<u64>),
    Infeasible,
    Undecided,
}

struct Search<'a> {
    model: &'a IlpModel,
    /// Type of each slot; slots of one type are consecutive.
    slot_type: Vec<usize>,
    /// Undominated variables per type.
    candidates: Vec<Vec<usize>>,
    /// avail[s][c]: slots from `s` on whose type can serve client `c`.
    avail: Vec<Vec<u64>>,
    failed: HashSet<(usize, usize, Vec<u64>)>,
    picks: Vec<usize>,
    nodes: u64,
    max_nodes: u64,
}

impl Search<'_> {
    fn run(&mut self, slot: usize, first: usize, need: &[u64]) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return None;
        }
        if need.iter().all(|&x| x == 0) {
            return Some(true);
        }
        if slot == self.slot_type.len() || need.iter().zip(&self.avail[slot]).any(|(n, a)| n > a) {
            return Some(false);
        }
        let key = (slot, first, need.to_vec());
        if self.failed.contains(&key) {
            return Some(false);
        }
        let ty = self.slot_type[slot];
        let same_type_next = self.slot_type.get(slot + 1) == Some(&ty);
        for ci in first..self.candidates[ty].len() {
            let var = self.candidates[ty][ci];
            let mut next = need.to_vec();
            for &c in &self.model.variables[var].set {
                next[c] = next[c].saturating_sub(1);
            }
            self.picks.push(var);
            let next_first = if same_type_next { ci } else { 0 };
            match self.run(slot + 1, next_first, &next) {
                None => return None,
                Some(true) => return Some(true),
                Some(false) => {}
            }
            self.picks.pop();
        }
        self.failed.insert(key);
        Some(false)
    }
}

fn undominated(model: &IlpModel, ty: usize) -> Vec<usize> {
    let vars = model.vars_of_type(ty);
    let subset = |a: &[usize], b: &[usize]| a.len() < b.len() && a.iter().all(|x| b.binary_search(x).is_ok());
    vars.iter()
        .copied()
        .filter(|&v| {
            let set = &model.variables[v].set;
            !vars.iter().any(|&w| subset(set, &model.variables[w].set))
        })
        .collect()
}

/// Exact feasibility with a node budget. Returns the verdict and the number
/// of search nodes used.
pub fn solve_ilp_feasibility(model: &IlpModel, max_nodes: u64) -> (IlpSolution, u64) {
    let n = model.n;
    let candidates: Vec<Vec<usize>> = (0..model.types.len()).map(|t| undominated(model, t)).collect();
    let mut type_order: Vec<usize> = (0..model.types.len()).collect();
    type_order.sort_by_key(|&t| (candidates[t].len(), t));
    let slot_type: Vec<usize> = type_order
        .iter()
        .flat_map(|&t| std::iter::repeat_n(t, model.types[t].multiplicity()))
        .collect();

    let serves: Vec<Vec<bool>> = candidates
        .iter()
        .map(|vars| {
            let mut s = vec![false; n];
            for &v in vars {
                for &c in &model.variables[v].set {
                    s[c] = true;
                }
            }
            s
        })
        .collect();
    let slots = slot_type.len();
    let mut avail = vec![vec![0u64; n]; slots + 1];
    for s in (0..slots).rev() {
        avail[s] = avail[s + 1].clone();
        for c in 0..n {
            avail[s][c] += serves[slot_type[s]][c] as u64;
        }
    }

    let need: Vec<u64> = model.coverage.iter().map(|r| r.rhs).collect();
    let mut search = Search {
        model,
        slot_type,
        candidates,
        avail,
        failed: HashSet::new(),
        picks: Vec::new(),
        nodes: 0,
        max_nodes,
    };
    let verdict = search.run(0, 0, &need);
    let nodes = search.nodes;
    let solution = match verdict {
        None => IlpSolution::Undecided,
        Some(false) => IlpSolution::Infeasible,
        Some(true) => {
            let mut x = vec![0u64; model.variables.len()];
            for &var in &search.picks {
                x[var] += 1;
            }
            // Slots not reached in the search take their type's first set.
            for &ty in &search.slot_type[search.picks.len()..] {
                x[search.candidates[ty][0]] += 1;
            }
            debug_assert!(model.violated_row(&x).is_none());
            IlpSolution::Feasible(x)
        }
    };
    (solution, nodes)
}
