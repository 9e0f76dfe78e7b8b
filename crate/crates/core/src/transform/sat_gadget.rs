//! Three-day gadget: a bounded CNF formula becomes an instance with `k = 1`
//! that is fair exactly when the formula is satisfiable.
//!
//! Three dummy clients with identical jobs on every day take one day each,
//! so every job conflicting with theirs is lost on that day. Day 1 lets only
//! one of `x^T`, `x^F` run per variable and one literal client per clause
//! fall through; day 2 keeps exactly two of the three literal clients of
//! each 3-clause and none of the others; on day 3 a literal client can only
//! run if the variable client it sits on was served on day 1.

use serde::Serialize;

use crate::error::Result;
use crate::instance::{Fairness, Instance, Job, Schedule};

use super::cnf::{preprocess, Cnf, Preprocessed};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum SatRole {
    /// One of the three clients blocking a day each; `index` is 1-based.
    Dummy { index: usize },
    /// `x^T` when `value` is true, `x^F` otherwise. `var` is the DIMACS number.
    Variable { var: usize, value: bool },
    /// Literal `literal` (1-based) of clause `clause` (1-based, in the
    /// preprocessed formula).
    Clause { clause: usize, literal: usize, lit: i32 },
}

#[derive(Clone, Debug)]
pub struct SatGadget {
    pub instance: Instance,
    /// Role of every client, by client index.
    pub roles: Vec<SatRole>,
    pub preprocessed: Preprocessed,
    /// DIMACS numbers of the variables left after preprocessing, in gadget order.
    pub variables: Vec<usize>,
}

impl SatGadget {
    /// Variable `x` is true iff `x^T` is served on day 1. Variables fixed by
    /// preprocessing keep their forced value; unused ones are false.
    pub fn decode_assignment(&self, sched: &Schedule) -> Vec<bool> {
        let mut value: Vec<bool> = self.preprocessed.forced.iter().map(|f| f.unwrap_or(false)).collect();
        for (l, &var) in self.variables.iter().enumerate() {
            value[var - 1] = sched.days.first().is_some_and(|d| d.contains(&true_client(l)));
        }
        value
    }

    pub fn roles_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.roles).expect("roles serialize");
        s.push('\n');
        s
    }
}

fn true_client(l: usize) -> usize {
    3 + 2 * l
}

pub fn gadget_from_3sat(cnf: &Cnf) -> Result<SatGadget> {
    let pre = preprocess(cnf)?;
    let formula = &pre.formula;
    let occ = formula.occurrences();
    let variables: Vec<usize> = (1..=formula.num_vars).filter(|&v| occ[v - 1] > 0).collect();
    let mut gadget_index = vec![usize::MAX; formula.num_vars + 1];
    for (l, &v) in variables.iter().enumerate() {
        gadget_index[v] = l;
    }
    let alpha = variables.len() as u64;
    let beta_a = formula.clauses.iter().filter(|c| c.len() == 2).count() as u64;

    let mut roles: Vec<SatRole> = (1..=3).map(|index| SatRole::Dummy { index }).collect();
    for &var in &variables {
        roles.push(SatRole::Variable { var, value: true });
        roles.push(SatRole::Variable { var, value: false });
    }
    let mut day1: Vec<Job> = vec![Job::pd(2, 2); 3];
    let mut day2: Vec<Job> = vec![Job::pd(2, 2); 3];
    let mut day3: Vec<Job> = vec![Job::pd(2, 2); 3];
    for l in 1..=alpha {
        day1.extend([Job::pd(2, 2 * l + 3); 2]);
        day2.extend([Job::pd(2, 2); 2]);
        day3.push(Job::pd(2, 10 * l - 4));
        day3.push(Job::pd(2, 10 * l + 1));
    }

    // Literal slots on day 3 next to the variable clients, filled in the
    // order the literals occur in the formula.
    let mut used = vec![(0u64, 0u64); variables.len()];
    let mut slot = |lit: i32| -> u64 {
        let l = gadget_index[lit.unsigned_abs() as usize];
        let base = 10 * (l as u64 + 1);
        let (pos, neg) = &mut used[l];
        if lit > 0 {
            *pos += 1;
            base - 5 + 2 * (*pos - 1)
        } else {
            *neg += 1;
            base + 2 * (*neg - 1)
        }
    };

    let (mut a_seen, mut b_seen) = (0u64, 0u64);
    for (ci, clause) in formula.clauses.iter().enumerate() {
        let d1 = if clause.len() == 2 {
            a_seen += 1;
            2 * alpha + 2 * a_seen + 5
        } else {
            b_seen += 1;
            2 * alpha + 2 * beta_a + 2 * b_seen + 7
        };
        for (li, &lit) in clause.iter().enumerate() {
            roles.push(SatRole::Clause {
                clause: ci + 1,
                literal: li + 1,
                lit,
            });
            day1.push(Job::pd(2, d1));
            day2.push(if clause.len() == 2 {
                Job::pd(2, 2)
            } else {
                Job::pd(2, 3 + 3 * b_seen)
            });
            day3.push(Job::pd(2, slot(lit)));
        }
    }
    let n = roles.len();
    let instance = Instance::new(
        n,
        3,
        vec![day1, day2, day3]
            .into_iter()
            .map(|row| row.into_iter().map(Some).collect())
            .collect(),
        Fairness::Uniform(1),
        1,
    )?;
    Ok(SatGadget {
        instance,
        roles,
        preprocessed: pre,
        variables,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflict::conflict_pairs;
    use crate::conflict::DayIntervals;
    use crate::instance::verify_schedule;
    use crate::oracle::{solve_exhaustive, SearchBudget};

    fn satisfiable(cnf: &Cnf) -> bool {
        (0..1u32 << cnf.num_vars).any(|bits| {
            let a: Vec<bool> = (0..cnf.num_vars).map(|v| bits >> v & 1 == 1).collect();
            cnf.evaluate(&a)
        })
    }

    fn check(cnf: &Cnf) -> bool {
        let g = gadget_from_3sat(cnf).unwrap();
        assert_eq!(g.instance.m(), 3);
        assert!(g.instance.jobs().iter().flatten().flatten().all(|j| j.processing_time == 2));
        let out = solve_exhaustive(&g.instance, &SearchBudget::default()).unwrap();
        assert_eq!(out.is_yes(), satisfiable(cnf), "{cnf:?}");
        if let Some(w) = &out.witness {
            assert!(verify_schedule(&g.instance, w).ok());
            assert!(cnf.evaluate(&g.decode_assignment(w)));
        }
        out.is_yes()
    }

    #[test]
    fn xor_pair_is_yes() {
        let cnf = Cnf {
            num_vars: 2,
            clauses: vec![vec![1, 2], vec![-1, -2]],
        };
        assert!(check(&cnf));
    }

    #[test]
    fn bounded_unsatisfiable_family_is_no() {
        // y forces z and not z; x or y then w, and w forces u and not u.
        let cnf = Cnf {
            num_vars: 5,
            clauses: vec![
                vec![-2, 3],
                vec![-3, -2],
                vec![1, 2],
                vec![-4, 5],
                vec![-5, -4],
                vec![-1, 4],
            ],
        };
        assert!(cnf.check_promise().is_ok());
        assert!(!check(&cnf));
    }

    #[test]
    fn three_clause_with_mixed_partners() {
        let cnf = Cnf {
            num_vars: 3,
            clauses: vec![vec![1, 2, 3], vec![-1, -2], vec![-2, -3], vec![-1, 3]],
        };
        check(&cnf);
    }

    #[test]
    fn day_one_layout() {
        let cnf = Cnf {
            num_vars: 2,
            clauses: vec![vec![1, 2], vec![-1, -2]],
        };
        let g = gadget_from_3sat(&cnf).unwrap();
        let dues: Vec<u64> = g.instance.day(0).iter().map(|j| j.unwrap().due_date).collect();
        // a1..a3, x1 pair, x2 pair, two 2-clauses.
        assert_eq!(dues, vec![2, 2, 2, 5, 5, 7, 7, 11, 11, 13, 13]);
        let mut edges = conflict_pairs(&DayIntervals::of(&g.instance, 0).items);
        edges.sort_unstable();
        assert_eq!(
            edges,
            vec![(0, 1), (0, 2), (1, 2), (3, 4), (5, 6), (7, 8), (9, 10)]
        );
    }

    #[test]
    fn rejects_promise_violation() {
        let cnf = Cnf {
            num_vars: 2,
            clauses: vec![vec![1, 2], vec![-1, 2], vec![1, -2], vec![-1, -2]],
        };
        assert!(gadget_from_3sat(&cnf).is_err());
    }

    #[test]
    fn fully_eliminated_formula() {
        let cnf = Cnf {
            num_vars: 2,
            clauses: vec![vec![1, 2]],
        };
        let g = gadget_from_3sat(&cnf).unwrap();
        assert_eq!(g.instance.n(), 3);
        assert!(check(&cnf));
    }

    #[test]
    fn roles_serialize() {
        let cnf = Cnf {
            num_vars: 2,
            clauses: vec![vec![1, 2], vec![-1, -2]],
        };
        let json = gadget_from_3sat(&cnf).unwrap().roles_json();
        assert!(json.contains("\"role\": \"dummy\""));
        assert!(json.contains("\"role\": \"clause\""));
    }
}
