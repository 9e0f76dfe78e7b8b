//! Integer programme over daily conflict-graph types: one variable per
//! (type, independent set) counting how many days of that type serve exactly
//! that set.

pub mod canon;
pub mod export;
mod model;
mod solve;

pub use canon::{canonical_type, CanonKey, CanonicalForm};
pub use model::{
    assignment_to_schedule, build_ilp, schedule_to_assignment, GraphType, IlpModel, IlpOptions, Row,
    Variable,
};
pub use solve::{solve_ilp_feasibility, IlpSolution, DEFAULT_MAX_NODES};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{verify_schedule, Instance, Job};
    use crate::oracle::{solve_exhaustive, SearchBudget};
    use proptest::prelude::*;

    fn uniform(rows: Vec<Vec<(u64, u64)>>, k: usize) -> Instance {
        Instance::uniform(
            rows.into_iter()
                .map(|r| r.into_iter().map(|(p, d)| Job::pd(p, d)).collect())
                .collect(),
            k,
        )
        .unwrap()
    }

    #[test]
    fn edgeless_model_shape() {
        let i = uniform(vec![vec![(1, 1), (1, 2)]; 3], 1);
        let model = build_ilp(&i, &IlpOptions::default()).unwrap();
        assert_eq!(model.types.len(), 1);
        assert_eq!(model.variables.len(), 4);
        assert_eq!(model.equalities.len(), 1);
        assert_eq!(model.coverage.len(), 2);
        assert_eq!(model.equalities[0].rhs, 3);
    }

    #[test]
    fn clique_pair_examples() {
        let i = uniform(vec![vec![(2, 2), (2, 2)]; 2], 1);
        let model = build_ilp(&i, &IlpOptions::default()).unwrap();
        let sets: Vec<&Vec<usize>> = model.variables.iter().map(|v| &v.set).collect();
        assert_eq!(sets, vec![&vec![], &vec![0], &vec![1]]);
        let IlpSolution::Feasible(x) = solve_ilp_feasibility(&model, DEFAULT_MAX_NODES).0 else {
            panic!("expected feasible");
        };
        assert_eq!(x, vec![0, 1, 1]);
        let sched = assignment_to_schedule(&model, &x).unwrap();
        assert!(verify_schedule(&i, &sched).ok());

        let k2 = build_ilp(&i.with_k(2), &IlpOptions::default()).unwrap();
        assert_eq!(solve_ilp_feasibility(&k2, DEFAULT_MAX_NODES).0, IlpSolution::Infeasible);
    }

    #[test]
    fn empty_model_is_feasible() {
        let i = Instance::uniform(vec![], 0).unwrap();
        let model = build_ilp(&i, &IlpOptions::default()).unwrap();
        assert_eq!(solve_ilp_feasibility(&model, 10).0, IlpSolution::Feasible(vec![]));
    }

    #[test]
    fn zero_assignment_with_k_zero() {
        let i = uniform(vec![vec![(2, 2), (2, 2)]; 2], 0);
        let model = build_ilp(&i, &IlpOptions::default()).unwrap();
        let mut x = vec![0; model.variables.len()];
        x[0] = 2;
        let sched = assignment_to_schedule(&model, &x).unwrap();
        assert!(sched.days.iter().all(Vec::is_empty));
        assert!(assignment_to_schedule(&model, &vec![0; model.variables.len()]).is_err());
    }

    #[test]
    fn lp_export_layout() {
        let i = uniform(vec![vec![(2, 2), (2, 2)]; 2], 1);
        let lp = export::to_lp(&build_ilp(&i, &IlpOptions::default()).unwrap());
        let eq = lp.find("type_1:").unwrap();
        let cover = lp.find("client_1:").unwrap();
        assert!(eq < cover);
        assert!(lp.contains(" type_1: x_1_none + x_1_1 + x_1_2 = 2\n"));
        assert!(lp.contains(" client_2: x_1_2 >= 1\n"));
        assert!(lp.ends_with("End\n"));
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        (1usize..=5, 1usize..=4).prop_flat_map(|(n, m)| {
            (
                prop::collection::vec(prop::collection::vec((1u64..=3, 0u64..=3), n), m),
                0..=m,
                any::<bool>(),
            )
                .prop_map(|(rows, k, repeat)| {
                    let mut rows: Vec<Vec<(u64, u64)>> = rows
                        .into_iter()
                        .map(|r| r.into_iter().map(|(p, e)| (p, p + e)).collect())
                        .collect();
                    if repeat {
                        let first = rows[0].clone();
                        rows.iter_mut().step_by(2).for_each(|r| *r = first.clone());
                    }
                    uniform(rows, k)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn round_trip_and_grouping(inst in arb_instance()) {
            let oracle = solve_exhaustive(&inst, &SearchBudget::default()).unwrap();
            let grouped = build_ilp(&inst, &IlpOptions::default()).unwrap();
            let per_day = build_ilp(&inst, &IlpOptions { group_types: false, ..Default::default() }).unwrap();
            prop_assert_eq!(per_day.types.len(), inst.m());
            for model in [&grouped, &per_day] {
                let (sol, _) = solve_ilp_feasibility(model, DEFAULT_MAX_NODES);
                match sol {
                    IlpSolution::Feasible(x) => {
                        prop_assert!(oracle.is_yes());
                        let sched = assignment_to_schedule(model, &x).unwrap();
                        prop_assert!(verify_schedule(&inst, &sched).ok());
                    }
                    IlpSolution::Infeasible => prop_assert!(!oracle.is_yes()),
                    IlpSolution::Undecided => prop_assert!(false, "budget"),
                }
            }
            if let Some(w) = &oracle.witness {
                let x = schedule_to_assignment(&grouped, w).unwrap();
                prop_assert!(grouped.violated_row(&x).is_none());
            }
        }
    }
}
