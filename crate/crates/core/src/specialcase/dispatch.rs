//! Algorithm selection.
//!
//! Priority on core instances: trivial levels and `k = m - 1`, unit
//! processing times, day-independent jobs, day-independent due dates,
//! agreeable due dates, then the treewidth DP, the ILP and the exhaustive
//! search, each only within its budget. [`solve_any`] first rewrites
//! generalized instances into core ones and maps the witness back.

use std::time::Instant;

use crate::conflict::build_overall_graph;
use crate::error::{Error, Result};
use crate::ilp::{self, IlpOptions, IlpSolution};
use crate::instance::{classify, verify_schedule, Fairness, Instance};
use crate::oracle::{self, SearchBudget};
use crate::transform::{self, Reduction};
use crate::treewidth::{
    compute_tree_decomposition, dp::solve_treewidth_dp_with_budget, dp::DEFAULT_MAX_CELLS, to_nice,
    NiceTreeDecomposition,
};

use super::{
    solve_chromatic, solve_day_independent_d_with_budget, solve_trivial, solve_two_sat, solve_unit_matching,
    Algorithm, Answer, SolverOutcome,
};

#[derive(Clone, Debug, PartialEq)]
pub struct DispatchConfig {
    pub daydue_max_states: usize,
    /// The treewidth DP runs when `(width + 1) * m` is at most this.
    pub treewidth_max_bits: usize,
    pub treewidth_max_cells: usize,
    pub ilp_options: IlpOptions,
    pub ilp_max_nodes: u64,
    pub use_ilp: bool,
    /// The exhaustive search runs when `log2((max sets per day)^m)` is at
    /// most this.
    pub oracle_max_bits: f64,
    pub oracle_budget: SearchBudget,
}

impl Default for DispatchConfig {
    fn default() -> Self {
        DispatchConfig {
            daydue_max_states: super::daydue::DEFAULT_MAX_STATES,
            treewidth_max_bits: 22,
            treewidth_max_cells: DEFAULT_MAX_CELLS,
            ilp_options: IlpOptions::default(),
            ilp_max_nodes: ilp::DEFAULT_MAX_NODES,
            use_ilp: true,
            oracle_max_bits: 22.0,
            oracle_budget: SearchBudget::default(),
        }
    }
}

/// Treewidth DP over `td`, or over a computed decomposition of the overall
/// conflict graph. Per-client requirements are handled directly.
pub fn run_treewidth(
    inst: &Instance,
    td: Option<&NiceTreeDecomposition>,
    config: &DispatchConfig,
) -> Result<SolverOutcome> {
    let owned;
    let ntd = match td {
        Some(t) => t,
        None => {
            let graph = build_overall_graph(inst).graph;
            owned = to_nice(&compute_tree_decomposition(&graph))?;
            &owned
        }
    };
    solve_treewidth_dp_with_budget(inst, ntd, config.treewidth_max_cells)
}

pub fn run_ilp(inst: &Instance, config: &DispatchConfig) -> Result<SolverOutcome> {
    let t0 = Instant::now();
    inst.require_core("ilp")?;
    let model = ilp::build_ilp(inst, &config.ilp_options)?;
    let (solution, nodes) = ilp::solve_ilp_feasibility(&model, config.ilp_max_nodes);
    let out = match solution {
        IlpSolution::Feasible(x) => SolverOutcome::yes(Algorithm::Ilp, ilp::assignment_to_schedule(&model, &x)?),
        IlpSolution::Infeasible => SolverOutcome::no(Algorithm::Ilp),
        IlpSolution::Undecided => SolverOutcome::undecided(Algorithm::Ilp),
    };
    Ok(out
        .stat("types", model.types.len())
        .stat("variables", model.variables.len())
        .stat("nodes", nodes as usize)
        .timed(t0))
}

pub fn dispatch(inst: &Instance) -> Result<SolverOutcome> {
    dispatch_with(inst, &DispatchConfig::default())
}

/// Routes a core instance (total, uniform, one machine) to the cheapest
/// applicable exact algorithm. Fails with a budget error when none fits.
pub fn dispatch_with(inst: &Instance, config: &DispatchConfig) -> Result<SolverOutcome> {
    let k = inst.require_core("dispatch")?;
    let m = inst.m();
    let class = classify(inst);
    if k == 0 || k >= m {
        return solve_trivial(inst);
    }
    if k + 1 == m {
        return solve_two_sat(inst);
    }
    if class.unit_processing {
        return solve_unit_matching(inst);
    }
    if class.day_independent_p && class.day_independent_d {
        return solve_chromatic(inst);
    }
    let mut tried = Vec::new();
    if class.day_independent_d {
        let out = solve_day_independent_d_with_budget(inst, config.daydue_max_states)?;
        if out.answer != Answer::Undecided {
            return Ok(out);
        }
        tried.push(format!("daydue over {} states", config.daydue_max_states));
    } else if let Some(order) = &class.agreeable_order {
        let red = transform::agreeable_to_day_independent(inst, order)?;
        let out = solve_day_independent_d_with_budget(&red.target, config.daydue_max_states)?;
        if out.answer != Answer::Undecided {
            return pull_back(&red, out);
        }
        tried.push(format!("daydue over {} states", config.daydue_max_states));
    }

    let graph = build_overall_graph(inst).graph;
    let td = compute_tree_decomposition(&graph);
    let bits = (td.width() + 1) * m;
    if bits <= config.treewidth_max_bits {
        match run_treewidth(inst, Some(&to_nice(&td)?), config) {
            Ok(out) => return Ok(out),
            Err(Error::Budget(msg)) => tried.push(msg),
            Err(e) => return Err(e),
        }
    } else {
        tried.push(format!("treewidth DP needs {bits} key bits > {}", config.treewidth_max_bits));
    }

    if config.use_ilp {
        match run_ilp(inst, config) {
            Ok(out) if out.answer != Answer::Undecided => return Ok(out),
            Ok(_) => tried.push(format!("ILP search over {} nodes", config.ilp_max_nodes)),
            Err(Error::IlpTooLarge(msg)) => tried.push(msg),
            Err(e) => return Err(e),
        }
    }

    let per_day = oracle::max_day_set_count(inst, config.oracle_budget.max_day_sets).unwrap_or(usize::MAX);
    let space_bits = (per_day.max(1) as f64).log2() * m as f64;
    if space_bits <= config.oracle_max_bits {
        let out = oracle::solve_exhaustive(inst, &config.oracle_budget)?;
        if out.answer != Answer::Undecided {
            return Ok(out);
        }
        tried.push(format!("exhaustive search over {} nodes", config.oracle_budget.max_nodes));
    } else {
        tried.push(format!("exhaustive search space 2^{space_bits:.1} > 2^{}", config.oracle_max_bits));
    }
    Err(Error::Budget(format!(
        "no exact algorithm finished within budget ({}); raise --treewidth-bits, --oracle-bits, --budget-nodes or --budget-daysets",
        tried.join("; ")
    )))
}

fn pull_back(red: &Reduction, mut out: SolverOutcome) -> Result<SolverOutcome> {
    if let Some(w) = &out.witness {
        let back = red.pull_back(w)?;
        let report = verify_schedule(&red.source, &back);
        if !report.ok() {
            return Err(Error::InvalidInstance(format!(
                "{} produced a schedule that does not verify: {}",
                red.kind,
                report.first_violation.unwrap_or_default()
            )));
        }
        out.witness = Some(back);
    }
    out.route.insert(0, red.kind.name().to_string());
    Ok(out)
}

/// Solves any instance: absent jobs, per-client fairness and several
/// machines are first rewritten into core instances, and the witness is
/// mapped back. Falls back to the exhaustive search where no rewrite
/// applies.
pub fn solve_any(inst: &Instance, config: &DispatchConfig) -> Result<SolverOutcome> {
    let t0 = Instant::now();
    let (n, m) = (inst.n(), inst.m());
    if (0..n).any(|j| inst.requirement(j) > m) {
        return Ok(SolverOutcome::no(Algorithm::Trivial).timed(t0));
    }
    let oracle = || -> Result<SolverOutcome> {
        let out = oracle::solve_exhaustive(inst, &config.oracle_budget)?;
        if out.answer == Answer::Undecided {
            return Err(Error::Budget(format!(
                "exhaustive search exceeded {} nodes; raise --budget-nodes",
                config.oracle_budget.max_nodes
            )));
        }
        Ok(out)
    };
    let uniform = inst.uniform_k().is_some();

    if inst.machines() > 1 {
        let class = classify(inst);
        if uniform && inst.is_total() && class.day_independent_p && class.day_independent_d {
            let red = transform::machines_to_days(inst)?;
            return pull_back(&red, solve_any(&red.target, config)?);
        }
        return oracle();
    }
    if !inst.is_total() {
        if uniform {
            let red = transform::totalize(inst)?;
            return pull_back(&red, solve_any(&red.target, config)?);
        }
        return oracle();
    }
    if let Fairness::PerClient(ks) = inst.fairness() {
        if ks.iter().all(|&k| k == ks[0]) && !ks.is_empty() {
            return dispatch_with(&inst.with_k(ks[0]), config);
        }
        let red = transform::per_client_k_to_uniform(inst)?;
        return pull_back(&red, solve_any(&red.target, config)?);
    }
    dispatch_with(inst, config)
}
