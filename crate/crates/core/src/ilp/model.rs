use std::collections::BTreeMap;

use crate::conflict::{conflict_pairs, DayIntervals};
use crate::error::{Error, Result};
use crate::instance::{ClientId, DayId, Instance, Schedule};

pub const DEFAULT_MAX_SETS_PER_TYPE: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IlpOptions {
    /// Share variables between days with the same labelled conflict graph;
    /// otherwise every day is its own type.
    pub group_types: bool,
    pub max_sets_per_type: usize,
}

impl Default for IlpOptions {
    fn default() -> Self {
        IlpOptions {
            group_types: true,
            max_sets_per_type: DEFAULT_MAX_SETS_PER_TYPE,
        }
    }
}

/// Days whose conflict graphs coincide, clients included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphType {
    pub edges: Vec<(ClientId, ClientId)>,
    pub days: Vec<DayId>,
    pub representative_day: DayId,
}

impl GraphType {
    pub fn multiplicity(&self) -> usize {
        self.days.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub ty: usize,
    /// Independent set of the type's graph, sorted.
    pub set: Vec<ClientId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub vars: Vec<usize>,
    pub rhs: u64,
}

/// Feasibility ILP: `x >= 0` for every variable, one equality row per type
/// (its variables sum to the type's multiplicity) and one covering row per
/// client (variables whose set contains the client sum to at least its
/// requirement).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpModel {
    pub n: usize,
    pub m: usize,
    pub types: Vec<GraphType>,
    /// Grouped by type; within a type in the fixed order used for decoding.
    pub variables: Vec<Variable>,
    pub equalities: Vec<Row>,
    pub coverage: Vec<Row>,
    /// `day_type[d]` is the type of day `d`.
    pub day_type: Vec<usize>,
}

impl IlpModel {
    pub fn vars_of_type(&self, ty: usize) -> &[usize] {
        &self.equalities[ty].vars
    }

    /// First violated row, if any.
    pub fn violated_row(&self, assignment: &[u64]) -> Option<&Row> {
        if assignment.len() != self.variables.len() {
            return self.equalities.first().or(self.coverage.first());
        }
        let lhs = |row: &Row| row.vars.iter().map(|&v| assignment[v]).sum::<u64>();
        self.equalities
            .iter()
            .find(|r| lhs(r) != r.rhs)
            .or_else(|| self.coverage.iter().find(|r| lhs(r) < r.rhs))
    }
}

/// Independent sets of the interval graph formed by `items`, empty set
/// first, then in lexicographic order of sorted client lists.
fn independent_sets(items: &DayIntervals, cap: usize) -> Option<Vec<Vec<ClientId>>> {
    let mut order = items.items.clone();
    order.sort_by_key(|iv| iv.client);
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        order: &[crate::conflict::Interval],
        from: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<ClientId>>,
        cap: usize,
    ) -> bool {
        out.push(chosen.iter().map(|&i| order[i].client).collect());
        if out.len() > cap {
            return false;
        }
        for i in from..order.len() {
            if chosen.iter().all(|&c| !order[c].overlaps(&order[i])) {
                chosen.push(i);
                let ok = rec(order, i + 1, chosen, out, cap);
                chosen.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    rec(&order, 0, &mut chosen, &mut out, cap).then_some(out)
}

pub fn build_ilp(inst: &Instance, options: &IlpOptions) -> Result<IlpModel> {
    if !inst.is_total() {
        return Err(Error::precondition(
            "ilp",
            "instance has absent jobs; apply transform::totalize first",
        ));
    }
    if inst.machines() != 1 {
        return Err(Error::precondition("ilp", "requires a single machine (M=1)"));
    }
    let (n, m) = (inst.n(), inst.m());

    let mut types: Vec<GraphType> = Vec::new();
    let mut by_edges: BTreeMap<Vec<(ClientId, ClientId)>, usize> = BTreeMap::new();
    let mut day_type = Vec::with_capacity(m);
    for day in 0..m {
        let mut edges = conflict_pairs(&DayIntervals::of(inst, day).items);
        edges.sort_unstable();
        let existing = if options.group_types {
            by_edges.get(&edges).copied()
        } else {
            None
        };
        let ty = match existing {
            Some(t) => t,
            None => {
                types.push(GraphType {
                    edges: edges.clone(),
                    days: Vec::new(),
                    representative_day: day,
                });
                by_edges.insert(edges, types.len() - 1);
                types.len() - 1
            }
        };
        types[ty].days.push(day);
        day_type.push(ty);
    }

    let mut variables = Vec::new();
    let mut equalities = Vec::with_capacity(types.len());
    for (t, ty) in types.iter().enumerate() {
        let sets = independent_sets(&DayIntervals::of(inst, ty.representative_day), options.max_sets_per_type)
            .ok_or_else(|| {
                Error::IlpTooLarge(format!(
                    "type {} (day {}) has more than {} independent sets over {n} clients",
                    t + 1,
                    ty.representative_day + 1,
                    options.max_sets_per_type
                ))
            })?;
        let first = variables.len();
        variables.extend(sets.into_iter().map(|set| Variable { ty: t, set }));
        equalities.push(Row {
            name: format!("type_{}", t + 1),
            vars: (first..variables.len()).collect(),
            rhs: ty.multiplicity() as u64,
        });
    }

    let mut covering: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, var) in variables.iter().enumerate() {
        for &c in &var.set {
            covering[c].push(i);
        }
    }
    let coverage = covering
        .into_iter()
        .enumerate()
        .map(|(c, vars)| Row {
            name: format!("client_{}", c + 1),
            vars,
            rhs: inst.requirement(c) as u64,
        })
        .collect();

    Ok(IlpModel {
        n,
        m,
        types,
        variables,
        equalities,
        coverage,
        day_type,
    })
}

/// Decodes a satisfying assignment: each day takes the first set of its
/// type with a positive remaining count.
pub fn assignment_to_schedule(model: &IlpModel, assignment: &[u64]) -> Result<Schedule> {
    if let Some(row) = model.violated_row(assignment) {
        return Err(Error::IlpViolation(format!("row {}", row.name)));
    }
    let mut left = assignment.to_vec();
    let mut days = vec![Vec::new(); model.m];
    for (day, &ty) in model.day_type.iter().enumerate() {
        let var = model
            .vars_of_type(ty)
            .iter()
            .copied()
            .find(|&v| left[v] > 0)
            .expect("equality rows guarantee a positive count");
        left[var] -= 1;
        days[day] = model.variables[var].set.clone();
    }
    Ok(Schedule::new(days))
}

/// Counts how often each (type, set) pair occurs in a feasible schedule.
pub fn schedule_to_assignment(model: &IlpModel, sched: &Schedule) -> Result<Vec<u64>> {
    let mut x = vec![0u64; model.variables.len()];
    for (day, set) in sched.days.iter().enumerate() {
        let ty = *model
            .day_type
            .get(day)
            .ok_or_else(|| Error::IlpViolation(format!("schedule day {} beyond m", day + 1)))?;
        let var = model
            .vars_of_type(ty)
            .iter()
            .copied()
            .find(|&v| &model.variables[v].set == set)
            .ok_or_else(|| {
                Error::IlpViolation(format!("day {} serves a set that is not independent", day + 1))
            })?;
        x[var] += 1;
    }
    Ok(x)
}
