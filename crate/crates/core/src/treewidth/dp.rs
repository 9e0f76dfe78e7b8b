//! Table DP over a nice tree decomposition of the overall conflict graph.
//!
//! A partial schedule on bag `X` is encoded as a `u64` with `m` blocks of
//! `|X|` bits, day-major, bit `day * |X| + i` meaning the `i`-th client of the
//! bag is served that day. A table stores only its true cells, sorted by key,
//! each with a pointer to the child cell(s) it was derived from.

use std::time::Instant;

use crate::conflict::build_overall_graph;
use crate::error::{Error, Result};
use crate::instance::{ClientId, Instance, Schedule};
use crate::specialcase::{Algorithm, SolverOutcome};

use super::nice::{NiceKind, NiceTreeDecomposition};

pub const DEFAULT_MAX_CELLS: usize = 1 << 26;

/// Restriction of a schedule to a bag: `days[i]` are the bag clients served
/// on day `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialSchedule {
    pub days: Vec<Vec<ClientId>>,
}

pub fn decode(bag: &[ClientId], m: usize, key: u64) -> PartialSchedule {
    let s = bag.len();
    PartialSchedule {
        days: (0..m)
            .map(|day| {
                (0..s)
                    .filter(|&i| key >> (day * s + i) & 1 == 1)
                    .map(|i| bag[i])
                    .collect()
            })
            .collect(),
    }
}

pub fn encode(bag: &[ClientId], sigma: &PartialSchedule) -> u64 {
    let s = bag.len();
    let mut key = 0;
    for (day, set) in sigma.days.iter().enumerate() {
        for c in set {
            let i = bag.binary_search(c).expect("client outside bag");
            key |= 1 << (day * s + i);
        }
    }
    key
}

fn check_width(bag_len: usize, m: usize) -> Result<()> {
    if bag_len * m > 64 {
        return Err(Error::Budget(format!(
            "bag of {bag_len} clients over {m} days does not fit a 64-bit table key"
        )));
    }
    Ok(())
}

/// Cells of an introduce node, as `(key, child cell)` pairs sorted by key.
fn introduce(
    inst: &Instance,
    child_bag: &[ClientId],
    child_keys: &[u64],
    v: ClientId,
) -> Vec<(u64, u32)> {
    let m = inst.m();
    let s0 = child_bag.len();
    let s = s0 + 1;
    let pos = child_bag.binary_search(&v).unwrap_err();
    let conflicts: Vec<u64> = (0..m)
        .map(|day| {
            let jv = inst.job(day, v).expect("total");
            child_bag.iter().enumerate().fold(0u64, |acc, (i, &c)| {
                let jc = inst.job(day, c).expect("total");
                if jv.conflicts_with(jc) {
                    acc | 1 << i
                } else {
                    acc
                }
            })
        })
        .collect();
    let need = inst.requirement(v);
    let day_masks: Vec<u32> = (0u32..1 << m)
        .filter(|d| d.count_ones() as usize >= need)
        .collect();
    let low = (1u64 << pos) - 1;
    let block = if s0 == 64 { u64::MAX } else { (1u64 << s0) - 1 };

    let mut out = Vec::new();
    for (idx, &key) in child_keys.iter().enumerate() {
        let blocks: Vec<u64> = (0..m).map(|day| key >> (day * s0) & block).collect();
        for &dmask in &day_masks {
            let clash = (0..m).any(|day| dmask >> day & 1 == 1 && blocks[day] & conflicts[day] != 0);
            if clash {
                continue;
            }
            let mut new_key = 0u64;
            for (day, &b) in blocks.iter().enumerate() {
                let bit = (dmask >> day & 1) as u64;
                let widened = (b & low) | bit << pos | (b & !low) << 1;
                new_key |= widened << (day * s);
            }
            out.push((new_key, idx as u32));
        }
    }
    out.sort_unstable();
    out
}

fn forget(child_bag: &[ClientId], child_keys: &[u64], v: ClientId, m: usize) -> Vec<(u64, u32)> {
    let s0 = child_bag.len();
    let s = s0 - 1;
    let pos = child_bag.binary_search(&v).expect("forgotten client in child bag");
    let low = (1u64 << pos) - 1;
    let block = if s0 == 64 { u64::MAX } else { (1u64 << s0) - 1 };
    let mut out: Vec<(u64, u32)> = child_keys
        .iter()
        .enumerate()
        .map(|(idx, &key)| {
            let mut new_key = 0u64;
            for day in 0..m {
                let b = key >> (day * s0) & block;
                let narrowed = (b & low) | (b >> 1 & !low);
                new_key |= narrowed << (day * s);
            }
            (new_key, idx as u32)
        })
        .collect();
    out.sort_unstable();
    out.dedup_by_key(|cell| cell.0);
    out
}

/// Σ(X): every assignment of bag clients to days that is conflict-free
/// within the bag and meets each member's requirement.
pub fn sigma_keys(inst: &Instance, bag: &[ClientId]) -> Result<Vec<u64>> {
    check_width(bag.len(), inst.m())?;
    let mut sorted = bag.to_vec();
    sorted.sort_unstable();
    let mut have: Vec<ClientId> = Vec::new();
    let mut keys = vec![0u64];
    for &v in &sorted {
        keys = introduce(inst, &have, &keys, v).into_iter().map(|c| c.0).collect();
        let pos = have.binary_search(&v).unwrap_err();
        have.insert(pos, v);
    }
    Ok(keys)
}

pub fn enumerate_sigma(inst: &Instance, bag: &[ClientId]) -> Result<Vec<PartialSchedule>> {
    let mut sorted = bag.to_vec();
    sorted.sort_unstable();
    Ok(sigma_keys(inst, &sorted)?
        .into_iter()
        .map(|k| decode(&sorted, inst.m(), k))
        .collect())
}

/// True cells of every node with their back pointers.
#[derive(Clone, Debug)]
pub struct DpTables {
    /// Sorted keys of the true cells of each node.
    pub keys: Vec<Vec<u64>>,
    back: Vec<Vec<(u32, u32)>>,
}

impl DpTables {
    pub fn cells(&self) -> usize {
        self.keys.iter().map(Vec::len).sum()
    }
}

fn check_inputs(inst: &Instance, ntd: &NiceTreeDecomposition) -> Result<()> {
    if !inst.is_total() {
        return Err(Error::precondition(
            "treewidth",
            "instance has absent jobs; apply transform::totalize first",
        ));
    }
    if inst.machines() != 1 {
        return Err(Error::precondition("treewidth", "requires a single machine (M=1)"));
    }
    if ntd.n != inst.n() {
        return Err(Error::InvalidDecomposition(format!(
            "decomposition has {} vertices, instance has {} clients",
            ntd.n,
            inst.n()
        )));
    }
    ntd.check()?;
    ntd.to_plain().validate(&build_overall_graph(inst).graph)
}

pub fn run_tables(inst: &Instance, ntd: &NiceTreeDecomposition, max_cells: usize) -> Result<DpTables> {
    check_inputs(inst, ntd)?;
    let m = inst.m();
    check_width(ntd.width() + 1, m)?;
    let mut keys: Vec<Vec<u64>> = Vec::with_capacity(ntd.nodes.len());
    let mut back: Vec<Vec<(u32, u32)>> = Vec::with_capacity(ntd.nodes.len());
    let mut total = 0usize;
    for node in &ntd.nodes {
        let (k, b): (Vec<u64>, Vec<(u32, u32)>) = match node.kind {
            NiceKind::Leaf => (vec![0], vec![(0, 0)]),
            NiceKind::Introduce(v) => {
                let c = node.children[0];
                introduce(inst, &ntd.nodes[c].bag, &keys[c], v)
                    .into_iter()
                    .map(|(key, i)| (key, (i, 0)))
                    .unzip()
            }
            NiceKind::Forget(v) => {
                let c = node.children[0];
                forget(&ntd.nodes[c].bag, &keys[c], v, m)
                    .into_iter()
                    .map(|(key, i)| (key, (i, 0)))
                    .unzip()
            }
            NiceKind::Join => {
                let (l, r) = (node.children[0], node.children[1]);
                let (lk, rk) = (&keys[l], &keys[r]);
                let (mut i, mut j) = (0, 0);
                let mut out = (Vec::new(), Vec::new());
                while i < lk.len() && j < rk.len() {
                    match lk[i].cmp(&rk[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            out.0.push(lk[i]);
                            out.1.push((i as u32, j as u32));
                            i += 1;
                            j += 1;
                        }
                    }
                }
                out
            }
        };
        total += k.len();
        if total > max_cells {
            return Err(Error::Budget(format!(
                "treewidth tables exceed {max_cells} cells"
            )));
        }
        keys.push(k);
        back.push(b);
    }
    Ok(DpTables { keys, back })
}

fn reconstruct(inst: &Instance, ntd: &NiceTreeDecomposition, tables: &DpTables) -> Schedule {
    let m = inst.m();
    let mut days = vec![Vec::new(); m];
    let mut stack = vec![(ntd.root(), 0usize)];
    while let Some((node, cell)) = stack.pop() {
        let nn = &ntd.nodes[node];
        let sigma = decode(&nn.bag, m, tables.keys[node][cell]);
        for (day, set) in sigma.days.into_iter().enumerate() {
            days[day].extend(set);
        }
        let (a, b) = tables.back[node][cell];
        match nn.kind {
            NiceKind::Leaf => {}
            NiceKind::Introduce(_) | NiceKind::Forget(_) => stack.push((nn.children[0], a as usize)),
            NiceKind::Join => {
                stack.push((nn.children[0], a as usize));
                stack.push((nn.children[1], b as usize));
            }
        }
    }
    Schedule::new(days)
}

pub fn solve_treewidth_dp(inst: &Instance, ntd: &NiceTreeDecomposition) -> Result<SolverOutcome> {
    solve_treewidth_dp_with_budget(inst, ntd, DEFAULT_MAX_CELLS)
}

pub fn solve_treewidth_dp_with_budget(
    inst: &Instance,
    ntd: &NiceTreeDecomposition,
    max_cells: usize,
) -> Result<SolverOutcome> {
    let t0 = Instant::now();
    let tables = run_tables(inst, ntd, max_cells)?;
    let root = ntd.root();
    let out = if tables.keys[root].is_empty() {
        SolverOutcome::no(Algorithm::Treewidth)
    } else {
        SolverOutcome::yes(Algorithm::Treewidth, reconstruct(inst, ntd, &tables))
    };
    Ok(out
        .stat("width", ntd.width())
        .stat("nodes", ntd.nodes.len())
        .stat("cells", tables.cells())
        .timed(t0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{verify_schedule, Fairness, Job};
    use crate::oracle::{solve_exhaustive, SearchBudget};
    use crate::treewidth::{compute_tree_decomposition, heuristics, to_nice, TreeDecomposition};
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

    fn nice_for(inst: &Instance) -> NiceTreeDecomposition {
        to_nice(&compute_tree_decomposition(&build_overall_graph(inst).graph)).unwrap()
    }

    #[test]
    fn sigma_examples() {
        let one = uniform(vec![vec![(1, 1)]; 2], 1);
        assert_eq!(sigma_keys(&one, &[0]).unwrap().len(), 3);
        let pair = uniform(vec![vec![(2, 2), (2, 2)]; 2], 1);
        let got = enumerate_sigma(&pair, &[0, 1]).unwrap();
        assert_eq!(
            got,
            vec![
                PartialSchedule { days: vec![vec![1], vec![0]] },
                PartialSchedule { days: vec![vec![0], vec![1]] },
            ]
        );
        assert_eq!(sigma_keys(&pair, &[]).unwrap(), vec![0]);
    }

    #[test]
    fn encode_inverts_decode() {
        let bag = [2, 5, 7];
        for key in 0u64..64 {
            assert_eq!(encode(&bag, &decode(&bag, 2, key)), key);
        }
    }

    #[test]
    fn edgeless_is_yes() {
        let i = uniform(vec![vec![(1, 1), (1, 2), (1, 3)]; 3], 3);
        let out = solve_treewidth_dp(&i, &nice_for(&i)).unwrap();
        assert!(verify_schedule(&i, out.witness.as_ref().unwrap()).ok());
    }

    #[test]
    fn rejects_uncovering_decomposition() {
        let i = uniform(vec![vec![(2, 2), (2, 2)]], 1);
        let td = TreeDecomposition::new(2, vec![vec![0], vec![1]], vec![(0, 1)]);
        let err = solve_treewidth_dp(&i, &to_nice(&td).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InvalidDecomposition(_)));
    }

    #[test]
    fn per_client_requirements() {
        let i = uniform(vec![vec![(2, 2), (2, 2)]; 3], 0)
            .with_fairness(Fairness::PerClient(vec![2, 1]))
            .unwrap();
        let out = solve_treewidth_dp(&i, &nice_for(&i)).unwrap();
        assert!(verify_schedule(&i, out.witness.as_ref().unwrap()).ok());
        let too_much = i.with_fairness(Fairness::PerClient(vec![2, 2])).unwrap();
        assert!(!solve_treewidth_dp(&too_much, &nice_for(&too_much)).unwrap().is_yes());
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        (1usize..=5, 1usize..=3).prop_flat_map(|(n, m)| {
            (
                prop::collection::vec(prop::collection::vec((1u64..=4, 0u64..=4), n), m),
                0..=m,
            )
                .prop_map(|(rows, k)| {
                    uniform(
                        rows.into_iter()
                            .map(|r| r.into_iter().map(|(p, e)| (p, p + e)).collect())
                            .collect(),
                        k,
                    )
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn agrees_with_oracle_for_any_decomposition(inst in arb_instance()) {
            let g = build_overall_graph(&inst).graph;
            let oracle = solve_exhaustive(&inst, &SearchBudget::default()).unwrap();
            let tds = [
                TreeDecomposition::from_elimination_order(&g, &heuristics::min_degree_order(&g)),
                TreeDecomposition::trivial(inst.n()),
            ];
            for td in tds {
                let out = solve_treewidth_dp(&inst, &to_nice(&td).unwrap()).unwrap();
                prop_assert_eq!(out.answer, oracle.answer);
                if let Some(w) = &out.witness {
                    prop_assert!(verify_schedule(&inst, w).ok());
                }
            }
        }

        #[test]
        fn sigma_matches_definition(inst in arb_instance()) {
            let bag: Vec<usize> = (0..inst.n().min(3)).collect();
            let got: std::collections::BTreeSet<u64> = sigma_keys(&inst, &bag).unwrap().into_iter().collect();
            let bits = bag.len() * inst.m();
            let want: std::collections::BTreeSet<u64> = (0u64..1 << bits)
                .filter(|&key| {
                    let ps = decode(&bag, inst.m(), key);
                    let mut days = ps.days.clone();
                    days.resize(inst.m(), Vec::new());
                    let counts: Vec<usize> = bag.iter()
                        .map(|c| days.iter().filter(|d| d.contains(c)).count())
                        .collect();
                    let conflict_free = days.iter().enumerate().all(|(day, set)| {
                        set.iter().enumerate().all(|(a, &x)| set[a + 1..].iter().all(|&y| {
                            !inst.job(day, x).unwrap().conflicts_with(inst.job(day, y).unwrap())
                        }))
                    });
                    conflict_free && counts.iter().zip(&bag).all(|(&c, &v)| c >= inst.requirement(v))
                })
                .collect();
            prop_assert_eq!(got.len(), sigma_keys(&inst, &bag).unwrap().len());
            prop_assert_eq!(got, want);
        }
    }
}
