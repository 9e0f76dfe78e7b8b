//! Elimination-order heuristics and an exact search for small graphs.

use std::collections::BTreeSet;

use super::TreeDecomposition;
use crate::conflict::UGraph;

/// Largest graph handed to the exact subset DP.
pub const EXACT_MAX_VERTICES: usize = 12;

fn greedy_order(graph: &UGraph, score: impl Fn(&[BTreeSet<usize>], usize) -> usize) -> Vec<usize> {
    let n = graph.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| graph.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = alive
        .iter()
        .copied()
        .min_by_key(|&v| (score(&adj, v), v))
    {
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for (a, &x) in nbrs.iter().enumerate() {
            adj[x].remove(&v);
            for &y in &nbrs[a + 1..] {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        adj[v].clear();
        alive.remove(&v);
        order.push(v);
    }
    order
}

pub fn min_degree_order(graph: &UGraph) -> Vec<usize> {
    greedy_order(graph, |adj, v| adj[v].len())
}

/// Eliminates the vertex whose neighbourhood misses the fewest edges.
pub fn min_fill_order(graph: &UGraph) -> Vec<usize> {
    greedy_order(graph, |adj, v| {
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        let mut missing = 0;
        for (a, &x) in nbrs.iter().enumerate() {
            missing += nbrs[a + 1..].iter().filter(|&&y| !adj[x].contains(&y)).count();
        }
        missing
    })
}

/// Optimal elimination order by the subset recurrence
/// `TW(S) = min over v in S of max(TW(S - v), |Q(S - v, v)|)`, where
/// `Q(S, v)` are the vertices outside `S + v` reachable from `v` through `S`.
pub fn exact_order(graph: &UGraph) -> Vec<usize> {
    let n = graph.n();
    assert!(n <= 20, "exact treewidth search is exponential");
    let masks: Vec<u32> = graph.masks().into_iter().map(|m| m as u32).collect();
    let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let q = |s: u32, v: usize| -> u32 {
        let mut seen = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut out = 0u32;
        while frontier != 0 {
            let x = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let nb = masks[x] & !seen;
            seen |= nb;
            out |= nb & !s;
            frontier |= nb & s;
        }
        out
    };
    let size = 1usize << n;
    let mut tw = vec![usize::MAX; size];
    let mut last = vec![0u8; size];
    tw[0] = 0;
    for s in 1..size as u32 {
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let cost = tw[prev as usize].max(q(prev, v).count_ones() as usize);
            if cost < tw[s as usize] {
                tw[s as usize] = cost;
                last[s as usize] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s as usize] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    order
}

/// Best of the heuristics, refined to an optimal decomposition for graphs
/// with at most [`EXACT_MAX_VERTICES`] vertices.
pub fn compute_tree_decomposition(graph: &UGraph) -> TreeDecomposition {
    let mut best = TreeDecomposition::from_elimination_order(graph, &min_degree_order(graph));
    let fill = TreeDecomposition::from_elimination_order(graph, &min_fill_order(graph));
    if fill.width() < best.width() {
        best = fill;
    }
    if graph.n() <= EXACT_MAX_VERTICES && best.width() > 1 {
        let exact = TreeDecomposition::from_elimination_order(graph, &exact_order(graph));
        if exact.width() < best.width() {
            best = exact;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn clique(n: usize) -> UGraph {
        UGraph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    #[test]
    fn tree_has_width_one() {
        let star = UGraph::from_edges(5, [(0, 1), (0, 2), (0, 3), (3, 4)]);
        let td = compute_tree_decomposition(&star);
        td.validate(&star).unwrap();
        assert_eq!(td.width(), 1);
    }

    #[test]
    fn clique_has_width_n_minus_one() {
        let k5 = clique(5);
        let td = compute_tree_decomposition(&k5);
        td.validate(&k5).unwrap();
        assert_eq!(td.width(), 4);
    }

    #[test]
    fn grid_three_by_three_is_width_three() {
        let id = |r: usize, c: usize| r * 3 + c;
        let mut edges = Vec::new();
        for r in 0..3 {
            for c in 0..3 {
                if c + 1 < 3 {
                    edges.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < 3 {
                    edges.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        let g = UGraph::from_edges(9, edges);
        let td = TreeDecomposition::from_elimination_order(&g, &exact_order(&g));
        td.validate(&g).unwrap();
        assert_eq!(td.width(), 3);
    }

    proptest! {
        #[test]
        fn decompositions_are_valid_and_exact_is_best(
            n in 1usize..10,
            raw in prop::collection::vec((0usize..10, 0usize..10), 0..25),
        ) {
            let g = UGraph::from_edges(n, raw.into_iter().filter(|&(a, b)| a < n && b < n));
            let exact = TreeDecomposition::from_elimination_order(&g, &exact_order(&g));
            exact.validate(&g).unwrap();
            for order in [min_degree_order(&g), min_fill_order(&g)] {
                let td = TreeDecomposition::from_elimination_order(&g, &order);
                td.validate(&g).unwrap();
                prop_assert!(exact.width() <= td.width());
            }
            let best = compute_tree_decomposition(&g);
            best.validate(&g).unwrap();
            prop_assert_eq!(best.width(), exact.width());
        }
    }
}
