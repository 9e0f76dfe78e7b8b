//! Canonical forms of small graphs.
//!
//! Vertices are split by colour refinement into an ordered partition that
//! any isomorphism must respect; the canonical form is the lexicographically
//! smallest adjacency string over all orderings consistent with that
//! partition. When the number of such orderings exceeds the leaf budget the
//! labelled adjacency is returned and marked inexact.

use crate::conflict::UGraph;

pub const DEFAULT_LEAF_BUDGET: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonKey {
    pub n: usize,
    /// Upper-triangle adjacency bits in canonical order, packed row by row.
    pub bits: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub key: CanonKey,
    /// `order[i]` is the vertex placed at canonical position `i`.
    pub order: Vec<usize>,
    /// False when the budget forced the labelled fallback.
    pub exact: bool,
}

fn key_for(graph: &UGraph, order: &[usize]) -> CanonKey {
    let n = order.len();
    let mut bits = vec![0u64; (n * n.saturating_sub(1) / 2).div_ceil(64)];
    let mut idx = 0;
    for a in 0..n {
        for b in a + 1..n {
            if graph.has_edge(order[a], order[b]) {
                bits[idx / 64] |= 1 << (idx % 64);
            }
            idx += 1;
        }
    }
    CanonKey { n, bits }
}

/// Ordered cells of the stable colouring.
fn refine(graph: &UGraph) -> Vec<Vec<usize>> {
    let n = graph.n();
    let mut color = vec![0usize; n];
    loop {
        let mut sig: Vec<(usize, Vec<usize>, usize)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = graph.neighbors(v).iter().map(|&u| color[u]).collect();
                nb.sort_unstable();
                (color[v], nb, v)
            })
            .collect();
        sig.sort();
        let mut next = vec![0usize; n];
        let mut classes = 0;
        for i in 0..n {
            if i > 0 && (sig[i].0, &sig[i].1) != (sig[i - 1].0, &sig[i - 1].1) {
                classes += 1;
            }
            next[sig[i].2] = classes;
        }
        let before = color.iter().copied().max().map_or(0, |c| c + 1);
        let after = if n == 0 { 0 } else { classes + 1 };
        color = next;
        if after == before {
            break;
        }
    }
    let cells = color.iter().copied().max().map_or(0, |c| c + 1);
    let mut out = vec![Vec::new(); cells];
    for (v, &c) in color.iter().enumerate() {
        out[c].push(v);
    }
    out
}

fn permutations_in_cells(cells: &[Vec<usize>]) -> u64 {
    cells.iter().fold(1u64, |acc, cell| {
        (1..=cell.len() as u64).fold(acc, |a, x| a.saturating_mul(x))
    })
}

pub fn canonical_form(graph: &UGraph, leaf_budget: u64) -> CanonicalForm {
    let cells = refine(graph);
    if permutations_in_cells(&cells) > leaf_budget {
        let order: Vec<usize> = (0..graph.n()).collect();
        return CanonicalForm {
            key: key_for(graph, &order),
            order,
            exact: false,
        };
    }
    let mut best: Option<(CanonKey, Vec<usize>)> = None;
    let mut order = Vec::with_capacity(graph.n());
    let mut cells = cells;
    search(graph, &mut cells, 0, &mut order, &mut best);
    let (key, order) = best.expect("at least one ordering");
    CanonicalForm {
        key,
        order,
        exact: true,
    }
}

fn search(
    graph: &UGraph,
    cells: &mut [Vec<usize>],
    cell: usize,
    order: &mut Vec<usize>,
    best: &mut Option<(CanonKey, Vec<usize>)>,
) {
    if cell == cells.len() {
        let key = key_for(graph, order);
        if best.as_ref().is_none_or(|(b, _)| key < *b) {
            *best = Some((key, order.clone()));
        }
        return;
    }
    if cells[cell].is_empty() {
        search(graph, cells, cell + 1, order, best);
        return;
    }
    for i in 0..cells[cell].len() {
        let v = cells[cell].remove(i);
        order.push(v);
        search(graph, cells, cell, order, best);
        order.pop();
        cells[cell].insert(i, v);
    }
}

pub fn canonical_type(graph: &UGraph) -> CanonicalForm {
    canonical_form(graph, DEFAULT_LEAF_BUDGET)
}
