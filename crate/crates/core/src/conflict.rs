//! Daily and overall conflict graphs, plus the interval-graph primitives
//! (maximum independent set, minimum coloring, clique number) that work
//! directly on the interval representation.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;

use crate::instance::{ClientId, DayId, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub client: ClientId,
    pub start: u64,
    pub end: u64,
}

impl Interval {
    #[inline]
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.start.max(other.start) < self.end.min(other.end)
    }
}

/// The jobs of one day as intervals, over a universe of `n` clients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DayIntervals {
    pub day: DayId,
    pub n: usize,
    /// One entry per client with a job that day, in client order.
    pub items: Vec<Interval>,
}

impl DayIntervals {
    pub fn of(inst: &Instance, day: DayId) -> Self {
        let items = inst
            .day(day)
            .iter()
            .enumerate()
            .filter_map(|(client, job)| {
                job.map(|j| Interval {
                    client,
                    start: j.start(),
                    end: j.end(),
                })
            })
            .collect();
        DayIntervals {
            day,
            n: inst.n(),
            items,
        }
    }

    pub fn from_items(day: DayId, n: usize, mut items: Vec<Interval>) -> Self {
        items.sort_by_key(|iv| iv.client);
        DayIntervals { day, n, items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Simple undirected graph with sorted neighbour lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UGraph {
    adj: Vec<Vec<usize>>,
}

impl UGraph {
    pub fn new(n: usize) -> Self {
        UGraph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = UGraph::new(n);
        for (u, v) in edges {
            if u != v {
                g.adj[u].push(v);
                g.adj[v].push(u);
            }
        }
        g.normalize();
        g
    }

    fn normalize(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
            list.dedup();
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    /// Adjacency bitmasks; only meaningful for `n <= 64`.
    pub fn masks(&self) -> Vec<u64> {
        debug_assert!(self.n() <= 64);
        self.adj
            .iter()
            .map(|list| list.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DayConflictGraph {
    pub intervals: DayIntervals,
    /// Indexed by client; clients without a job that day have no neighbours.
    pub graph: UGraph,
}

impl DayConflictGraph {
    pub fn day(&self) -> DayId {
        self.intervals.day
    }

    pub fn has_job(&self, client: ClientId) -> bool {
        self.intervals
            .items
            .binary_search_by_key(&client, |iv| iv.client)
            .is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverallConflictGraph {
    pub graph: UGraph,
    /// Days on which each edge `(u, v)`, `u < v`, is a conflict.
    pub witness_days: BTreeMap<(ClientId, ClientId), Vec<DayId>>,
}

/// Conflicting pairs `(u, v)`, `u < v`, found by a start-sorted sweep in
/// `O(n log n + |E|)`.
pub fn conflict_pairs(intervals: &[Interval]) -> Vec<(ClientId, ClientId)> {
    let mut order: Vec<&Interval> = intervals.iter().collect();
    order.sort_by_key(|iv| (iv.start, iv.end, iv.client));
    let mut out = Vec::new();
    for (i, a) in order.iter().enumerate() {
        for b in &order[i + 1..] {
            if b.start >= a.end {
                break;
            }
            out.push((a.client.min(b.client), a.client.max(b.client)));
        }
    }
    out
}

pub fn build_day_graph(inst: &Instance, day: DayId) -> DayConflictGraph {
    let intervals = DayIntervals::of(inst, day);
    let graph = UGraph::from_edges(inst.n(), conflict_pairs(&intervals.items));
    DayConflictGraph { intervals, graph }
}

pub fn build_overall_graph(inst: &Instance) -> OverallConflictGraph {
    let mut witness_days: BTreeMap<(ClientId, ClientId), Vec<DayId>> = BTreeMap::new();
    for day in 0..inst.m() {
        let items = DayIntervals::of(inst, day).items;
        for pair in conflict_pairs(&items) {
            witness_days.entry(pair).or_default().push(day);
        }
    }
    let graph = UGraph::from_edges(inst.n(), witness_days.keys().copied());
    OverallConflictGraph {
        graph,
        witness_days,
    }
}

/// Maximum independent set by earliest end time; returned sorted by client.
pub fn interval_mis(day: &DayIntervals) -> Vec<ClientId> {
    let mut order: Vec<&Interval> = day.items.iter().collect();
    order.sort_by_key(|iv| (iv.end, iv.start, iv.client));
    let mut out = Vec::new();
    let mut frontier = 0u64;
    for iv in order {
        if iv.start >= frontier {
            out.push(iv.client);
            frontier = iv.end;
        }
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub chi: usize,
    /// `color[client]`; `None` for clients without a job that day.
    pub color: Vec<Option<usize>>,
}

impl Coloring {
    pub fn classes(&self) -> Vec<Vec<ClientId>> {
        let mut classes = vec![Vec::new(); self.chi];
        for (client, c) in self.color.iter().enumerate() {
            if let Some(c) = c {
                classes[*c].push(client);
            }
        }
        classes
    }
}

/// Optimal coloring by left endpoint, reusing the smallest freed colour.
pub fn interval_coloring(day: &DayIntervals) -> Coloring {
    let mut order: Vec<&Interval> = day.items.iter().collect();
    order.sort_by_key(|iv| (iv.start, iv.end, iv.client));
    let mut color = vec![None; day.n];
    let mut busy: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    let mut free: BinaryHeap<Reverse<usize>> = BinaryHeap::new();
    let mut chi = 0;
    for iv in order {
        while let Some(&Reverse((end, c))) = busy.peek() {
            if end > iv.start {
                break;
            }
            busy.pop();
            free.push(Reverse(c));
        }
        let c = match free.pop() {
            Some(Reverse(c)) => c,
            None => {
                chi += 1;
                chi - 1
            }
        };
        color[iv.client] = Some(c);
        busy.push(Reverse((iv.end, c)));
    }
    Coloring { chi, color }
}

/// Largest number of pairwise overlapping intervals (ends before starts at
/// equal coordinates).
pub fn max_depth(intervals: &[Interval]) -> usize {
    let mut events: Vec<(u64, bool)> = Vec::with_capacity(2 * intervals.len());
    for iv in intervals {
        events.push((iv.start, true));
        events.push((iv.end, false));
    }
    // false < true, so ends sort before starts at the same coordinate.
    events.sort_unstable();
    let mut depth = 0usize;
    let mut best = 0;
    for (_, is_start) in events {
        if is_start {
            depth += 1;
            best = best.max(depth);
        } else {
            depth -= 1;
        }
    }
    best
}

pub fn clique_number(day: &DayIntervals) -> usize {
    max_depth(&day.items)
}

/// Finds a point where more than `cap` of the `(start, end, client)`
/// intervals overlap. Returns an active client and the client whose start
/// exceeded the cap.
pub fn depth_witness(intervals: &[(u64, u64, ClientId)], cap: usize) -> Option<(ClientId, ClientId)> {
    let mut events: Vec<(u64, bool, ClientId)> = Vec::with_capacity(2 * intervals.len());
    for &(s, e, c) in intervals {
        events.push((s, true, c));
        events.push((e, false, c));
    }
    events.sort_unstable();
    let mut active: std::collections::BTreeSet<ClientId> = Default::default();
    for (_, is_start, c) in events {
        if is_start {
            if active.len() >= cap {
                let other = *active.iter().next().expect("cap >= 1");
                return Some((other, c));
            }
            active.insert(c);
        } else {
            active.remove(&c);
        }
    }
    None
}

pub fn is_conflict_free(intervals: &[Interval], machines: usize) -> bool {
    max_depth(intervals) <= machines
}

/// Graphviz rendering with 1-based vertex labels.
pub fn to_dot(graph: &UGraph, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph {name} {{");
    for v in 0..graph.n() {
        let _ = writeln!(out, "  {};", v + 1);
    }
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "  {} -- {};", u + 1, v + 1);
    }
    out.push_str("}\n");
    out
}
