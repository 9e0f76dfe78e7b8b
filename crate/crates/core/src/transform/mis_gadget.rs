//! Per-client fairness instance whose overall conflict graph has treewidth
//! at most 4 and which is fair exactly when a coloured regular graph has an
//! independent set with one vertex of every colour.
//!
//! A dummy client must run on every day. Its job covers one private unit
//! slot per other client, so each client's job on a day where it plays no
//! part sits in that slot and is blocked. Slots are private so blocked jobs
//! never conflict with each other and the dummy is the only hub.
//!
//! Colour `i` gets one vertex day per vertex and one validation day: the
//! selection client `c_i` takes some vertex day, which pushes that vertex's
//! client onto the validation day, where it blocks the vertex's outgoing
//! edge clients. Every edge day runs one of its two edge clients, so the two
//! endpoints of an edge cannot both be selected.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Fairness, Instance, Job, Schedule};
use crate::treewidth::TreeDecomposition;

/// Vertex colours (0-based) and an edge multiset over vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    pub colors: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl ColoredGraph {
    pub fn vertices(&self) -> usize {
        self.colors.len()
    }

    pub fn num_colors(&self) -> usize {
        self.colors.iter().max().map_or(0, |c| c + 1)
    }

    /// Every edge twice: degrees double and the edge count becomes even.
    pub fn doubled(&self) -> ColoredGraph {
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for &e in &self.edges {
            edges.extend([e, e]);
        }
        ColoredGraph {
            colors: self.colors.clone(),
            edges,
        }
    }

    /// Doubles the edges if their number is odd.
    pub fn with_even_edges(&self) -> ColoredGraph {
        if self.edges.len() % 2 == 1 {
            self.doubled()
        } else {
            self.clone()
        }
    }

    /// Brute-force check for an independent set with one vertex per colour.
    pub fn has_multicolored_independent_set(&self) -> bool {
        let classes = self.classes();
        let adjacent = |a: usize, b: usize| self.edges.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a));
        let mut pick = Vec::new();
        fn rec(classes: &[Vec<usize>], pick: &mut Vec<usize>, adjacent: &dyn Fn(usize, usize) -> bool) -> bool {
            let Some(class) = classes.get(pick.len()) else {
                return true;
            };
            for &v in class {
                if pick.iter().all(|&u| !adjacent(u, v)) {
                    pick.push(v);
                    if rec(classes, pick, adjacent) {
                        return true;
                    }
                    pick.pop();
                }
            }
            false
        }
        rec(&classes, &mut pick, &adjacent)
    }

    fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.num_colors()];
        for (v, &c) in self.colors.iter().enumerate() {
            classes[c].push(v);
        }
        classes
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, c) in self.colors.iter().enumerate() {
            out.push_str(&format!("v {} {}\n", v + 1, c + 1));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("e {} {}\n", a + 1, b + 1));
        }
        out
    }
}

/// Reads `v <vertex> <color>` and `e <u> <v>` lines, 1-based; `c` starts a
/// comment line.
pub fn parse_colored_graph(text: &str) -> Result<ColoredGraph> {
    let mut colors: BTreeMap<usize, usize> = BTreeMap::new();
    let mut edges = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let nums: Option<Vec<usize>> = parts[1..].iter().map(|t| t.parse().ok()).collect();
        let bad = || Error::Parse(format!("line {}: expected `v <vertex> <color>` or `e <u> <v>`", no + 1));
        match (parts[0], nums.as_deref()) {
            ("v", Some(&[v, c])) if v >= 1 && c >= 1 => {
                if colors.insert(v - 1, c - 1).is_some() {
                    return Err(Error::Parse(format!("line {}: vertex {v} declared twice", no + 1)));
                }
            }
            ("e", Some(&[a, b])) if a >= 1 && b >= 1 => edges.push((a - 1, b - 1)),
            _ => return Err(bad()),
        }
    }
    let n = colors.len();
    if colors.keys().copied().ne(0..n) {
        return Err(Error::Parse(format!("vertices must be numbered 1..{n} without gaps")));
    }
    if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= n || b >= n) {
        return Err(Error::Parse(format!("edge {}-{} uses an undeclared vertex", a + 1, b + 1)));
    }
    Ok(ColoredGraph {
        colors: colors.into_values().collect(),
        edges,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum MisRole {
    Dummy,
    Interaction { sign: char },
    Selection { color: usize },
    Vertex { vertex: usize },
    /// Edge client of edge number `edge` seen from `from` towards `to`.
    Edge { edge: usize, from: usize, to: usize },
}

#[derive(Clone, Debug)]
pub struct MisGadget {
    pub instance: Instance,
    /// Roles by client index, with 1-based vertex, colour and edge numbers.
    pub roles: Vec<MisRole>,
    pub graph: ColoredGraph,
    /// Day on which each vertex is the vertex day.
    pub vertex_day: Vec<usize>,
    pub validation_day: Vec<usize>,
    pub edge_day: Vec<usize>,
    /// `incident[v]`: edge clients leaving `v`, in neighbour order.
    incident: Vec<Vec<usize>>,
}

const DUMMY: usize = 0;
const PLUS: usize = 1;
const MINUS: usize = 2;

impl MisGadget {
    fn selection_client(&self, color: usize) -> usize {
        3 + color
    }

    fn vertex_client(&self, v: usize) -> usize {
        3 + self.graph.num_colors() + v
    }

    /// For each colour, the vertex whose vertex day serves the selection
    /// client.
    pub fn decode_independent_set(&self, sched: &Schedule) -> Option<Vec<usize>> {
        (0..self.graph.num_colors())
            .map(|c| {
                let sel = self.selection_client(c);
                (0..self.graph.vertices())
                    .find(|&v| self.graph.colors[v] == c && sched.serves(self.vertex_day[v], sel))
            })
            .collect()
    }

    pub fn roles_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.roles).expect("roles serialize");
        s.push('\n');
        s
    }
}

/// Checks the promise: every colour class non-empty and of equal size,
/// no edge inside a class, all degrees equal to some `r >= 1`, an even
/// number of edges. Returns `r`.
fn check_promise(g: &ColoredGraph) -> Result<usize> {
    let colors = g.num_colors();
    let mut sizes = vec![0usize; colors];
    for &c in &g.colors {
        sizes[c] += 1;
    }
    if let Some(c) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Promise(format!("colour {} has no vertices", c + 1)));
    }
    if sizes.iter().any(|&s| s != sizes[0]) {
        return Err(Error::Promise(format!("colour classes differ in size: {sizes:?}")));
    }
    let mut degree = vec![0usize; g.vertices()];
    for &(a, b) in &g.edges {
        if g.colors[a] == g.colors[b] {
            return Err(Error::Promise(format!(
                "edge {}-{} joins two vertices of colour {}",
                a + 1,
                b + 1,
                g.colors[a] + 1
            )));
        }
        degree[a] += 1;
        degree[b] += 1;
    }
    let r = degree.first().copied().unwrap_or(0);
    if r == 0 || degree.iter().any(|&d| d != r) {
        return Err(Error::Promise(format!("graph is not r-regular with r >= 1: degrees {degree:?}")));
    }
    if g.edges.len() % 2 == 1 {
        return Err(Error::Promise(format!(
            "{} edges; an even number is required (double the edges first)",
            g.edges.len()
        )));
    }
    Ok(r)
}

pub fn gadget_from_mis(graph: &ColoredGraph) -> Result<MisGadget> {
    let r = check_promise(graph)? as u64;
    let colors = graph.num_colors();
    let nv = graph.vertices();
    let ne = graph.edges.len();
    // Orient every edge from the smaller colour to the larger one.
    let edges: Vec<(usize, usize)> = graph
        .edges
        .iter()
        .map(|&(a, b)| if graph.colors[a] < graph.colors[b] { (a, b) } else { (b, a) })
        .collect();

    let edge_base = 3 + colors + nv;
    let n = edge_base + 2 * ne;
    let mut roles = vec![
        MisRole::Dummy,
        MisRole::Interaction { sign: '+' },
        MisRole::Interaction { sign: '-' },
    ];
    roles.extend((1..=colors).map(|color| MisRole::Selection { color }));
    roles.extend((1..=nv).map(|vertex| MisRole::Vertex { vertex }));
    for (e, &(v, u)) in edges.iter().enumerate() {
        roles.push(MisRole::Edge { edge: e + 1, from: v + 1, to: u + 1 });
        roles.push(MisRole::Edge { edge: e + 1, from: u + 1, to: v + 1 });
    }

    // Edge clients leaving each vertex, ordered by (neighbour, edge number).
    let mut incident: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); nv];
    for (e, &(v, u)) in edges.iter().enumerate() {
        incident[v].push((u, e, edge_base + 2 * e));
        incident[u].push((v, e, edge_base + 2 * e + 1));
    }
    let incident: Vec<Vec<usize>> = incident
        .into_iter()
        .map(|mut list| {
            list.sort_unstable();
            list.into_iter().map(|(_, _, c)| c).collect()
        })
        .collect();

    let offset = n as u64;
    let blocked_row = || -> Vec<Option<Job>> {
        (0..n)
            .map(|j| Some(if j == DUMMY { Job::pd(offset, offset) } else { Job::pd(1, j as u64) }))
            .collect()
    };
    let vertex_client = |v: usize| 3 + colors + v;

    let mut rows = Vec::new();
    let mut vertex_day = vec![0; nv];
    let mut validation_day = vec![0; colors];
    for color in 0..colors {
        let class: Vec<usize> = (0..nv).filter(|&v| graph.colors[v] == color).collect();
        for &v in &class {
            let mut row = blocked_row();
            row[vertex_client(v)] = Some(Job::pd(r, offset + r + 1));
            row[3 + color] = Some(Job::pd(r, offset + r + 1));
            vertex_day[v] = rows.len();
            rows.push(row);
        }
        let mut row = blocked_row();
        for (p, &v) in class.iter().enumerate() {
            let p = p as u64 + 1;
            row[vertex_client(v)] = Some(Job::pd(r, offset + r * (p + 1)));
            for (q, &c) in incident[v].iter().enumerate() {
                row[c] = Some(Job::pd(1, offset + r * p + q as u64 + 1));
            }
        }
        validation_day[color] = rows.len();
        rows.push(row);
    }
    let mut edge_day = Vec::with_capacity(ne);
    for e in 0..ne {
        let mut row = blocked_row();
        row[MINUS] = Some(Job::pd(2, offset + 3));
        row[PLUS] = Some(Job::pd(2, offset + 4));
        row[edge_base + 2 * e] = Some(Job::pd(1, offset + 4));
        row[edge_base + 2 * e + 1] = Some(Job::pd(1, offset + 2));
        edge_day.push(rows.len());
        rows.push(row);
    }

    let m = rows.len();
    let mut ks = vec![1usize; n];
    ks[DUMMY] = m;
    ks[PLUS] = ne / 2;
    ks[MINUS] = ne / 2;
    let instance = Instance::new(n, m, rows, Fairness::PerClient(ks), 1)?;
    Ok(MisGadget {
        instance,
        roles,
        graph: graph.clone(),
        vertex_day,
        validation_day,
        edge_day,
        incident,
    })
}

/// Width-4 decomposition of the gadget's overall conflict graph: a centre
/// bag with the dummy and the interaction clients, one bag per colour adding
/// its selection client, one per vertex adding the vertex client, and one
/// per outgoing edge client of that vertex.
pub fn mis_gadget_decomposition(g: &MisGadget) -> TreeDecomposition {
    let hub = [DUMMY, PLUS, MINUS];
    let mut bags: Vec<Vec<usize>> = vec![hub.to_vec()];
    let mut edges = Vec::new();
    let mut color_bag = Vec::new();
    for c in 0..g.graph.num_colors() {
        color_bag.push(bags.len());
        edges.push((0, bags.len()));
        bags.push(vec![DUMMY, PLUS, MINUS, g.selection_client(c)]);
    }
    for v in 0..g.graph.vertices() {
        let c = g.graph.colors[v];
        let vb = bags.len();
        edges.push((color_bag[c], vb));
        bags.push(vec![DUMMY, PLUS, MINUS, g.vertex_client(v), g.selection_client(c)]);
        for &ec in &g.incident[v] {
            edges.push((vb, bags.len()));
            bags.push(vec![DUMMY, PLUS, MINUS, g.vertex_client(v), ec]);
        }
    }
    TreeDecomposition::new(g.instance.n(), bags, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflict::build_overall_graph;
    use crate::instance::verify_schedule;
    use crate::oracle::{solve_exhaustive, SearchBudget};

    fn check(g: &ColoredGraph) {
        let gadget = gadget_from_mis(g).unwrap();
        assert_eq!(gadget.instance.m(), g.num_colors() * (g.vertices() / g.num_colors() + 1) + g.edges.len());
        let td = mis_gadget_decomposition(&gadget);
        td.validate(&build_overall_graph(&gadget.instance).graph).unwrap();
        assert_eq!(td.width(), 4);
        let out = solve_exhaustive(&gadget.instance, &SearchBudget::default()).unwrap();
        assert_eq!(out.is_yes(), g.has_multicolored_independent_set());
        if let Some(w) = &out.witness {
            assert!(verify_schedule(&gadget.instance, w).ok());
            let set = gadget.decode_independent_set(w).unwrap();
            for (i, &a) in set.iter().enumerate() {
                assert_eq!(g.colors[a], i);
                for &b in &set[i + 1..] {
                    assert!(!g.edges.contains(&(a, b)) && !g.edges.contains(&(b, a)));
                }
            }
        }
    }

    #[test]
    fn single_edge_doubled_is_no() {
        let g = ColoredGraph { colors: vec![0, 1], edges: vec![(0, 1)] };
        assert!(gadget_from_mis(&g).unwrap_err().to_string().contains("even"));
        let g = g.with_even_edges();
        assert!(!g.has_multicolored_independent_set());
        check(&g);
    }

    #[test]
    fn perfect_matching_is_yes() {
        let g = ColoredGraph { colors: vec![0, 0, 1, 1], edges: vec![(0, 2), (1, 3)] };
        assert!(g.has_multicolored_independent_set());
        check(&g);
    }

    #[test]
    fn complete_bipartite_is_no() {
        let g = ColoredGraph {
            colors: vec![0, 0, 1, 1],
            edges: vec![(0, 2), (0, 3), (1, 2), (1, 3)],
        };
        check(&g);
    }

    #[test]
    fn promise_errors_name_the_condition() {
        let unequal = ColoredGraph { colors: vec![0, 0, 1], edges: vec![(0, 2), (1, 2)] };
        assert!(gadget_from_mis(&unequal).unwrap_err().to_string().contains("differ in size"));
        let inside = ColoredGraph { colors: vec![0, 0, 1, 1], edges: vec![(0, 1), (2, 3)] };
        assert!(gadget_from_mis(&inside).unwrap_err().to_string().contains("joins"));
        let irregular = ColoredGraph { colors: vec![0, 0, 1, 1], edges: vec![(0, 2), (0, 3)] };
        assert!(gadget_from_mis(&irregular).unwrap_err().to_string().contains("regular"));
    }

    #[test]
    fn text_round_trip() {
        let g = ColoredGraph { colors: vec![0, 0, 1, 1], edges: vec![(0, 2), (1, 3)] };
        assert_eq!(parse_colored_graph(&format!("c demo\n{}", g.to_text())).unwrap(), g);
        assert!(parse_colored_graph("v 2 1\n").is_err());
        assert!(parse_colored_graph("v 1 1\ne 1 3\n").is_err());
    }
}
