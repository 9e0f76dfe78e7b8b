use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::conflict::UGraph;
use crate::error::{Error, Result};

/// Bags over vertices `0..n` joined by tree edges between bag indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub n: usize,
    /// Each bag sorted and duplicate-free.
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(n: usize, mut bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Self {
        for bag in &mut bags {
            bag.sort_unstable();
            bag.dedup();
        }
        TreeDecomposition { n, bags, edges }
    }

    /// A single bag holding every vertex.
    pub fn trivial(n: usize) -> Self {
        TreeDecomposition::new(n, vec![(0..n).collect()], Vec::new())
    }

    /// Largest bag size minus one; 0 for an empty decomposition.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Tree shape, vertex range and connectivity of every vertex's bags.
    pub fn validate_shape(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDecomposition(msg));
        let b = self.bags.len();
        if b == 0 {
            return if self.n == 0 {
                Ok(())
            } else {
                bad("no bags".into())
            };
        }
        if self.edges.len() != b - 1 {
            return bad(format!("{} edges for {b} bags; a tree needs {}", self.edges.len(), b - 1));
        }
        for &(x, y) in &self.edges {
            if x >= b || y >= b || x == y {
                return bad(format!("edge {}-{} is not between two distinct bags", x + 1, y + 1));
            }
        }
        let adj = self.adjacency();
        if reach(&adj, 0, |_| true).iter().filter(|&&r| r).count() != b {
            return bad("bag tree is not connected".into());
        }
        let mut holders = vec![Vec::new(); self.n];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= self.n {
                    return bad(format!("bag {} names vertex {} beyond n = {}", i + 1, v + 1, self.n));
                }
                holders[v].push(i);
            }
        }
        for (v, hs) in holders.iter().enumerate() {
            let Some(&first) = hs.first() else {
                return bad(format!("vertex {} is in no bag", v + 1));
            };
            let inside = |bag: usize| self.bags[bag].binary_search(&v).is_ok();
            let seen = reach(&adj, first, inside);
            if hs.iter().any(|&h| !seen[h]) {
                return bad(format!("bags containing vertex {} are not connected", v + 1));
            }
        }
        Ok(())
    }

    /// Full validity with respect to `graph`.
    pub fn validate(&self, graph: &UGraph) -> Result<()> {
        if graph.n() != self.n {
            return Err(Error::InvalidDecomposition(format!(
                "decomposition covers {} vertices, graph has {}",
                self.n,
                graph.n()
            )));
        }
        self.validate_shape()?;
        let mut bags_of = vec![Vec::new(); self.n];
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                bags_of[v].push(i);
            }
        }
        for (u, v) in graph.edges() {
            let shared = bags_of[u]
                .iter()
                .any(|&b| self.bags[b].binary_search(&v).is_ok());
            if !shared {
                return Err(Error::InvalidDecomposition(format!(
                    "edge {}-{} lies in no bag",
                    u + 1,
                    v + 1
                )));
            }
        }
        Ok(())
    }

    /// Decomposition induced by eliminating vertices in `order`. Each
    /// vertex's bag is itself plus its neighbours at elimination time and is
    /// attached to the bag of the first of those neighbours eliminated next.
    pub fn from_elimination_order(graph: &UGraph, order: &[usize]) -> Self {
        let n = graph.n();
        assert_eq!(order.len(), n, "elimination order must list every vertex");
        let mut position = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let mut adj: Vec<std::collections::BTreeSet<usize>> = (0..n)
            .map(|v| graph.neighbors(v).iter().copied().collect())
            .collect();
        let mut bags = Vec::with_capacity(n);
        let mut parent: Vec<Option<usize>> = vec![None; n];
        for (i, &v) in order.iter().enumerate() {
            let nbrs: Vec<usize> = adj[v].iter().copied().collect();
            for (a, &x) in nbrs.iter().enumerate() {
                adj[x].remove(&v);
                for &y in &nbrs[a + 1..] {
                    adj[x].insert(y);
                    adj[y].insert(x);
                }
            }
            parent[i] = nbrs.iter().map(|&x| position[x]).min();
            let mut bag = nbrs;
            bag.push(v);
            bags.push(bag);
        }
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        let mut roots = Vec::new();
        for (i, p) in parent.iter().enumerate() {
            match p {
                Some(p) => edges.push((i, *p)),
                None => roots.push(i),
            }
        }
        edges.extend(roots.windows(2).map(|w| (w[0], w[1])));
        TreeDecomposition::new(n, bags, edges)
    }
}

fn reach(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] && allowed(y) {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

/// PACE `.td` text: `s td <bags> <max bag size> <n>`, `b <id> <vertices>`,
/// then one line per tree edge. Ids and vertices are 1-based.
pub fn to_pace(td: &TreeDecomposition) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "s td {} {} {}",
        td.bags.len(),
        td.bags.iter().map(Vec::len).max().unwrap_or(0),
        td.n
    );
    for (i, bag) in td.bags.iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for v in bag {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    for &(a, b) in &td.edges {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

pub fn parse_pace(text: &str) -> Result<TreeDecomposition> {
    let err = |line: usize, msg: &str| Error::Parse(format!("td line {line}: {msg}"));
    let mut header: Option<(usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| err(line, &format!("bad number {t:?}")));
        match toks.first().copied() {
            None | Some("c") => continue,
            Some("s") => {
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(err(line, "expected `s td <bags> <width+1> <n>`"));
                }
                let count = num(toks[2])?;
                header = Some((count, num(toks[4])?));
                bags = vec![None; count];
            }
            Some("b") => {
                let (count, n) = header.ok_or_else(|| err(line, "bag before header"))?;
                let id = num(toks.get(1).ok_or_else(|| err(line, "missing bag id"))?)?;
                if id == 0 || id > count {
                    return Err(err(line, "bag id out of range"));
                }
                let mut bag = Vec::with_capacity(toks.len() - 2);
                for t in &toks[2..] {
                    let v = num(t)?;
                    if v == 0 || v > n {
                        return Err(err(line, "vertex out of range"));
                    }
                    bag.push(v - 1);
                }
                bags[id - 1] = Some(bag);
            }
            Some(_) => {
                let (count, _) = header.ok_or_else(|| err(line, "edge before header"))?;
                if toks.len() != 2 {
                    return Err(err(line, "expected an edge `<bag> <bag>`"));
                }
                let (a, b) = (num(toks[0])?, num(toks[1])?);
                if a == 0 || b == 0 || a > count || b > count {
                    return Err(err(line, "edge names an unknown bag"));
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    let (_, n) = header.ok_or_else(|| Error::Parse("td: missing `s td` header".into()))?;
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::Parse(format!("td: bag {} never listed", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeDecomposition::new(n, bags, edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pace_round_trip() {
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        let text = to_pace(&td);
        assert_eq!(text, "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n");
        assert_eq!(parse_pace(&format!("c hello\n{text}")).unwrap(), td);
    }

    #[test]
    fn validator_catches_each_violation() {
        let path = UGraph::from_edges(3, [(0, 1), (1, 2)]);
        let good = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        good.validate(&path).unwrap();

        let missing_edge = TreeDecomposition::new(3, vec![vec![0, 1], vec![2]], vec![(0, 1)]);
        assert!(missing_edge.validate(&path).is_err());

        let split = TreeDecomposition::new(
            3,
            vec![vec![0, 1], vec![1, 2], vec![0]],
            vec![(0, 1), (1, 2)],
        );
        assert!(split.validate(&path).unwrap_err().to_string().contains("vertex 1"));

        let not_tree = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![]);
        assert!(not_tree.validate(&path).is_err());

        let uncovered = TreeDecomposition::new(3, vec![vec![0, 1]], vec![]);
        assert!(uncovered.validate(&path).is_err());
    }

    #[test]
    fn elimination_of_a_cycle() {
        let c4 = UGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let td = TreeDecomposition::from_elimination_order(&c4, &[0, 1, 2, 3]);
        td.validate(&c4).unwrap();
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn disconnected_graph_gives_a_tree() {
        let g = UGraph::from_edges(4, [(0, 1)]);
        let td = TreeDecomposition::from_elimination_order(&g, &[0, 1, 2, 3]);
        td.validate(&g).unwrap();
        assert_eq!(td.width(), 1);
    }
}
