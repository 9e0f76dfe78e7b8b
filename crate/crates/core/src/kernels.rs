//! Graph kernels used by the polynomial-time solvers: 2-SAT through
//! strongly connected components and Hopcroft–Karp bipartite matching.
//! Both are iterative so that large instances cannot overflow the stack.

/// A literal: variable `v` is `2v`, its negation `2v + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(usize);

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit(2 * var)
    }

    pub fn neg(var: usize) -> Self {
        Lit(2 * var + 1)
    }

    pub fn var(self) -> usize {
        self.0 / 2
    }

    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn negate(self) -> Self {
        Lit(self.0 ^ 1)
    }

    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var()] != self.is_neg()
    }
}

#[derive(Clone, Debug, Default)]
pub struct TwoSat {
    vars: usize,
    clauses: Vec<(Lit, Lit)>,
}

impl TwoSat {
    pub fn new(vars: usize) -> Self {
        TwoSat {
            vars,
            clauses: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn clauses(&self) -> &[(Lit, Lit)] {
        &self.clauses
    }

    pub fn add_clause(&mut self, a: Lit, b: Lit) {
        debug_assert!(a.var() < self.vars && b.var() < self.vars);
        self.clauses.push((a, b));
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|&(a, b)| a.holds(assignment) || b.holds(assignment))
    }

    /// A satisfying assignment, or `None`. Variable `x` is set true iff its
    /// component comes before that of `¬x` in Tarjan completion order.
    pub fn solve(&self) -> Option<Vec<bool>> {
        let nodes = 2 * self.vars;
        let mut start = vec![0usize; nodes + 1];
        for &(a, b) in &self.clauses {
            start[a.negate().0 + 1] += 1;
            start[b.negate().0 + 1] += 1;
        }
        for i in 0..nodes {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut targets = vec![0usize; start[nodes]];
        for &(a, b) in &self.clauses {
            targets[fill[a.negate().0]] = b.0;
            fill[a.negate().0] += 1;
            targets[fill[b.negate().0]] = a.0;
            fill[b.negate().0] += 1;
        }
        let comp = tarjan_scc(nodes, &start, &targets);
        let mut assignment = Vec::with_capacity(self.vars);
        for v in 0..self.vars {
            let (t, f) = (comp[2 * v], comp[2 * v + 1]);
            if t == f {
                return None;
            }
            assignment.push(t < f);
        }
        Some(assignment)
    }
}

/// Component index per node of a CSR digraph, numbered in completion order
/// (sinks of the condensation first).
pub fn tarjan_scc(nodes: usize, start: &[usize], targets: &[usize]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; nodes];
    let mut low = vec![0usize; nodes];
    let mut comp = vec![UNSEEN; nodes];
    let mut on_stack = vec![false; nodes];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0;
    let mut comps = 0;

    for root in 0..nodes {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, start[root]));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge < start[v + 1] {
                let w = targets[*edge];
                *edge += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, start[w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = comps;
                    if w == v {
                        break;
                    }
                }
                comps += 1;
            }
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
        }
    }
    comp
}

/// Maximum matching in a bipartite graph given by left adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub size: usize,
    pub mate_left: Vec<Option<usize>>,
    pub mate_right: Vec<Option<usize>>,
}

pub fn hopcroft_karp(left: usize, right: usize, adj: &[Vec<usize>]) -> Matching {
    const INF: usize = usize::MAX;
    let mut mate_left: Vec<Option<usize>> = vec![None; left];
    let mut mate_right: Vec<Option<usize>> = vec![None; right];
    let mut dist = vec![INF; left];
    let mut size = 0;
    let mut queue = Vec::with_capacity(left);
    let mut next_edge = vec![0usize; left];
    let mut path: Vec<usize> = Vec::new();

    loop {
        queue.clear();
        for u in 0..left {
            if mate_left[u].is_none() {
                dist[u] = 0;
                queue.push(u);
            } else {
                dist[u] = INF;
            }
        }
        let mut found = false;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in &adj[u] {
                match mate_right[v] {
                    None => found = true,
                    Some(w) if dist[w] == INF => {
                        dist[w] = dist[u] + 1;
                        queue.push(w);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            break;
        }

        next_edge.iter_mut().for_each(|e| *e = 0);
        for root in 0..left {
            if mate_left[root].is_some() {
                continue;
            }
            path.clear();
            path.push(root);
            let mut augmented = false;
            while let Some(&u) = path.last() {
                if next_edge[u] == adj[u].len() {
                    dist[u] = INF;
                    path.pop();
                    continue;
                }
                let v = adj[u][next_edge[u]];
                next_edge[u] += 1;
                match mate_right[v] {
                    None => {
                        // Flip the alternating path ending at `v`.
                        let mut free = v;
                        for &x in path.iter().rev() {
                            let prev = mate_left[x];
                            mate_left[x] = Some(free);
                            mate_right[free] = Some(x);
                            match prev {
                                Some(p) => free = p,
                                None => break,
                            }
                        }
                        augmented = true;
                        break;
                    }
                    Some(w) if dist[w] == dist[u] + 1 => path.push(w),
                    Some(_) => {}
                }
            }
            if augmented {
                size += 1;
            }
        }
    }

    Matching {
        size,
        mate_left,
        mate_right,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_sat(vars: usize, clauses: &[(Lit, Lit)]) -> bool {
        (0u32..1 << vars).any(|mask| {
            let a: Vec<bool> = (0..vars).map(|v| mask >> v & 1 == 1).collect();
            clauses.iter().all(|&(x, y)| x.holds(&a) || y.holds(&a))
        })
    }

    fn brute_matching(left: usize, adj: &[Vec<usize>], used: &mut Vec<bool>, u: usize) -> usize {
        if u == left {
            return 0;
        }
        let mut best = brute_matching(left, adj, used, u + 1);
        for &v in &adj[u] {
            if !used[v] {
                used[v] = true;
                best = best.max(1 + brute_matching(left, adj, used, u + 1));
                used[v] = false;
            }
        }
        best
    }

    #[test]
    fn contradiction_is_unsat() {
        let mut s = TwoSat::new(1);
        s.add_clause(Lit::pos(0), Lit::pos(0));
        s.add_clause(Lit::neg(0), Lit::neg(0));
        assert!(s.solve().is_none());
    }

    #[test]
    fn implication_chain() {
        let mut s = TwoSat::new(3);
        s.add_clause(Lit::pos(0), Lit::pos(0));
        s.add_clause(Lit::neg(0), Lit::pos(1));
        s.add_clause(Lit::neg(1), Lit::neg(2));
        assert_eq!(s.solve().unwrap(), vec![true, true, false]);
    }

    #[test]
    fn perfect_matching_on_cycle() {
        let adj = vec![vec![0, 1], vec![1, 2], vec![2, 0]];
        assert_eq!(hopcroft_karp(3, 3, &adj).size, 3);
    }

    proptest! {
        #[test]
        fn two_sat_matches_truth_table(
            vars in 1usize..7,
            raw in prop::collection::vec((0usize..14, 0usize..14), 0..14),
        ) {
            let clauses: Vec<(Lit, Lit)> = raw.iter()
                .map(|&(a, b)| (Lit(a % (2 * vars)), Lit(b % (2 * vars))))
                .collect();
            let mut s = TwoSat::new(vars);
            for &(a, b) in &clauses {
                s.add_clause(a, b);
            }
            let got = s.solve();
            prop_assert_eq!(got.is_some(), brute_sat(vars, &clauses));
            if let Some(a) = got {
                prop_assert!(s.is_satisfied_by(&a));
            }
        }

        #[test]
        fn matching_is_maximum(
            left in 1usize..7, right in 1usize..7,
            edges in prop::collection::vec((0usize..7, 0usize..7), 0..20),
        ) {
            let mut adj = vec![Vec::new(); left];
            for (u, v) in edges {
                if u < left && v < right && !adj[u].contains(&v) {
                    adj[u].push(v);
                }
            }
            let m = hopcroft_karp(left, right, &adj);
            prop_assert_eq!(m.size, brute_matching(left, &adj, &mut vec![false; right], 0));
            for (u, mate) in m.mate_left.iter().enumerate() {
                if let Some(v) = mate {
                    prop_assert!(adj[u].contains(v));
                    prop_assert_eq!(m.mate_right[*v], Some(u));
                }
            }
        }
    }
}
