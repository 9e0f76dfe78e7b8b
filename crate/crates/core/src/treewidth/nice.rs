use super::TreeDecomposition;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NiceKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Rooted nice decomposition. Nodes are stored children-first, the root is
/// the last node and its bag is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub n: usize,
    pub nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(1).saturating_sub(1)
    }

    /// Checks the local rules of every node kind.
    pub fn check(&self) -> Result<()> {
        let bad = |i: usize, msg: &str| Err(Error::InvalidDecomposition(format!("nice node {i}: {msg}")));
        for (i, node) in self.nodes.iter().enumerate() {
            if node.children.iter().any(|&c| c >= i) {
                return bad(i, "child stored after parent");
            }
            let child = |j: usize| &self.nodes[node.children[j]].bag;
            match node.kind {
                NiceKind::Leaf => {
                    if !node.children.is_empty() {
                        return bad(i, "leaf with children");
                    }
                }
                NiceKind::Join => {
                    if node.children.len() != 2 || child(0) != &node.bag || child(1) != &node.bag {
                        return bad(i, "join needs two children with its bag");
                    }
                }
                NiceKind::Introduce(v) | NiceKind::Forget(v) => {
                    if node.children.len() != 1 {
                        return bad(i, "introduce/forget needs one child");
                    }
                    let (big, small) = match node.kind {
                        NiceKind::Introduce(_) => (&node.bag, child(0)),
                        _ => (child(0), &node.bag),
                    };
                    let mut expected = small.clone();
                    expected.push(v);
                    expected.sort_unstable();
                    if small.contains(&v) || &expected != big {
                        return bad(i, "bag differs from child by more than the named vertex");
                    }
                }
            }
        }
        if self.nodes.last().is_some_and(|r| !r.bag.is_empty()) {
            return Err(Error::InvalidDecomposition("root bag is not empty".into()));
        }
        Ok(())
    }

    /// The plain decomposition formed by the nice nodes.
    pub fn to_plain(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|x| x.bag.clone()).collect();
        let edges = self
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(i, x)| x.children.iter().map(move |&c| (c, i)))
            .collect();
        TreeDecomposition::new(self.n, bags, edges)
    }

    /// All vertices in bags of the subtree below each node.
    pub fn subtree_vertices(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let mut vs = node.bag.clone();
            for &c in &node.children {
                vs.extend_from_slice(&out[c]);
            }
            vs.sort_unstable();
            vs.dedup();
            out.push(vs);
        }
        out
    }
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NiceKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Walks from node `from` (bag `have`) to bag `want`: forget first, then
    /// introduce, both in increasing vertex order.
    fn chain(&mut self, mut from: usize, want: &[usize]) -> usize {
        let have = self.nodes[from].bag.clone();
        let mut bag = have.clone();
        for &v in have.iter().filter(|v| want.binary_search(v).is_err()) {
            bag.retain(|&x| x != v);
            from = self.push(NiceKind::Forget(v), bag.clone(), vec![from]);
        }
        for &v in want.iter().filter(|v| have.binary_search(v).is_err()) {
            let pos = bag.binary_search(&v).unwrap_err();
            bag.insert(pos, v);
            from = self.push(NiceKind::Introduce(v), bag.clone(), vec![from]);
        }
        from
    }
}

/// Converts a valid decomposition to nice form rooted at bag 0 with the same
/// width, finishing with a forget chain to an empty root.
pub fn to_nice(td: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    td.validate_shape()?;
    let mut b = Builder { nodes: Vec::new() };
    if td.bags.is_empty() {
        b.push(NiceKind::Leaf, Vec::new(), Vec::new());
        return Ok(NiceTreeDecomposition { n: td.n, nodes: b.nodes });
    }

    let adj = td.adjacency();
    let count = td.bags.len();
    let mut parent = vec![usize::MAX; count];
    let mut order = Vec::with_capacity(count);
    let mut stack = vec![0usize];
    parent[0] = 0;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in adj[x].iter().rev() {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }

    let mut top = vec![usize::MAX; count];
    for &x in order.iter().rev() {
        let want = &td.bags[x];
        let children: Vec<usize> = adj[x].iter().copied().filter(|&y| parent[y] == x && y != x).collect();
        let mut branches: Vec<usize> = children.iter().map(|&c| b.chain(top[c], want)).collect();
        if branches.is_empty() {
            let leaf = b.push(NiceKind::Leaf, Vec::new(), Vec::new());
            branches.push(b.chain(leaf, want));
        }
        let mut acc = branches[0];
        for &next in &branches[1..] {
            acc = b.push(NiceKind::Join, want.clone(), vec![acc, next]);
        }
        top[x] = acc;
    }
    b.chain(top[0], &[]);
    Ok(NiceTreeDecomposition { n: td.n, nodes: b.nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conflict::UGraph;
    use crate::treewidth::compute_tree_decomposition;
    use proptest::prelude::*;

    #[test]
    fn single_bag_is_an_introduce_chain() {
        let nice = to_nice(&TreeDecomposition::new(2, vec![vec![0, 1]], vec![])).unwrap();
        let kinds: Vec<NiceKind> = nice.nodes.iter().map(|x| x.kind).collect();
        assert_eq!(
            kinds,
            vec![
                NiceKind::Leaf,
                NiceKind::Introduce(0),
                NiceKind::Introduce(1),
                NiceKind::Forget(0),
                NiceKind::Forget(1),
            ]
        );
        nice.check().unwrap();
    }

    #[test]
    fn path_has_forget_and_introduce() {
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        let nice = to_nice(&td).unwrap();
        nice.check().unwrap();
        assert!(nice.nodes.iter().any(|x| x.kind == NiceKind::Forget(2)));
        assert!(nice.nodes.iter().any(|x| x.kind == NiceKind::Introduce(0)));
        assert_eq!(nice.width(), 1);
    }

    #[test]
    fn star_produces_joins() {
        let td = TreeDecomposition::new(
            4,
            vec![vec![0], vec![0, 1], vec![0, 2], vec![0, 3]],
            vec![(0, 1), (0, 2), (0, 3)],
        );
        let nice = to_nice(&td).unwrap();
        nice.check().unwrap();
        assert_eq!(nice.nodes.iter().filter(|x| x.kind == NiceKind::Join).count(), 2);
    }

    #[test]
    fn rejects_invalid_input() {
        let td = TreeDecomposition::new(2, vec![vec![0], vec![1]], vec![]);
        assert!(to_nice(&td).is_err());
    }

    proptest! {
        #[test]
        fn nice_form_is_valid_with_same_width(
            n in 1usize..11,
            raw in prop::collection::vec((0usize..11, 0usize..11), 0..30),
        ) {
            let g = UGraph::from_edges(n, raw.into_iter().filter(|&(a, b)| a < n && b < n));
            let td = compute_tree_decomposition(&g);
            let nice = to_nice(&td).unwrap();
            nice.check().unwrap();
            nice.to_plain().validate(&g).unwrap();
            prop_assert_eq!(nice.width(), td.width());
        }
    }
}
