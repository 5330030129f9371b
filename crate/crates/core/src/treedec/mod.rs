//! Rooted tree decompositions and the operations that reshape them.

mod balance;
mod build;
mod io;
mod lca;
mod nice;

pub use balance::{balance_raw, balance_td, rank_bags, rank_bound, RankTree};
pub use build::{build_td, elimination_order, td_from_elimination, Heuristic};
pub use io::{parse_td, write_td, RawTd};
pub use lca::Lca;
pub use nice::make_semi_nice;

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A rooted tree of bags over nodes `0..n_nodes`.
#[derive(Debug, Clone)]
pub struct TreeDecomposition {
    n_nodes: usize,
    bags: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
    level: Vec<usize>,
    preorder: Vec<usize>,
    home: Vec<Option<usize>>,
    intro: Vec<Vec<usize>>,
    lca: Lca,
}

impl TreeDecomposition {
    /// Builds from parent pointers; exactly one bag must have no parent.
    pub fn from_parents(n_nodes: usize, mut bags: Vec<Vec<usize>>, parent: Vec<Option<usize>>) -> Result<Self> {
        if bags.is_empty() {
            return Err(Error::InvalidDecomposition("no bags".into()));
        }
        if parent.len() != bags.len() {
            return Err(Error::InvalidDecomposition("parent table size mismatch".into()));
        }
        let roots: Vec<usize> = (0..bags.len()).filter(|&b| parent[b].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidDecomposition(format!(
                "expected one root bag, found {}",
                roots.len()
            )));
        }
        let root = roots[0];
        let mut children = vec![Vec::new(); bags.len()];
        for (b, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= bags.len() {
                    return Err(Error::IndexOutOfRange {
                        index: p,
                        limit: bags.len(),
                    });
                }
                children[p].push(b);
            }
        }
        for bag in &mut bags {
            bag.sort_unstable();
            bag.dedup();
            if let Some(&x) = bag.iter().find(|&&x| x >= n_nodes) {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    limit: n_nodes,
                });
            }
        }
        let mut level = vec![0; bags.len()];
        let mut preorder = Vec::with_capacity(bags.len());
        let mut stack = vec![root];
        while let Some(b) = stack.pop() {
            preorder.push(b);
            for &c in children[b].iter().rev() {
                level[c] = level[b] + 1;
                stack.push(c);
            }
        }
        if preorder.len() != bags.len() {
            return Err(Error::InvalidDecomposition("bag tree is not connected".into()));
        }
        let mut home = vec![None; n_nodes];
        for &b in &preorder {
            for &x in &bags[b] {
                if home[x].is_none() {
                    home[x] = Some(b);
                }
            }
        }
        let mut intro = vec![Vec::new(); bags.len()];
        for (x, h) in home.iter().enumerate() {
            if let Some(b) = h {
                intro[*b].push(x);
            }
        }
        let lca = Lca::new(root, &children, &level);
        Ok(TreeDecomposition {
            n_nodes,
            bags,
            parent,
            children,
            root,
            level,
            preorder,
            home,
            intro,
            lca,
        })
    }

    /// Builds from undirected tree edges, rooted at `root` (default bag 0).
    pub fn from_edges(
        n_nodes: usize,
        bags: Vec<Vec<usize>>,
        edges: &[(usize, usize)],
        root: Option<usize>,
    ) -> Result<Self> {
        let k = bags.len();
        if k == 0 {
            return Err(Error::InvalidDecomposition("no bags".into()));
        }
        if edges.len() + 1 != k {
            return Err(Error::InvalidDecomposition(format!(
                "{} bags need {} tree edges, found {}",
                k,
                k - 1,
                edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); k];
        for &(a, b) in edges {
            for x in [a, b] {
                if x >= k {
                    return Err(Error::IndexOutOfRange { index: x, limit: k });
                }
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let root = root.unwrap_or(0);
        if root >= k {
            return Err(Error::IndexOutOfRange { index: root, limit: k });
        }
        let mut parent = vec![None; k];
        let mut seen = vec![false; k];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(b) = queue.pop_front() {
            for &c in &adj[b] {
                if !seen[c] {
                    seen[c] = true;
                    parent[c] = Some(b);
                    queue.push_back(c);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidDecomposition("bag tree is not connected".into()));
        }
        TreeDecomposition::from_parents(n_nodes, bags, parent)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn num_bags(&self) -> usize {
        self.bags.len()
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn bag(&self, b: usize) -> &[usize] {
        &self.bags[b]
    }

    pub fn parent(&self, b: usize) -> Option<usize> {
        self.parent[b]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, b: usize) -> &[usize] {
        &self.children[b]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn level(&self, b: usize) -> usize {
        self.level[b]
    }

    /// Bags in root-first depth-first order.
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    /// The highest bag containing `u`.
    pub fn home(&self, u: usize) -> Option<usize> {
        self.home.get(u).copied().flatten()
    }

    /// Nodes whose highest bag is `b`.
    pub fn introduced(&self, b: usize) -> &[usize] {
        &self.intro[b]
    }

    /// The deeper of the home bags of `u` and `v`.
    pub fn edge_bag(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = (self.home(u)?, self.home(v)?);
        Some(if self.level[a] >= self.level[b] { a } else { b })
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        self.lca.query(a, b)
    }

    /// Largest bag size minus one; 0 when all bags are empty.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.level.iter().copied().max().unwrap_or(0)
    }

    /// Undirected tree edges as `(parent, child)`.
    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        (0..self.bags.len())
            .filter_map(|b| self.parent[b].map(|p| (p, b)))
            .collect()
    }

    pub fn contains(&self, b: usize, u: usize) -> bool {
        self.bags[b].binary_search(&u).is_ok()
    }

    /// At most two children per bag and at most one node introduced per bag.
    pub fn is_semi_nice(&self) -> bool {
        (0..self.bags.len()).all(|b| self.children[b].len() <= 2 && self.intro[b].len() <= 1)
    }

    /// Bags on the path from `b` up to the root, `b` first.
    pub fn ancestors(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(Some(b), move |&x| self.parent[x])
    }

    /// Whether `a` is an ancestor of `b` (or equal to it).
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.lca(a, b) == a
    }
}

/// Outcome of checking a decomposition against a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdReport {
    pub width: usize,
    pub violations: Vec<String>,
}

impl TdReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks node coverage, edge coverage and connectivity of every node's bags.
pub fn validate_td(n_nodes: usize, edges: &[(usize, usize)], td: &TreeDecomposition) -> TdReport {
    let mut violations = Vec::new();
    if td.n_nodes() < n_nodes {
        violations.push(format!(
            "decomposition covers {} nodes, graph has {}",
            td.n_nodes(),
            n_nodes
        ));
    }
    let mut holders = vec![Vec::new(); td.n_nodes().max(n_nodes)];
    for b in 0..td.num_bags() {
        for &x in td.bag(b) {
            holders[x].push(b);
        }
    }
    for (u, list) in holders.iter().enumerate().take(n_nodes) {
        if list.is_empty() {
            violations.push(format!("node {u} appears in no bag"));
        }
    }
    for &(u, v) in edges {
        if u >= holders.len() || v >= holders.len() {
            violations.push(format!("edge {u} -> {v} references an unknown node"));
            continue;
        }
        let covered = holders[u].iter().any(|&b| td.contains(b, v));
        if !covered {
            violations.push(format!("edge {u} -> {v} lies in no bag"));
        }
    }
    for (u, list) in holders.iter().enumerate() {
        let tops = list
            .iter()
            .filter(|&&b| td.parent(b).map_or(true, |p| !td.contains(p, u)))
            .count();
        if tops > 1 {
            violations.push(format!("bags holding node {u} are not connected"));
        }
    }
    TdReport {
        width: td.width(),
        violations,
    }
}
