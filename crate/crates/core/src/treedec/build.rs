use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use super::TreeDecomposition;
use crate::error::{Error, Result};

/// Greedy elimination heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Minimum fill-in for small graphs, minimum degree above 1024 nodes.
    #[default]
    Auto,
    MinDegree,
    MinFill,
}

fn adjacency_sets(n: usize, edges: &[(usize, usize)]) -> Result<Vec<BTreeSet<usize>>> {
    let mut adj = vec![BTreeSet::new(); n];
    for &(u, v) in edges {
        for x in [u, v] {
            if x >= n {
                return Err(Error::IndexOutOfRange { index: x, limit: n });
            }
        }
        if u != v {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    Ok(adj)
}

fn eliminate(adj: &mut [BTreeSet<usize>], v: usize) -> Vec<usize> {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    for &a in &nbrs {
        adj[a].remove(&v);
    }
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    adj[v].clear();
    nbrs
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Computes an elimination order of the undirected skeleton of `edges`.
pub fn elimination_order(n: usize, edges: &[(usize, usize)], heuristic: Heuristic) -> Result<Vec<usize>> {
    let mut adj = adjacency_sets(n, edges)?;
    let heuristic = match heuristic {
        Heuristic::Auto if n <= 1024 => Heuristic::MinFill,
        Heuristic::Auto => Heuristic::MinDegree,
        h => h,
    };
    let mut order = Vec::with_capacity(n);
    let mut done = vec![false; n];
    match heuristic {
        Heuristic::MinFill => {
            for _ in 0..n {
                let v = (0..n)
                    .filter(|&v| !done[v])
                    .min_by_key(|&v| (fill_in(&adj, v), adj[v].len(), v))
                    .unwrap();
                eliminate(&mut adj, v);
                done[v] = true;
                order.push(v);
            }
        }
        _ => {
            let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..n).map(|v| Reverse((adj[v].len(), v))).collect();
            while let Some(Reverse((deg, v))) = heap.pop() {
                if done[v] || deg != adj[v].len() {
                    continue;
                }
                let nbrs = eliminate(&mut adj, v);
                done[v] = true;
                order.push(v);
                for a in nbrs {
                    heap.push(Reverse((adj[a].len(), a)));
                }
            }
        }
    }
    Ok(order)
}

/// Builds a decomposition from an elimination order.
///
/// Components are joined under an extra empty root bag.
pub fn td_from_elimination(n: usize, edges: &[(usize, usize)], order: &[usize]) -> Result<TreeDecomposition> {
    let mut position = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, limit: n });
        }
        if position[v] != usize::MAX {
            return Err(Error::InvalidDecomposition(format!("node {v} eliminated twice")));
        }
        position[v] = i;
    }
    if order.len() != n {
        return Err(Error::InvalidDecomposition(format!(
            "elimination order has {} nodes, graph has {n}",
            order.len()
        )));
    }
    if n == 0 {
        return TreeDecomposition::from_parents(0, vec![Vec::new()], vec![None]);
    }
    let mut adj = adjacency_sets(n, edges)?;
    let mut bags = Vec::with_capacity(n + 1);
    let mut parent = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        let nbrs = eliminate(&mut adj, v);
        // Bag i belongs to v; it hangs under the bag of the earliest-eliminated neighbour.
        parent[i] = nbrs.iter().map(|&a| position[a]).min();
        let mut bag = nbrs;
        bag.push(v);
        bags.push(bag);
    }
    let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
    if roots.len() > 1 {
        let top = bags.len();
        bags.push(Vec::new());
        for r in roots {
            parent[r] = Some(top);
        }
        parent.push(None);
    }
    TreeDecomposition::from_parents(n, bags, parent)
}

/// Builds a decomposition, following `hint` when one is given.
pub fn build_td(
    n: usize,
    edges: &[(usize, usize)],
    hint: Option<&[usize]>,
    heuristic: Heuristic,
) -> Result<TreeDecomposition> {
    let order = match hint {
        Some(h) => h.to_vec(),
        None => elimination_order(n, edges, heuristic)?,
    };
    td_from_elimination(n, edges, &order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treedec::tests::demo;
    use crate::treedec::validate_td;

    #[test]
    fn demo_graph_gets_width_two() {
        let (n, edges, _) = demo();
        for h in [Heuristic::MinFill, Heuristic::MinDegree] {
            let td = build_td(n, &edges, None, h).unwrap();
            let report = validate_td(n, &edges, &td);
            assert!(report.is_valid(), "{:?}", report.violations);
            assert_eq!(report.width, 2, "{h:?}");
        }
    }

    #[test]
    fn empty_graph_has_one_empty_bag() {
        let td = build_td(0, &[], None, Heuristic::Auto).unwrap();
        assert_eq!(td.num_bags(), 1);
        assert_eq!(td.width(), 0);
    }

    #[test]
    fn components_join_under_empty_root() {
        let edges = [(0, 1), (2, 3)];
        let td = build_td(4, &edges, None, Heuristic::MinDegree).unwrap();
        assert!(td.bag(td.root()).is_empty());
        assert!(validate_td(4, &edges, &td).is_valid());
    }

    #[test]
    fn bad_hint_rejected() {
        assert!(build_td(3, &[(0, 1)], Some(&[0, 0, 1]), Heuristic::Auto).is_err());
        assert!(build_td(3, &[(0, 1)], Some(&[0, 1]), Heuristic::Auto).is_err());
    }

    #[test]
    fn cycle_has_width_two() {
        let edges: Vec<_> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
        let td = build_td(8, &edges, None, Heuristic::Auto).unwrap();
        assert_eq!(td.width(), 2);
    }
}
