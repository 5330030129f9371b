//! Weighted directed graphs over a semiring.

mod gen;
mod io;

pub use gen::{generate_tw_bounded, generate_tw_bounded_with, GenOptions, Generated};
pub use io::{load_graph, parse_graph_file, save_graph, GraphFile};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::semiring::Semiring;

/// A directed graph with dense node ids `0..n` and one weight per edge.
#[derive(Debug, Clone)]
pub struct WeightedGraph<W> {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<W>,
    index: HashMap<(usize, usize), usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    names: Option<Vec<String>>,
}

impl<W: Clone> WeightedGraph<W> {
    /// Builds a graph, merging parallel edges with `⊕`.
    pub fn from_edges<S, I>(sr: &S, n: usize, edges: I) -> Result<Self>
    where
        S: Semiring<Value = W>,
        I: IntoIterator<Item = (usize, usize, W)>,
    {
        let mut g = WeightedGraph {
            n,
            edges: Vec::new(),
            weights: Vec::new(),
            index: HashMap::new(),
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            names: None,
        };
        for (u, v, w) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::IndexOutOfRange { index: x, limit: n });
                }
            }
            match g.index.get(&(u, v)) {
                Some(&id) => g.weights[id] = sr.plus(&g.weights[id], &w),
                None => {
                    let id = g.edges.len();
                    g.index.insert((u, v), id);
                    g.edges.push((u, v));
                    g.weights.push(w);
                    g.out_adj[u].push(id);
                    g.in_adj[v].push(id);
                }
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_weight(&self, id: usize) -> &W {
        &self.weights[id]
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.index.get(&(u, v)).copied()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<&W> {
        self.edge_id(u, v).map(|id| &self.weights[id])
    }

    /// Reassigns the weight of an existing edge.
    pub fn set_weight(&mut self, u: usize, v: usize, w: W) -> Result<()> {
        let id = self.edge_id(u, v).ok_or(Error::UnknownEdge(u, v))?;
        self.weights[id] = w;
        Ok(())
    }

    /// Outgoing `(target, weight)` pairs of `u`.
    pub fn successors(&self, u: usize) -> impl Iterator<Item = (usize, &W)> + '_ {
        self.out_adj[u]
            .iter()
            .map(move |&id| (self.edges[id].1, &self.weights[id]))
    }

    /// Incoming `(source, weight)` pairs of `v`.
    pub fn predecessors(&self, v: usize) -> impl Iterator<Item = (usize, &W)> + '_ {
        self.in_adj[v]
            .iter()
            .map(move |&id| (self.edges[id].0, &self.weights[id]))
    }

    /// Undirected neighbour lists without self-loops, sorted.
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn set_names(&mut self, names: Vec<String>) -> Result<()> {
        if names.len() != self.n {
            return Err(Error::Structure(format!(
                "symbol table has {} names for {} nodes",
                names.len(),
                self.n
            )));
        }
        self.names = Some(names);
        Ok(())
    }

    /// Resolves a node by symbol-table name, then by numeric id.
    pub fn resolve(&self, token: &str) -> Option<usize> {
        if let Some(names) = &self.names {
            if let Some(i) = names.iter().position(|s| s == token) {
                return Some(i);
            }
        }
        token.parse().ok().filter(|&i| i < self.n)
    }

    pub fn label(&self, u: usize) -> String {
        match &self.names {
            Some(names) => names[u].clone(),
            None => u.to_string(),
        }
    }

    /// Same structure with every weight mapped through `f`.
    pub fn map_weights<V: Clone>(&self, mut f: impl FnMut(&W) -> V) -> WeightedGraph<V> {
        WeightedGraph {
            n: self.n,
            edges: self.edges.clone(),
            weights: self.weights.iter().map(&mut f).collect(),
            index: self.index.clone(),
            out_adj: self.out_adj.clone(),
            in_adj: self.in_adj.clone(),
            names: self.names.clone(),
        }
    }
}

/// A node sequence; consecutive nodes must be joined by edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<usize>,
}

impl Path {
    pub fn single(u: usize) -> Self {
        Path { nodes: vec![u] }
    }

    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn source(&self) -> usize {
        self.nodes[0]
    }

    pub fn target(&self) -> usize {
        *self.nodes.last().unwrap()
    }
}

/// `⊗` of the edge weights along `nodes`; `1` for a single node.
pub fn eval_path<S: Semiring>(sr: &S, g: &WeightedGraph<S::Value>, nodes: &[usize]) -> Result<S::Value> {
    let mut acc = sr.one();
    for pair in nodes.windows(2) {
        let w = g.weight(pair[0], pair[1]).ok_or(Error::NotAPath(pair[0], pair[1]))?;
        acc = sr.times(&acc, w);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Boolean, Tropical};

    fn fig1() -> WeightedGraph<f64> {
        // Node k of the figure is id k-1.
        let e = [
            (1, 8),
            (8, 7),
            (9, 8),
            (9, 1),
            (9, 4),
            (9, 10),
            (2, 3),
            (2, 8),
            (10, 2),
            (3, 10),
            (6, 9),
            (6, 4),
            (7, 5),
            (7, 6),
            (5, 6),
        ];
        WeightedGraph::from_edges(&Tropical, 10, e.iter().map(|&(u, v)| (u - 1, v - 1, 1.0))).unwrap()
    }

    #[test]
    fn parallel_edges_merge() {
        let g = WeightedGraph::from_edges(&Tropical, 3, vec![(1, 2, 4.0), (1, 2, 2.5)]).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(*g.weight(1, 2).unwrap(), 2.5);
    }

    #[test]
    fn out_of_range_rejected() {
        let r = WeightedGraph::from_edges(&Boolean, 2, vec![(0, 2, true)]);
        assert_eq!(r.unwrap_err(), Error::IndexOutOfRange { index: 2, limit: 2 });
    }

    #[test]
    fn single_node_path_is_one() {
        let g = fig1();
        assert_eq!(eval_path(&Tropical, &g, &[3]).unwrap(), 0.0);
    }

    #[test]
    fn unit_path_weight() {
        let g = fig1();
        assert_eq!(eval_path(&Tropical, &g, &[0, 7, 6, 4]).unwrap(), 3.0);
        assert_eq!(eval_path(&Tropical, &g, &[0, 4]), Err(Error::NotAPath(0, 4)));
    }

    #[test]
    fn set_weight_requires_edge() {
        let mut g = fig1();
        assert!(g.set_weight(0, 7, 2.0).is_ok());
        assert_eq!(g.set_weight(0, 1, 2.0), Err(Error::UnknownEdge(0, 1)));
    }
}
