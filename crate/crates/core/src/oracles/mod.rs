//! Independent reference computations used to check the engines.

mod exploded;

pub use exploded::{
    eval_execution, exploded_distance, exploded_from, exploded_from_capped, exploded_saturated, saturation_height,
    DEFAULT_CONFIG_CAP,
};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::semiring::Semiring;

/// Nodes reachable from `src` by depth-first search.
pub fn dfs_reachable<W: Clone>(g: &WeightedGraph<W>, src: usize) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![src];
    seen[src] = true;
    while let Some(u) = stack.pop() {
        for (v, _) in g.successors(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Single-source distances by `n` rounds of edge relaxation; a change in an
/// extra round reports `NegativeCycle` (an improving cycle).
pub fn bellman_ford<S: Semiring>(sr: &S, g: &WeightedGraph<S::Value>, src: usize) -> Result<Vec<S::Value>> {
    let n = g.n();
    let mut dist = vec![sr.zero(); n];
    dist[src] = sr.one();
    for round in 0..=n {
        let mut changed = false;
        for (id, &(u, v)) in g.edges().iter().enumerate() {
            if sr.is_zero(&dist[u]) {
                continue;
            }
            let cand = sr.plus(&dist[v], &sr.times(&dist[u], g.edge_weight(id)));
            if !sr.eq(&cand, &dist[v]) {
                dist[v] = cand;
                changed = true;
            }
        }
        if !changed {
            return Ok(dist);
        }
        if round == n {
            return Err(Error::NegativeCycle);
        }
    }
    Ok(dist)
}

/// All-pairs distances by Kleene elimination over the semiring.
pub fn fw_all_pairs<S: Semiring>(sr: &S, g: &WeightedGraph<S::Value>) -> Result<Vec<Vec<S::Value>>> {
    let mut d = restricted_closure(sr, g.n(), &weighted_edges(g), &vec![true; g.n()])?;
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = sr.plus(&sr.one(), &row[i]);
    }
    Ok(d)
}

fn weighted_edges<W: Clone>(g: &WeightedGraph<W>) -> Vec<(usize, usize, W)> {
    g.edges()
        .iter()
        .enumerate()
        .map(|(id, &(u, v))| (u, v, g.edge_weight(id).clone()))
        .collect()
}

/// `⊕` over paths of length at least one whose intermediate nodes all satisfy
/// `mid`; endpoints are unrestricted.
pub fn restricted_closure<S: Semiring>(
    sr: &S,
    n: usize,
    edges: &[(usize, usize, S::Value)],
    mid: &[bool],
) -> Result<Vec<Vec<S::Value>>> {
    let mut d = vec![vec![sr.zero(); n]; n];
    for (u, v, w) in edges {
        d[*u][*v] = sr.plus(&d[*u][*v], w);
    }
    for k in (0..n).filter(|&k| mid[k]) {
        let loop_k = sr.star(&d[k][k])?;
        let col: Vec<S::Value> = (0..n).map(|i| sr.times(&d[i][k], &loop_k)).collect();
        let row = d[k].clone();
        for i in 0..n {
            if sr.is_zero(&col[i]) {
                continue;
            }
            for j in 0..n {
                if sr.is_zero(&row[j]) {
                    continue;
                }
                let via = sr.times(&col[i], &row[j]);
                d[i][j] = sr.plus(&d[i][j], &via);
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Boolean, Tropical};

    fn chain() -> WeightedGraph<f64> {
        WeightedGraph::from_edges(&Tropical, 4, vec![(0, 1, 2.0), (1, 2, -1.0), (0, 2, 3.0), (2, 0, 4.0)]).unwrap()
    }

    #[test]
    fn fw_agrees_with_bellman_ford() {
        let g = chain();
        let fw = fw_all_pairs(&Tropical, &g).unwrap();
        for s in 0..4 {
            let bf = bellman_ford(&Tropical, &g, s).unwrap();
            for t in 0..4 {
                assert_eq!(fw[s][t], bf[t], "{s}->{t}");
            }
        }
    }

    #[test]
    fn negative_cycle_reported_by_both() {
        let g = WeightedGraph::from_edges(&Tropical, 2, vec![(0, 1, 1.0), (1, 0, -2.0)]).unwrap();
        assert_eq!(bellman_ford(&Tropical, &g, 0), Err(Error::NegativeCycle));
        assert_eq!(fw_all_pairs(&Tropical, &g).unwrap_err(), Error::NegativeCycle);
    }

    #[test]
    fn reachability_matches_boolean_closure() {
        let g = chain().map_weights(|_| true);
        let fw = fw_all_pairs(&Boolean, &g).unwrap();
        for s in 0..4 {
            let seen = dfs_reachable(&g, s);
            for t in 0..4 {
                assert_eq!(fw[s][t], seen[t]);
            }
        }
    }
}
