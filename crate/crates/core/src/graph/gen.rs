//! Random graphs of bounded treewidth built from partial t-trees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::WeightedGraph;
use crate::error::Result;
use crate::semiring::Semiring;
use crate::treedec::TreeDecomposition;

#[derive(Debug, Clone, Copy)]
pub struct GenOptions {
    /// Probability of each direction of each bag-local pair becoming an edge.
    pub edge_prob: f64,
    pub self_loop_prob: f64,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            edge_prob: 0.5,
            self_loop_prob: 0.0,
        }
    }
}

/// A generated graph with a width-`t` decomposition and a matching elimination order.
#[derive(Debug, Clone)]
pub struct Generated<W> {
    pub graph: WeightedGraph<W>,
    pub td: TreeDecomposition,
    pub elimination_order: Vec<usize>,
}

pub fn generate_tw_bounded<S, F>(sr: &S, n: usize, t: usize, seed: u64, sample: F) -> Result<Generated<S::Value>>
where
    S: Semiring,
    F: FnMut(&mut ChaCha8Rng) -> S::Value,
{
    generate_tw_bounded_with(sr, n, t, seed, GenOptions::default(), sample)
}

/// Grows a random partial t-tree: each new node joins a copy of a random
/// earlier bag with one member swapped out.
pub fn generate_tw_bounded_with<S, F>(
    sr: &S,
    n: usize,
    t: usize,
    seed: u64,
    opts: GenOptions,
    mut sample: F,
) -> Result<Generated<S::Value>>
where
    S: Semiring,
    F: FnMut(&mut ChaCha8Rng) -> S::Value,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = n.min(t + 1);
    let mut bags: Vec<Vec<usize>> = vec![(0..first).collect()];
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut edges = Vec::new();

    let mut link = |a: usize, b: usize, rng: &mut ChaCha8Rng, edges: &mut Vec<(usize, usize, S::Value)>| {
        if rng.gen_bool(opts.edge_prob) {
            let w = sample(rng);
            edges.push((a, b, w));
        }
        if rng.gen_bool(opts.edge_prob) {
            let w = sample(rng);
            edges.push((b, a, w));
        }
    };
    for a in 0..first {
        for b in a + 1..first {
            link(a, b, &mut rng, &mut edges);
        }
    }
    for v in first..n {
        let host = rng.gen_range(0..bags.len());
        let mut bag = bags[host].clone();
        if bag.len() > t {
            let drop = rng.gen_range(0..bag.len());
            bag.remove(drop);
        }
        let mut members = bag.clone();
        members.shuffle(&mut rng);
        for &u in &members {
            link(v, u, &mut rng, &mut edges);
        }
        bag.push(v);
        bags.push(bag);
        parent.push(Some(host));
    }
    if opts.self_loop_prob > 0.0 {
        for v in 0..n {
            if rng.gen_bool(opts.self_loop_prob) {
                let w = sample(&mut rng);
                edges.push((v, v, w));
            }
        }
    }
    let graph = WeightedGraph::from_edges(sr, n, edges)?;
    let td = TreeDecomposition::from_parents(n, bags, parent)?;
    Ok(Generated {
        graph,
        td,
        elimination_order: (0..n).rev().collect(),
    })
}
