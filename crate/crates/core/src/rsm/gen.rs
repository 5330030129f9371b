//! Random RSMs whose components are partial t-trees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{NodeKind, Rsm};
use crate::error::Result;
use crate::graph::generate_tw_bounded;
use crate::semiring::Semiring;

#[derive(Debug, Clone, Copy)]
pub struct RsmGenOptions {
    pub components: usize,
    /// Nodes per component, call and return nodes included, at least 4.
    pub max_nodes: usize,
    pub max_boxes: usize,
    pub treewidth: usize,
    /// Whether a box may call its own component.
    pub self_calls: bool,
}

impl Default for RsmGenOptions {
    fn default() -> Self {
        RsmGenOptions {
            components: 3,
            max_nodes: 20,
            max_boxes: 2,
            treewidth: 2,
            self_calls: true,
        }
    }
}

/// Draws an RSM. Edges that would leave an exit or call node, or enter an
/// entry or return node, are dropped from the generated graph.
pub fn generate_rsm<S, F>(sr: &S, opts: &RsmGenOptions, seed: u64, mut sample: F) -> Result<Rsm<S::Value>>
where
    S: Semiring,
    F: FnMut(&mut ChaCha8Rng) -> S::Value,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = opts.components.max(1);
    let mut rsm = Rsm::new();
    let mut plans = Vec::with_capacity(k);
    for c in 0..k {
        let boxes = rng.gen_range(0..=opts.max_boxes);
        let lo = 2 * boxes + 3;
        let n = rng.gen_range(lo..=opts.max_nodes.max(lo));
        let mut roles: Vec<usize> = (0..n).collect();
        roles.shuffle(&mut rng);
        rsm.add_component(format!("c{c}"), n, roles[0], roles[1])?;
        plans.push((n, boxes, roles));
    }
    for (c, (n, boxes, roles)) in plans.into_iter().enumerate() {
        for b in 0..boxes {
            let callee = loop {
                let x = rng.gen_range(0..k);
                if opts.self_calls || x != c || k == 1 {
                    break x;
                }
            };
            rsm.add_box_at(c, callee, roles[2 + 2 * b], roles[3 + 2 * b])?;
        }
        let gen = generate_tw_bounded(sr, n, opts.treewidth, rng.gen(), &mut sample)?;
        let comp = rsm.component(c);
        let keep: Vec<(usize, usize, S::Value)> = gen
            .graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| {
                matches!(comp.kind(u), NodeKind::Internal | NodeKind::Entry | NodeKind::Return(_))
                    && matches!(comp.kind(v), NodeKind::Internal | NodeKind::Exit | NodeKind::Call(_))
            })
            .map(|(id, &(u, v))| (u, v, gen.graph.edge_weight(id).clone()))
            .collect();
        for (u, v, w) in keep {
            rsm.add_edge(c, u, v, w)?;
        }
    }
    Ok(rsm)
}
