#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treepath::dynamic::TdIndex;
use treepath::graph::{generate_tw_bounded, WeightedGraph};
use treepath::rsm::{generate_rsm, Rsm, RsmGenOptions};
use treepath::semiring::{Boolean, Semiring, Tropical};
use treepath::treedec::{balance_td, build_td, Heuristic, TreeDecomposition};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bool_graph(n: usize, t: usize, seed: u64) -> WeightedGraph<bool> {
    generate_tw_bounded(&Boolean, n, t, seed, |_| true).unwrap().graph
}

pub fn trop_graph(n: usize, t: usize, seed: u64, lo: i32, hi: i32) -> WeightedGraph<f64> {
    generate_tw_bounded(&Tropical, n, t, seed, |r| r.gen_range(lo..=hi) as f64)
        .unwrap()
        .graph
}

pub fn balanced<W: Clone>(g: &WeightedGraph<W>) -> TreeDecomposition {
    balance_td(&build_td(g.n(), g.edges(), None, Heuristic::Auto).unwrap()).unwrap()
}

pub fn index<S: Semiring + Clone>(sr: S, g: &WeightedGraph<S::Value>) -> treepath::Result<TdIndex<S>> {
    TdIndex::preprocess(sr, g.clone(), balanced(g))
}

pub fn bool_rsm(seed: u64, opts: &RsmGenOptions) -> Rsm<bool> {
    generate_rsm(&Boolean, opts, seed, |_| true).unwrap()
}

pub fn trop_rsm(seed: u64, opts: &RsmGenOptions) -> Rsm<f64> {
    generate_rsm(&Tropical, opts, seed, |r| r.gen_range(0..=10) as f64).unwrap()
}

/// Exact equality of tropical values, infinities included.
pub fn same_f64(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}
