use super::*;
use crate::graph::{eval_path, generate_tw_bounded};
use crate::oracles::{fw_all_pairs, restricted_closure};
use crate::semiring::{Boolean, FlowFunction, FlowSemiring, MeetMode, Tropical};
use crate::treedec::tests::demo;
use crate::treedec::{balance_td, build_td, make_semi_nice, Heuristic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn demo_index() -> TdIndex<Tropical> {
    let (n, edges, td) = demo();
    let g = WeightedGraph::from_edges(&Tropical, n, edges.iter().map(|&(u, v)| (u, v, 1.0))).unwrap();
    TdIndex::preprocess(Tropical, g, make_semi_nice(&td).unwrap()).unwrap()
}

fn balanced<W: Clone>(g: &WeightedGraph<W>) -> TreeDecomposition {
    let td = build_td(g.n(), g.edges(), None, Heuristic::Auto).unwrap();
    balance_td(&td).unwrap()
}

/// Oracle for one bag: paths whose inner nodes are introduced below `b` and
/// whose edges belong below `b`, plus the empty path at the introducing bag.
fn u_shaped_oracle<S: Semiring + Clone>(idx: &TdIndex<S>, b: usize) -> Vec<Vec<S::Value>> {
    let td = idx.td();
    let g = idx.graph();
    let below = |x: usize| td.is_ancestor(b, x);
    let mid: Vec<bool> = (0..g.n()).map(|u| below(td.home(u).unwrap())).collect();
    let edges: Vec<_> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| below(td.edge_bag(u, v).unwrap()))
        .map(|(id, &(u, v))| (u, v, g.edge_weight(id).clone()))
        .collect();
    let sr = idx.semiring();
    let mut d = restricted_closure(sr, g.n(), &edges, &mid).unwrap();
    for &u in td.bag(b) {
        if td.home(u) == Some(b) {
            d[u][u] = sr.plus(&sr.one(), &d[u][u]);
        }
    }
    d
}

#[test]
fn demo_unit_weights() {
    let idx = demo_index();
    assert_eq!(idx.query_pair(0, 4).unwrap(), 3.0);
    let (w, path) = idx.query_witness(0, 4).unwrap();
    assert_eq!(w, 3.0);
    assert_eq!(eval_path(&Tropical, idx.graph(), &path.nodes).unwrap(), 3.0);
    assert_eq!(path.source(), 0);
    assert_eq!(path.target(), 4);
}

#[test]
fn self_query_is_one() {
    let idx = demo_index();
    for u in 0..10 {
        assert_eq!(idx.query_pair(u, u).unwrap(), 0.0);
        let (_, p) = idx.query_witness(u, u).unwrap();
        assert!(p.is_empty());
    }
}

#[test]
fn unreachable_pair_has_no_witness() {
    let idx = demo_index();
    // Node 4 of the figure has no outgoing edges.
    assert!(idx.query_pair(3, 0).unwrap().is_infinite());
    assert_eq!(idx.query_witness(3, 0).unwrap_err(), Error::NoPath(3, 0));
}

#[test]
fn witness_unsupported_for_flow() {
    let sr = FlowSemiring::new(1, MeetMode::Union).unwrap();
    let g = WeightedGraph::from_edges(&sr, 2, vec![(0, 1, FlowFunction::identity(1))]).unwrap();
    let td = balanced(&g);
    let idx = TdIndex::preprocess(sr, g, td).unwrap();
    assert!(matches!(idx.query_witness(0, 1), Err(Error::Unsupported(_))));
}

#[test]
fn rejects_non_semi_nice() {
    let (n, edges, td) = demo();
    let g = WeightedGraph::from_edges(&Boolean, n, edges.iter().map(|&(u, v)| (u, v, true))).unwrap();
    assert!(matches!(
        TdIndex::preprocess(Boolean, g, td),
        Err(Error::InvalidDecomposition(_))
    ));
}

#[test]
fn edgeless_graph() {
    let g = WeightedGraph::from_edges(&Boolean, 4, Vec::new()).unwrap();
    let idx = TdIndex::preprocess(Boolean, g.clone(), balanced(&g)).unwrap();
    for b in 0..idx.td().num_bags() {
        for &u in idx.td().bag(b) {
            for &v in idx.td().bag(b) {
                let want = u == v && idx.td().home(u) == Some(b);
                assert_eq!(*idx.local_distance(b, u, v).unwrap(), want);
            }
        }
    }
}

#[test]
fn random_graphs_match_kleene() {
    for seed in 0..40 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..30);
        let t = rng.gen_range(1..4);
        let gen = generate_tw_bounded(&Tropical, n, t, seed, |r| r.gen_range(0..10) as f64).unwrap();
        let idx = TdIndex::preprocess(Tropical, gen.graph.clone(), balanced(&gen.graph)).unwrap();
        let fw = fw_all_pairs(&Tropical, &gen.graph).unwrap();
        for u in 0..n {
            for v in 0..n {
                assert_eq!(idx.query_pair(u, v).unwrap(), fw[u][v], "seed {seed}: {u}->{v}");
                if fw[u][v].is_finite() {
                    let (_, p) = idx.query_witness(u, v).unwrap();
                    assert_eq!(eval_path(&Tropical, &gen.graph, &p.nodes).unwrap(), fw[u][v]);
                }
            }
        }
    }
}

#[test]
fn tables_match_u_shaped_oracle() {
    for seed in 0..15 {
        let gen = generate_tw_bounded(&Tropical, 10, 3, seed, |r| r.gen_range(0..5) as f64).unwrap();
        let idx = TdIndex::preprocess(Tropical, gen.graph.clone(), balanced(&gen.graph)).unwrap();
        for b in 0..idx.td().num_bags() {
            let oracle = u_shaped_oracle(&idx, b);
            for &u in idx.td().bag(b) {
                for &v in idx.td().bag(b) {
                    assert_eq!(
                        *idx.local_distance(b, u, v).unwrap(),
                        oracle[u][v],
                        "seed {seed} bag {b} {u}->{v}"
                    );
                }
            }
        }
    }
}

#[test]
fn flow_tables_match_u_shaped_oracle() {
    let sr = FlowSemiring::new(3, MeetMode::Union).unwrap();
    for seed in 0..10 {
        let gen = generate_tw_bounded(&sr, 9, 2, seed, |r| {
            let gen: Vec<usize> = (0..3).filter(|_| r.gen_bool(0.3)).collect();
            let kill: Vec<usize> = (0..3).filter(|_| r.gen_bool(0.3)).collect();
            FlowFunction::gen_kill(3, &gen, &kill)
        })
        .unwrap();
        let idx = TdIndex::preprocess(sr.clone(), gen.graph.clone(), balanced(&gen.graph)).unwrap();
        for b in 0..idx.td().num_bags() {
            let oracle = u_shaped_oracle(&idx, b);
            for &u in idx.td().bag(b) {
                for &v in idx.td().bag(b) {
                    assert!(sr.eq(idx.local_distance(b, u, v).unwrap(), &oracle[u][v]));
                }
            }
        }
        let fw = fw_all_pairs(&sr, &gen.graph).unwrap();
        for u in 0..9 {
            for v in 0..9 {
                assert!(
                    sr.eq(&idx.query_pair(u, v).unwrap(), &fw[u][v]),
                    "seed {seed}: {u}->{v}"
                );
            }
        }
    }
}

#[test]
fn updates_match_rebuild() {
    let gen = generate_tw_bounded(&Tropical, 40, 3, 9, |r| r.gen_range(1..10) as f64).unwrap();
    let mut idx = TdIndex::preprocess(Tropical, gen.graph.clone(), balanced(&gen.graph)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let (u, v) = gen.graph.edges()[rng.gen_range(0..gen.graph.m())];
        idx.update(u, v, rng.gen_range(0..20) as f64).unwrap();
        let fresh = TdIndex::preprocess(Tropical, idx.graph().clone(), idx.td().clone()).unwrap();
        assert!(idx.same_tables(&fresh));
        let (a, b) = (rng.gen_range(0..40), rng.gen_range(0..40));
        assert_eq!(idx.query_pair(a, b).unwrap(), fresh.query_pair(a, b).unwrap());
    }
}

#[test]
fn update_same_weight_is_idempotent() {
    let mut idx = demo_index();
    let before = idx.clone();
    idx.update(0, 7, 1.0).unwrap();
    assert!(idx.same_tables(&before));
    assert_eq!(idx.update(0, 1, 1.0), Err(Error::UnknownEdge(0, 1)));
}

#[test]
fn negative_cycle_update_rolls_back() {
    let g = WeightedGraph::from_edges(&Tropical, 3, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
    let mut idx = TdIndex::preprocess(Tropical, g.clone(), balanced(&g)).unwrap();
    let before = idx.clone();
    assert_eq!(idx.update(2, 0, -5.0), Err(Error::NegativeCycle));
    assert!(idx.same_tables(&before));
    assert_eq!(*idx.graph().weight(2, 0).unwrap(), 1.0);
}

#[test]
fn sequential_matches_parallel() {
    let gen = generate_tw_bounded(&Tropical, 200, 3, 5, |r| r.gen_range(1..10) as f64).unwrap();
    let td = balanced(&gen.graph);
    let a = TdIndex::preprocess_with(Tropical, gen.graph.clone(), td.clone(), Exec::Auto).unwrap();
    let b = TdIndex::preprocess_with(Tropical, gen.graph.clone(), td, Exec::Sequential).unwrap();
    assert!(a.same_tables(&b));
}

#[test]
fn query_ops_scale_with_height() {
    let gen = generate_tw_bounded(&Boolean, 500, 2, 1, |_| true).unwrap();
    let idx = TdIndex::preprocess(Boolean, gen.graph.clone(), balanced(&gen.graph)).unwrap();
    let width = idx.td().width() as u64 + 1;
    let cap = 64 * (idx.td().height() as u64 + 1) * width * width;
    for (u, v) in [(0, 499), (17, 250), (400, 3)] {
        let out = idx.query_traced(u, v).unwrap();
        assert!(out.tally.total() <= cap, "{} > {cap}", out.tally.total());
    }
}
