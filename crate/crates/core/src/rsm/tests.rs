use super::*;
use crate::graph::eval_path;
use crate::oracles::{eval_execution, exploded_from, exploded_saturated};
use crate::semiring::{Boolean, FlowFunction, FlowSemiring, MeetMode, Tropical};
use crate::treedec::parse_td;
use rand::Rng;

const DOT: &str = include_str!("../../../../data/dot.rsm");
const DOT_VECTOR_TD: &str = include_str!("../../../../data/dot_vector.td");
const DOT_MATRIX_TD: &str = include_str!("../../../../data/dot_matrix.td");

fn dot_engine() -> RsmEngine<Boolean> {
    let src = parse_rsm(DOT, &Boolean).unwrap();
    let tds = [DOT_VECTOR_TD, DOT_MATRIX_TD]
        .iter()
        .map(|t| Some(parse_td(t).unwrap().into_td().unwrap()))
        .collect();
    let opts = RsmOptions {
        prep: Prep::AsGiven,
        tds,
        ..RsmOptions::default()
    };
    RsmEngine::build(Boolean, src.rsm, &opts).unwrap()
}

fn loc(e: &RsmEngine<Boolean>, c: &str, u: &str) -> Loc {
    let c = e.rsm().find_component(c).unwrap();
    Loc::new(c, e.rsm().resolve_node(c, u).unwrap())
}

/// True entries `(u, v)` with `u != v` of a bag table, by node name.
fn entries(e: &RsmEngine<Boolean>, c: usize, b: usize) -> Vec<(String, String)> {
    let idx = e.index(c);
    let comp = e.rsm().component(c);
    let mut out = Vec::new();
    for &u in idx.td().bag(b) {
        for &v in idx.td().bag(b) {
            if u != v && *idx.local_distance(b, u, v).unwrap() {
                out.push((comp.label(u), comp.label(v)));
            }
        }
    }
    out.sort();
    out
}

fn pairs(list: &[(&str, &str)]) -> Vec<(String, String)> {
    let mut v: Vec<_> = list.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    v.sort();
    v
}

#[test]
fn dot_loads_with_call_return_edge() {
    let e = dot_engine();
    let m = e.rsm().find_component("dot_matrix").unwrap();
    let (call, ret) = (loc(&e, "dot_matrix", "4").node, loc(&e, "dot_matrix", "5").node);
    assert_eq!(e.index(m).graph().weight(call, ret), Some(&false));
    assert_eq!(e.rsm().component(m).kind(call), NodeKind::Call(0));
    assert_eq!(e.rsm().resolve_node(m, "call:b"), Some(call));
}

#[test]
fn dot_one_round_sets_the_call_edge() {
    let mut e = dot_engine();
    let v = e.rsm().find_component("dot_vector").unwrap();
    let m = e.rsm().find_component("dot_matrix").unwrap();
    assert!(e.distances()[v]);
    // 1 -> 2 -> 7 -> 8 needs no call.
    assert!(e.distances()[m]);
    // Bag 5 holds {3, 4, 5}; before the round only 5 -> 3 is known there.
    assert_eq!(entries(&e, m, 4), pairs(&[("5", "3")]));
    e.rsm_distance(Bound::Height(1)).unwrap();
    assert_eq!(e.edge_value(0), Some(&true));
    assert_eq!(entries(&e, m, 4), pairs(&[("4", "3"), ("4", "5"), ("5", "3")]));
    assert!(e.distances()[m]);
    let (a, b) = (loc(&e, "dot_vector", "1"), loc(&e, "dot_vector", "6"));
    assert!(e.same_context_pair(a, b).unwrap());
}

#[test]
fn dot_witness_expands_the_call() {
    let mut e = dot_engine();
    e.rsm_distance(Bound::Fixpoint).unwrap();
    let (a, b) = (loc(&e, "dot_matrix", "4"), loc(&e, "dot_matrix", "3"));
    let (w, nested) = e.interproc_witness(a, b).unwrap();
    assert!(w);
    assert_eq!(nested.calls.len(), 1);
    let body = &nested.calls[0].body;
    let vec_c = e.rsm().find_component("dot_vector").unwrap();
    assert_eq!(body.csm, vec_c);
    assert_eq!(body.nodes.first(), Some(&0));
    assert_eq!(body.nodes.last(), Some(&5));
    let flat = nested.flatten();
    assert!(eval_execution(&Boolean, e.rsm(), &flat).unwrap());
    assert!(flat.iter().any(|c| c.stack == vec![0]));
}

#[test]
fn different_components_are_rejected() {
    let e = dot_engine();
    let (a, b) = (loc(&e, "dot_vector", "1"), loc(&e, "dot_matrix", "1"));
    assert_eq!(e.same_context_pair(a, b), Err(Error::DifferentCsm(a.csm, b.csm)));
    assert_eq!(
        e.pair_index().pair_query_const(a, b),
        Err(Error::DifferentCsm(a.csm, b.csm))
    );
}

#[test]
fn structure_errors() {
    let bad_callee = "csm a 3 entry 0 exit 2\nbox x in a calls nowhere\n";
    assert!(matches!(parse_rsm(bad_callee, &Boolean), Err(Error::Structure(_))));
    let from_call = "csm a 3 entry 0 exit 2\nbox x in a calls a\nedge a call:x 1 1\n";
    assert!(matches!(parse_rsm(from_call, &Boolean), Err(Error::Structure(_))));
    let into_entry = "csm a 3 entry 0 exit 2\nedge a 1 0 1\n";
    assert!(matches!(parse_rsm(into_entry, &Boolean), Err(Error::Structure(_))));
    let from_exit = "csm a 3 entry 0 exit 2\nedge a 2 1 1\n";
    assert!(matches!(parse_rsm(from_exit, &Boolean), Err(Error::Structure(_))));
    let same = "csm a 3 entry 1 exit 1\n";
    assert!(matches!(parse_rsm(same, &Boolean), Err(Error::Structure(_))));
    assert!(matches!(
        parse_rsm("csm a x entry 0 exit 1\n", &Boolean),
        Err(Error::Parse { line: 1, .. })
    ));
    assert!(matches!(
        parse_rsm("csm a 3 entry 0 exit 1\nedge a 0 1 7\n", &Boolean),
        Err(Error::Parse { line: 2, .. })
    ));
}

#[test]
fn write_and_parse_round_trip() {
    let e = dot_engine();
    let text = write_rsm(e.rsm(), &Boolean);
    let again = parse_rsm(&text, &Boolean).unwrap().rsm;
    assert_eq!(again.num_components(), 2);
    for c in 0..2 {
        assert_eq!(again.component(c).edges(), e.rsm().component(c).edges());
        assert_eq!(again.component(c).entry(), e.rsm().component(c).entry());
    }
    assert_eq!(again.boxes(), e.rsm().boxes());
}

#[test]
fn box_free_rsm_matches_plain_preprocess() {
    let text = "csm a 4 entry 0 exit 3\nedge a 0 1 2\nedge a 1 2 3\nedge a 2 1 1\nedge a 1 3 9\nedge a 2 3 1\n";
    let rsm = parse_rsm(text, &Tropical).unwrap().rsm;
    let mut e = RsmEngine::new(Tropical, rsm.clone()).unwrap();
    let before: Vec<f64> = (0..4)
        .flat_map(|u| (0..4).map(move |v| (u, v)))
        .map(|(u, v)| e.same_context_pair(Loc::new(0, u), Loc::new(0, v)).unwrap())
        .collect();
    e.rsm_distance(Bound::Height(3)).unwrap();
    let fw = crate::oracles::fw_all_pairs(&Tropical, &rsm.derived_graph(&Tropical, 0).unwrap()).unwrap();
    for u in 0..4 {
        for v in 0..4 {
            let got = e.same_context_pair(Loc::new(0, u), Loc::new(0, v)).unwrap();
            assert_eq!(got, fw[u][v]);
            assert_eq!(got, before[u * 4 + v]);
        }
    }
    assert_eq!(e.distances()[0], 6.0);
}

/// A calls B calls C, each a short chain around its box.
fn chain3() -> Rsm<f64> {
    let mut rsm = Rsm::new();
    for name in ["a", "b", "c"] {
        rsm.add_component(name, 3, 0, 2).unwrap();
    }
    rsm.add_box(0, 1).unwrap();
    rsm.add_box(1, 2).unwrap();
    for c in 0..2 {
        rsm.add_edge(c, 0, 3, 1.0).unwrap();
        rsm.add_edge(c, 4, 2, 1.0).unwrap();
        rsm.add_edge(c, 0, 1, 10.0).unwrap();
        rsm.add_edge(c, 1, 2, 10.0).unwrap();
    }
    rsm.add_edge(2, 0, 1, 1.0).unwrap();
    rsm.add_edge(2, 1, 2, 1.0).unwrap();
    rsm
}

#[test]
fn chain_distance_needs_full_height() {
    let rsm = chain3();
    let mut e = RsmEngine::new(Tropical, rsm.clone()).unwrap();
    let expect = [20.0, 20.0, 6.0, 6.0];
    for h in 0..=3 {
        e.rsm_distance(Bound::Height(h)).unwrap();
        let d = e.same_context_pair(Loc::new(0, 0), Loc::new(0, 2)).unwrap();
        let oracle = exploded_from(&Tropical, &rsm, h, 0, 0).unwrap()[2];
        assert_eq!(d, oracle, "h={h}");
        assert_eq!(d, expect[h]);
    }
    let (w, nested) = e.interproc_witness(Loc::new(0, 0), Loc::new(0, 2)).unwrap();
    assert_eq!(w, 6.0);
    assert_eq!(nested.depth(), 2);
    assert_eq!(eval_execution(&Tropical, &rsm, &nested.flatten()).unwrap(), 6.0);
}

#[test]
fn random_rsms_match_exploded_oracle() {
    for seed in 0..25 {
        let opts = RsmGenOptions {
            components: 1 + seed as usize % 3,
            max_nodes: 9,
            ..RsmGenOptions::default()
        };
        let rsm = generate_rsm(&Tropical, &opts, seed, |r| r.gen_range(0..10) as f64).unwrap();
        let mut e = RsmEngine::new(Tropical, rsm.clone()).unwrap();
        for h in 0..3 {
            e.rsm_distance(Bound::Height(h)).unwrap();
            let index = e.pair_index();
            for c in 0..rsm.num_components() {
                for u in 0..rsm.component(c).n() {
                    let oracle = exploded_from(&Tropical, &rsm, h, c, u).unwrap();
                    let single = index.single_source(Loc::new(c, u)).unwrap();
                    for (v, want) in oracle.iter().enumerate() {
                        let (a, b) = (Loc::new(c, u), Loc::new(c, v));
                        assert_eq!(
                            e.same_context_pair(a, b).unwrap(),
                            *want,
                            "seed {seed} h {h} {a:?}->{b:?}"
                        );
                        assert_eq!(index.pair_query_const(a, b).unwrap(), *want);
                        assert_eq!(single[v], *want);
                        if want.is_finite() {
                            let (_, nested) = e.interproc_witness(a, b).unwrap();
                            let flat = nested.flatten();
                            assert!(flat.iter().all(|x| x.stack.len() <= h));
                            assert_eq!(eval_execution(&Tropical, &rsm, &flat).unwrap(), *want);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn boolean_fixpoint_matches_saturated_oracle() {
    for seed in 0..20 {
        let opts = RsmGenOptions {
            components: 2 + seed as usize % 2,
            max_nodes: 8,
            ..RsmGenOptions::default()
        };
        let rsm = generate_rsm(&Boolean, &opts, 100 + seed, |_| true).unwrap();
        let mut e = RsmEngine::new(Boolean, rsm.clone()).unwrap();
        e.rsm_distance(Bound::Fixpoint).unwrap();
        assert!(e.level() <= e.round_cap());
        for c in 0..rsm.num_components() {
            for u in 0..rsm.component(c).n() {
                let (_, oracle) = exploded_saturated(&Boolean, &rsm, c, u, 10).unwrap();
                for (v, want) in oracle.iter().enumerate() {
                    assert_eq!(
                        e.same_context_pair(Loc::new(c, u), Loc::new(c, v)).unwrap(),
                        *want,
                        "seed {seed}"
                    );
                }
            }
        }
    }
}

#[test]
fn boolean_reachability_is_monotone_in_height() {
    let opts = RsmGenOptions {
        components: 3,
        max_nodes: 10,
        ..RsmGenOptions::default()
    };
    let rsm = generate_rsm(&Boolean, &opts, 7, |_| true).unwrap();
    let mut e = RsmEngine::new(Boolean, rsm.clone()).unwrap();
    let snapshot = |e: &RsmEngine<Boolean>| -> Vec<bool> {
        (0..rsm.num_components())
            .flat_map(|c| {
                let n = rsm.component(c).n();
                (0..n * n).map(move |i| (c, i / n, i % n))
            })
            .map(|(c, u, v)| e.same_context_pair(Loc::new(c, u), Loc::new(c, v)).unwrap())
            .collect()
    };
    let mut prev = snapshot(&e);
    for h in 1..4 {
        e.rsm_distance(Bound::Height(h)).unwrap();
        let next = snapshot(&e);
        assert!(prev.iter().zip(&next).all(|(a, b)| !a || *b));
        prev = next;
    }
}

#[test]
fn flow_fixpoint_has_no_witnesses() {
    let sr = FlowSemiring::new(2, MeetMode::Union).unwrap();
    let mut rsm = Rsm::new();
    rsm.add_component("main", 3, 0, 2).unwrap();
    rsm.add_box(0, 0).unwrap();
    rsm.add_edge(0, 0, 1, FlowFunction::gen_kill(2, &[0], &[])).unwrap();
    rsm.add_edge(0, 1, 2, FlowFunction::identity(2)).unwrap();
    rsm.add_edge(0, 1, 3, FlowFunction::gen_kill(2, &[1], &[0])).unwrap();
    rsm.add_edge(0, 4, 2, FlowFunction::identity(2)).unwrap();
    let mut e = RsmEngine::new(sr.clone(), rsm.clone()).unwrap();
    e.rsm_distance(Bound::Fixpoint).unwrap();
    let (_, oracle) = exploded_saturated(&sr, &rsm, 0, 0, 20).unwrap();
    let got = e.same_context_pair(Loc::new(0, 0), Loc::new(0, 2)).unwrap();
    assert!(sr.eq(&got, &oracle[2]));
    assert!(matches!(
        e.interproc_witness(Loc::new(0, 0), Loc::new(0, 2)),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn pair_index_in_bag_entries_match_queries() {
    let mut e = dot_engine();
    e.rsm_distance(Bound::Fixpoint).unwrap();
    let index = e.pair_index();
    for c in 0..2 {
        let part = index.part(c);
        let td = part.td();
        for b in 0..td.num_bags() {
            for &u in td.bag(b) {
                for &v in td.bag(b) {
                    let want = e.same_context_pair(Loc::new(c, u), Loc::new(c, v)).unwrap();
                    assert_eq!(*part.in_bag(b, u, v).unwrap(), want);
                }
            }
        }
        // Maps of a leaf node reach only its own bag's subtree.
        let leaf = (0..td.n_nodes())
            .find(|&u| td.children(td.home(u).unwrap()).is_empty())
            .unwrap();
        let other = (0..td.n_nodes()).find(|&v| td.home(v) != td.home(leaf)).unwrap();
        assert!(part.forward(leaf, other).is_none());
    }
    let (a, b) = (loc(&e, "dot_matrix", "2"), loc(&e, "dot_matrix", "8"));
    assert!(index.pair_query_const(a, b).unwrap());
}

#[test]
fn witness_paths_in_one_component_are_flat() {
    let e = dot_engine();
    let (a, b) = (loc(&e, "dot_vector", "1"), loc(&e, "dot_vector", "6"));
    let (_, nested) = e.interproc_witness(a, b).unwrap();
    assert!(nested.calls.is_empty());
    let g = e.index(a.csm).graph();
    assert!(eval_path(&Boolean, g, &nested.nodes).unwrap());
}
