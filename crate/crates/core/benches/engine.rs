//! Parallel against sequential preprocessing and batch queries.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treepath::dynamic::TdIndex;
use treepath::graph::generate_tw_bounded;
use treepath::par::Exec;
use treepath::rsm::{generate_rsm, Bound, RsmEngine, RsmGenOptions, RsmOptions};
use treepath::semiring::Tropical;
use treepath::treedec::{balance_td, build_td, Heuristic};

fn preprocess(c: &mut Criterion) {
    let mut group = c.benchmark_group("preprocess");
    for n in [1 << 10, 1 << 13] {
        let g = generate_tw_bounded(&Tropical, n, 3, 1, |r| r.gen_range(1..=10) as f64)
            .unwrap()
            .graph;
        let td = balance_td(&build_td(n, g.edges(), None, Heuristic::Auto).unwrap()).unwrap();
        for (name, exec) in [("parallel", Exec::Auto), ("sequential", Exec::Sequential)] {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| TdIndex::preprocess_with(Tropical, g.clone(), td.clone(), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn query_batch(c: &mut Criterion) {
    let n = 1 << 12;
    let g = generate_tw_bounded(&Tropical, n, 3, 2, |r| r.gen_range(1..=10) as f64)
        .unwrap()
        .graph;
    let td = balance_td(&build_td(n, g.edges(), None, Heuristic::Auto).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pairs: Vec<(usize, usize)> = (0..4096).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    let mut group = c.benchmark_group("query_batch");
    for (name, exec) in [("parallel", Exec::Auto), ("sequential", Exec::Sequential)] {
        let idx = TdIndex::preprocess_with(Tropical, g.clone(), td.clone(), exec).unwrap();
        group.bench_function(name, |b| b.iter(|| black_box(idx.query_batch(&pairs))));
    }
    group.finish();
}

fn rsm_build(c: &mut Criterion) {
    let opts = RsmGenOptions {
        components: 16,
        max_nodes: 400,
        max_boxes: 3,
        treewidth: 3,
        self_calls: true,
    };
    let rsm = generate_rsm(&Tropical, &opts, 4, |r| r.gen_range(1..=10) as f64).unwrap();
    let mut group = c.benchmark_group("rsm_distance");
    group.sample_size(20);
    for (name, exec) in [("parallel", Exec::Auto), ("sequential", Exec::Sequential)] {
        let ropts = RsmOptions {
            exec,
            ..RsmOptions::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| {
                let mut e = RsmEngine::build(Tropical, rsm.clone(), &ropts).unwrap();
                e.rsm_distance(Bound::Height(16)).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, preprocess, query_batch, rsm_build);
criterion_main!(benches);
