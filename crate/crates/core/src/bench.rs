//! Operation-count and wall-time sweeps comparing the engine with the
//! all-pairs and per-query baselines.
//!
//! CSV columns: `instance,n,t,phase,wall_us,semiring_ops`. Per-query and
//! per-update phases report means.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamic::TdIndex;
use crate::error::Result;
use crate::graph::{generate_tw_bounded, WeightedGraph};
use crate::oracles::{bellman_ford, dfs_reachable, fw_all_pairs};
use crate::par::Exec;
use crate::rsm::PairIndex;
use crate::semiring::{Boolean, Counting, Semiring, Tropical};
use crate::treedec::{balance_td, build_td, Heuristic};

pub const CSV_HEADER: &str = "instance,n,t,phase,wall_us,semiring_ops";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchSemiring {
    Bool,
    Trop,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub t: usize,
    pub seed: u64,
    pub semiring: BenchSemiring,
    pub queries: usize,
    pub updates: usize,
    /// Largest `n` for the cubic all-pairs baseline.
    pub complete_limit: usize,
    /// Queries answered by the no-preprocessing baseline per instance.
    pub baseline_queries: usize,
    pub exec: Exec,
    /// Independent instances drawn per size.
    pub instances: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            sizes: (6..=12).map(|k| 1 << k).collect(),
            t: 2,
            seed: 1,
            semiring: BenchSemiring::Trop,
            queries: 200,
            updates: 50,
            complete_limit: 1024,
            baseline_queries: 20,
            exec: Exec::Auto,
            instances: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub t: usize,
    pub phase: String,
    pub wall_us: f64,
    pub semiring_ops: f64,
    /// Height of the balanced decomposition, for per-height ratios.
    pub height: usize,
}

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{:.1},{:.1}",
            self.instance, self.n, self.t, self.phase, self.wall_us, self.semiring_ops
        )
    }
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    let per = cfg.instances.max(1);
    for (i, &n) in cfg.sizes.iter().enumerate() {
        for j in 0..per {
            let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add((i * per + j) as u64);
            match cfg.semiring {
                BenchSemiring::Bool => sweep_one(Boolean, cfg, n, seed, |_| true, &mut rows)?,
                BenchSemiring::Trop => sweep_one(Tropical, cfg, n, seed, |r| r.gen_range(1..=10) as f64, &mut rows)?,
            }
        }
    }
    Ok(rows)
}

fn micros(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e6
}

fn sweep_one<S, F>(sr: S, cfg: &SweepConfig, n: usize, seed: u64, mut sample: F, rows: &mut Vec<BenchRow>) -> Result<()>
where
    S: Semiring + Clone,
    F: FnMut(&mut ChaCha8Rng) -> S::Value,
{
    let instance = format!("{}_t{}_n{}_s{}", sr.name(), cfg.t, n, seed);
    let gen = generate_tw_bounded(&sr, n, cfg.t, seed, &mut sample)?;
    let graph = gen.graph;
    let mut push = |phase: &str, wall_us: f64, ops: f64, height: usize| {
        rows.push(BenchRow {
            instance: instance.clone(),
            n,
            t: cfg.t,
            phase: phase.to_string(),
            wall_us,
            semiring_ops: ops,
            height,
        });
    };

    let start = Instant::now();
    let td = balance_td(&build_td(n, graph.edges(), None, Heuristic::Auto)?)?;
    let height = td.height();
    push("ours_decompose", micros(start), 0.0, height);

    let start = Instant::now();
    let mut idx = TdIndex::preprocess_with(sr.clone(), graph.clone(), td, cfg.exec)?;
    push("ours_preprocess", micros(start), idx.ops().total() as f64, height);

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let pairs: Vec<(usize, usize)> = (0..cfg.queries)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    let q = pairs.len().max(1) as f64;

    idx.reset_ops();
    let start = Instant::now();
    for &(u, v) in &pairs {
        idx.query_pair(u, v)?;
    }
    push("ours_query", micros(start) / q, idx.ops().total() as f64 / q, height);

    let start = Instant::now();
    let pidx = PairIndex::build(&idx);
    push(
        "ours_const_build",
        micros(start),
        pidx.build_ops().total() as f64,
        height,
    );
    let mut ops = 0;
    let start = Instant::now();
    for &(u, v) in &pairs {
        ops += pidx.query_counted(u, v)?.1.total();
    }
    push("ours_const_query", micros(start) / q, ops as f64 / q, height);
    let sources = &pairs[..pairs.len().min(cfg.baseline_queries)];
    let s = sources.len().max(1) as f64;
    let mut ops = 0;
    let start = Instant::now();
    for &(u, _) in sources {
        ops += pidx.single_source_counted(u)?.1.total();
    }
    push("ours_single_source", micros(start) / s, ops as f64 / s, height);

    if graph.m() > 0 && cfg.updates > 0 {
        idx.reset_ops();
        let start = Instant::now();
        for _ in 0..cfg.updates {
            let (u, v) = graph.edges()[rng.gen_range(0..graph.m())];
            let w = sample(&mut rng);
            idx.update(u, v, w)?;
        }
        let k = cfg.updates as f64;
        push("ours_update", micros(start) / k, idx.ops().total() as f64 / k, height);
    }

    if n <= cfg.complete_limit {
        let counted = Counting::new(sr.clone());
        let start = Instant::now();
        fw_all_pairs(&counted, &graph)?;
        push("complete_preprocess", micros(start), counted.ops() as f64, height);
        push("complete_query", 0.0, 0.0, height);
    }

    let counted = Counting::new(sr.clone());
    let start = Instant::now();
    for &(u, _) in sources {
        bellman_ford(&counted, &graph, u)?;
    }
    push("none_bellman_ford", micros(start) / s, counted.ops() as f64 / s, height);

    let start = Instant::now();
    let mut scanned = 0usize;
    for &(u, _) in sources {
        scanned += dfs_scanned(&graph, u);
    }
    push("none_dfs", micros(start) / s, scanned as f64 / s, height);
    Ok(())
}

/// Edges examined by a reachability search from `src`, the DFS counterpart
/// of one semiring operation per relaxation.
fn dfs_scanned<W: Clone>(g: &WeightedGraph<W>, src: usize) -> usize {
    let seen = dfs_reachable(g, src);
    (0..g.n()).filter(|&u| seen[u]).map(|u| g.successors(u).count()).sum()
}

/// Per-instance ratios behind the complexity bounds, maximized over a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// Preprocessing ops per node.
    pub c1: f64,
    /// Update ops per level of the decomposition.
    pub c2: f64,
    /// Pair-query ops per level of the decomposition.
    pub c3: f64,
    /// Fit of mean pair-query ops per size against `log2 n`: `(a, b, r²)`.
    pub query_fit: (f64, f64, f64),
}

pub fn constants(rows: &[BenchRow]) -> Constants {
    let ratio = |phase: &str, per: &dyn Fn(&BenchRow) -> f64| {
        rows.iter()
            .filter(|r| r.phase == phase)
            .map(|r| r.semiring_ops / per(r).max(1.0))
            .fold(0.0, f64::max)
    };
    let mut by_size: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for r in rows.iter().filter(|r| r.phase == "ours_query") {
        let e = by_size.entry(r.n).or_default();
        e.0 += r.semiring_ops;
        e.1 += 1;
    }
    let points: Vec<(f64, f64)> = by_size
        .iter()
        .map(|(&n, &(sum, k))| ((n.max(1) as f64).log2(), sum / k as f64))
        .collect();
    Constants {
        c1: ratio("ours_preprocess", &|r| r.n as f64),
        c2: ratio("ours_update", &|r| r.height as f64),
        c3: ratio("ours_query", &|r| r.height as f64),
        query_fit: if points.len() >= 2 {
            linear_fit(&points)
        } else {
            (0.0, 0.0, 0.0)
        },
    }
}

impl std::fmt::Display for Constants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (a, b, r2) = self.query_fit;
        write!(
            f,
            "c1={:.2} c2={:.2} c3={:.2} query_ops={:.2}*log2(n)+{:.2} r2={:.4}",
            self.c1, self.c2, self.c3, a, b, r2
        )
    }
}

/// Least-squares fit `y = a·x + b`; returns `(a, b, r²)`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let a = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let b = my - a * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (a, b, r2)
}
