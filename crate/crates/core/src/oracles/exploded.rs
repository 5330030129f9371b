//! Brute-force RSM distances over explicitly materialized configurations.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::rsm::{Config, NodeKind, Rsm};
use crate::semiring::Semiring;

/// Default bound on materialized configurations.
pub const DEFAULT_CONFIG_CAP: usize = 2_000_000;

/// The configuration graph reachable from one start configuration.
struct Exploded<W> {
    configs: Vec<Config>,
    succ: Vec<Vec<(usize, W)>>,
}

/// `⊕` of the parallel edges `u -> v` of component `c`, if any.
fn edge_sum<S: Semiring>(sr: &S, rsm: &Rsm<S::Value>, c: usize, u: usize, v: usize) -> Option<S::Value> {
    rsm.component(c)
        .edges()
        .iter()
        .filter(|(a, b, _)| *a == u && *b == v)
        .map(|(_, _, w)| w.clone())
        .reduce(|a, b| sr.plus(&a, &b))
}

/// Successors of a configuration under internal, entry and return steps.
fn steps<S: Semiring>(sr: &S, rsm: &Rsm<S::Value>, at: &Config, h: usize) -> Vec<(Config, S::Value)> {
    let comp = rsm.component(at.csm);
    let mut out = Vec::new();
    for (u, v, w) in comp.edges() {
        if *u == at.node {
            out.push((
                Config {
                    csm: at.csm,
                    node: *v,
                    stack: at.stack.clone(),
                },
                w.clone(),
            ));
        }
    }
    match comp.kind(at.node) {
        NodeKind::Call(b) if at.stack.len() < h => {
            let callee = rsm.box_site(b).callee;
            let mut stack = at.stack.clone();
            stack.push(b);
            out.push((
                Config {
                    csm: callee,
                    node: rsm.component(callee).entry(),
                    stack,
                },
                sr.one(),
            ));
        }
        NodeKind::Exit => {
            if let Some((&b, rest)) = at.stack.split_last() {
                let site = rsm.box_site(b);
                out.push((
                    Config {
                        csm: site.owner,
                        node: site.ret,
                        stack: rest.to_vec(),
                    },
                    sr.one(),
                ));
            }
        }
        _ => {}
    }
    out
}

fn explore<S: Semiring>(
    sr: &S,
    rsm: &Rsm<S::Value>,
    start: Config,
    h: usize,
    cap: usize,
) -> Result<Exploded<S::Value>> {
    let mut ids: HashMap<Config, usize> = HashMap::new();
    let mut configs = vec![start.clone()];
    let mut succ: Vec<Vec<(usize, S::Value)>> = vec![Vec::new()];
    ids.insert(start, 0);
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for (next, w) in steps(sr, rsm, &configs[i], h) {
            let j = match ids.get(&next) {
                Some(&j) => j,
                None => {
                    if configs.len() >= cap {
                        return Err(Error::ResourceCap(format!("more than {cap} configurations")));
                    }
                    let j = configs.len();
                    ids.insert(next.clone(), j);
                    configs.push(next);
                    succ.push(Vec::new());
                    queue.push_back(j);
                    j
                }
            };
            succ[i].push((j, w));
        }
    }
    Ok(Exploded { configs, succ })
}

/// Distances from `(u, [])` in component `c` to every `(v, [])` of the same
/// component, over executions whose stack never exceeds `h`.
pub fn exploded_from<S: Semiring>(sr: &S, rsm: &Rsm<S::Value>, h: usize, c: usize, u: usize) -> Result<Vec<S::Value>> {
    exploded_from_capped(sr, rsm, h, c, u, DEFAULT_CONFIG_CAP)
}

pub fn exploded_from_capped<S: Semiring>(
    sr: &S,
    rsm: &Rsm<S::Value>,
    h: usize,
    c: usize,
    u: usize,
    cap: usize,
) -> Result<Vec<S::Value>> {
    let start = Config {
        csm: c,
        node: u,
        stack: Vec::new(),
    };
    let g = explore(sr, rsm, start, h, cap)?;
    let n = g.configs.len();
    let mut dist = vec![sr.zero(); n];
    dist[0] = sr.one();
    let mut queued = vec![false; n];
    let mut queue = VecDeque::from([0]);
    queued[0] = true;
    let edges: usize = g.succ.iter().map(Vec::len).sum();
    let budget = (n + 1) * (edges + 1) * sr.chain_factor().max(1);
    let mut work = 0usize;
    while let Some(i) = queue.pop_front() {
        queued[i] = false;
        work += 1;
        if work > budget {
            return Err(Error::NonTermination(budget));
        }
        for (j, w) in &g.succ[i] {
            let cand = sr.plus(&dist[*j], &sr.times(&dist[i], w));
            if !sr.eq(&cand, &dist[*j]) {
                dist[*j] = cand;
                if !queued[*j] {
                    queued[*j] = true;
                    queue.push_back(*j);
                }
            }
        }
    }
    let mut out = vec![sr.zero(); rsm.component(c).n()];
    for (cfg, d) in g.configs.iter().zip(dist) {
        if cfg.stack.is_empty() {
            out[cfg.node] = d;
        }
    }
    Ok(out)
}

/// `d((u, []), (v, []), h)` in component `c`.
pub fn exploded_distance<S: Semiring>(
    sr: &S,
    rsm: &Rsm<S::Value>,
    h: usize,
    c: usize,
    u: usize,
    v: usize,
) -> Result<S::Value> {
    Ok(exploded_from(sr, rsm, h, c, u)?.swap_remove(v))
}

/// Smallest height at which no entry-to-exit distance changes any more,
/// together with the distances from `(u, [])` at the height after it, where
/// all same-context distances have saturated.
pub fn exploded_saturated<S: Semiring>(
    sr: &S,
    rsm: &Rsm<S::Value>,
    c: usize,
    u: usize,
    max_h: usize,
) -> Result<(usize, Vec<S::Value>)> {
    let h = saturation_height(sr, rsm, max_h)?;
    Ok((h, exploded_from(sr, rsm, h + 1, c, u)?))
}

/// Smallest `h` with equal entry-to-exit summaries at heights `h` and `h + 1`.
pub fn saturation_height<S: Semiring>(sr: &S, rsm: &Rsm<S::Value>, max_h: usize) -> Result<usize> {
    let summaries = |h: usize| -> Result<Vec<S::Value>> {
        (0..rsm.num_components())
            .map(|c| {
                let comp = rsm.component(c);
                exploded_distance(sr, rsm, h, c, comp.entry(), comp.exit())
            })
            .collect()
    };
    let mut prev = summaries(0)?;
    for h in 0..max_h {
        let next = summaries(h + 1)?;
        if prev.iter().zip(&next).all(|(a, b)| sr.eq(a, b)) {
            return Ok(h);
        }
        prev = next;
    }
    Err(Error::NonTermination(max_h))
}

/// `⊗` along an execution path, checking that every step is an internal,
/// entry or return step.
pub fn eval_execution<S: Semiring>(sr: &S, rsm: &Rsm<S::Value>, path: &[Config]) -> Result<S::Value> {
    let mut acc = sr.one();
    for pair in path.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let invalid = || Error::Structure(format!("invalid step {a:?} -> {b:?}"));
        if a.csm >= rsm.num_components() || b.csm >= rsm.num_components() {
            return Err(invalid());
        }
        let comp = rsm.component(a.csm);
        if a.stack == b.stack && a.csm == b.csm {
            let w = edge_sum(sr, rsm, a.csm, a.node, b.node).ok_or_else(invalid)?;
            acc = sr.times(&acc, &w);
            continue;
        }
        match comp.kind(a.node) {
            NodeKind::Call(bx)
                if b.stack.len() == a.stack.len() + 1
                    && b.stack[..a.stack.len()] == a.stack[..]
                    && b.stack.last() == Some(&bx)
                    && b.csm == rsm.box_site(bx).callee
                    && b.node == rsm.component(b.csm).entry() => {}
            NodeKind::Exit
                if a.stack.len() == b.stack.len() + 1
                    && a.stack[..b.stack.len()] == b.stack[..]
                    && rsm.box_site(*a.stack.last().unwrap()).callee == a.csm
                    && rsm.box_site(*a.stack.last().unwrap()).owner == b.csm
                    && rsm.box_site(*a.stack.last().unwrap()).ret == b.node => {}
            _ => return Err(invalid()),
        }
    }
    Ok(acc)
}
