//! Same-context path queries on recursive state machines.
//!
//! Each component gets a control-flow graph with one extra call-to-return
//! edge per box, a balanced decomposition and a [`TdIndex`]. The engine then
//! relaxes the call graph: whenever a component's entry-to-exit distance
//! changes, the call-to-return edges of the boxes invoking it are updated
//! and the callers' entry-to-exit distances re-queried. After `h` rounds the
//! indexes answer distances over executions of stack height at most `h`.

mod gen;
mod io;
mod model;
mod pair;

pub use gen::{generate_rsm, RsmGenOptions};
pub use io::{load_rsm_file, parse_rsm, write_rsm, RsmSource};
pub use model::{BoxSite, Component, Config, Loc, NodeKind, Rsm};
pub use pair::{PairIndex, PairQueryIndex};

use std::collections::BTreeSet;

use crate::dynamic::TdIndex;
use crate::error::{Error, Result};
use crate::graph::Path;
use crate::par::{self, Exec};
use crate::semiring::Semiring;
use crate::treedec::{balance_td, build_td, make_semi_nice, Heuristic, TreeDecomposition};

/// How component decompositions are prepared before preprocessing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Prep {
    /// Rebalanced to logarithmic height, then made semi-nice.
    #[default]
    Balanced,
    /// Only made semi-nice; bag ids of an already semi-nice input are kept.
    AsGiven,
}

/// Stack bound for [`RsmEngine::rsm_distance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Height(usize),
    /// Until no entry-to-exit distance changes.
    Fixpoint,
}

#[derive(Debug, Clone, Default)]
pub struct RsmOptions {
    pub prep: Prep,
    pub exec: Exec,
    /// Per component, a decomposition to use instead of a computed one.
    pub tds: Vec<Option<TreeDecomposition>>,
}

/// Work done by the relaxation rounds so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub rounds: usize,
    pub updates: usize,
    pub queries: usize,
}

/// A witness of an entry-to-exit distance as it stood at some round, with
/// the callee versions on the call-to-return edges at that time.
#[derive(Debug, Clone)]
struct Version {
    path: Option<Vec<usize>>,
    /// Per box of the component, the callee version in use.
    edges: Vec<usize>,
}

const NO_VERSION: usize = usize::MAX;

/// A witness of a same-context query whose call-to-return steps are
/// expanded into witnesses of the callee.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedPath {
    pub csm: usize,
    pub nodes: Vec<usize>,
    pub calls: Vec<NestedCall>,
}

/// `nodes[at]` is the call node of `box_id` and `nodes[at + 1]` its return node.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedCall {
    pub at: usize,
    pub box_id: usize,
    pub body: NestedPath,
}

impl NestedPath {
    /// The execution path: every configuration visited, with its stack.
    pub fn flatten(&self) -> Vec<Config> {
        let mut out = Vec::new();
        self.flatten_into(&mut Vec::new(), &mut out);
        out
    }

    fn flatten_into(&self, stack: &mut Vec<usize>, out: &mut Vec<Config>) {
        let mut calls = self.calls.iter().peekable();
        for (i, &node) in self.nodes.iter().enumerate() {
            out.push(Config {
                csm: self.csm,
                node,
                stack: stack.clone(),
            });
            if let Some(call) = calls.next_if(|c| c.at == i) {
                stack.push(call.box_id);
                call.body.flatten_into(stack, out);
                stack.pop();
            }
        }
    }

    /// Deepest nesting of calls.
    pub fn depth(&self) -> usize {
        self.calls.iter().map(|c| 1 + c.body.depth()).max().unwrap_or(0)
    }
}

/// Per-component indexes plus the call-graph relaxation state.
#[derive(Debug, Clone)]
pub struct RsmEngine<S: Semiring> {
    sr: S,
    rsm: Rsm<S::Value>,
    indexes: Vec<TdIndex<S>>,
    callers: Vec<Vec<(usize, Vec<usize>)>>,
    distances: Vec<S::Value>,
    modified: BTreeSet<usize>,
    level: usize,
    versions: Option<Vec<Vec<Version>>>,
    current: Vec<usize>,
    edge_version: Vec<usize>,
    stats: RunStats,
}

impl<S: Semiring + Clone> RsmEngine<S> {
    /// Preprocesses every component at stack height 0.
    pub fn new(sr: S, rsm: Rsm<S::Value>) -> Result<Self> {
        Self::build(sr, rsm, &RsmOptions::default())
    }

    pub fn build(sr: S, rsm: Rsm<S::Value>, opts: &RsmOptions) -> Result<Self> {
        let k = rsm.num_components();
        let prepared: Vec<Result<TdIndex<S>>> = par::map_range(opts.exec, k, |c| {
            let g = rsm.derived_graph(&sr, c)?;
            let td = match opts.tds.get(c).cloned().flatten() {
                Some(td) => td,
                None => build_td(g.n(), g.edges(), None, Heuristic::Auto)?,
            };
            let td = match opts.prep {
                Prep::Balanced => balance_td(&td)?,
                Prep::AsGiven => make_semi_nice(&td)?,
            };
            TdIndex::preprocess_with(sr.clone(), g, td, opts.exec)
        });
        let indexes = prepared.into_iter().collect::<Result<Vec<_>>>()?;
        let witnesses = sr.selective() && sr.trivial_closure();
        let mut engine = RsmEngine {
            callers: rsm.callers(),
            distances: Vec::with_capacity(k),
            modified: (0..k).collect(),
            level: 0,
            versions: witnesses.then(|| vec![Vec::new(); k]),
            current: vec![NO_VERSION; k],
            edge_version: vec![NO_VERSION; rsm.boxes().len()],
            stats: RunStats::default(),
            indexes,
            rsm,
            sr,
        };
        for c in 0..k {
            let d = engine.entry_exit(c)?;
            engine.distances.push(d);
            engine.record_version(c)?;
        }
        Ok(engine)
    }

    fn entry_exit(&mut self, c: usize) -> Result<S::Value> {
        let comp = self.rsm.component(c);
        self.stats.queries += 1;
        self.indexes[c].query_pair(comp.entry(), comp.exit())
    }

    fn record_version(&mut self, c: usize) -> Result<()> {
        let Some(versions) = self.versions.as_ref() else {
            return Ok(());
        };
        let comp = self.rsm.component(c);
        let path = match self.indexes[c].query_witness(comp.entry(), comp.exit()) {
            Ok((_, p)) => Some(p.nodes),
            Err(Error::NoPath(..)) => None,
            Err(e) => return Err(e),
        };
        let edges = comp.boxes().iter().map(|&b| self.edge_version[b]).collect();
        let id = versions[c].len();
        self.versions.as_mut().expect("checked above")[c].push(Version { path, edges });
        self.current[c] = id;
        Ok(())
    }

    /// Runs relaxation rounds until the bound is reached.
    ///
    /// Each round reads the entry-to-exit distances as they stood when it
    /// began, so after round `l` every index holds distances of stack height
    /// at most `l`. Calls accumulate: a later call continues from the level
    /// already reached.
    pub fn rsm_distance(&mut self, bound: Bound) -> Result<RunStats> {
        match bound {
            Bound::Height(h) => {
                while self.level < h {
                    if self.modified.is_empty() {
                        self.level = h;
                        break;
                    }
                    self.round()?;
                }
            }
            Bound::Fixpoint => {
                let cap = self.round_cap();
                while !self.modified.is_empty() {
                    if self.level >= cap {
                        return Err(Error::NonTermination(cap));
                    }
                    self.round()?;
                }
            }
        }
        Ok(self.stats)
    }

    /// Rounds allowed in fixpoint mode.
    pub fn round_cap(&self) -> usize {
        let k = self.rsm.num_components();
        2 * k * self.sr.chain_factor() + k
    }

    /// One relaxation round; returns whether any distance changed.
    pub fn round(&mut self) -> Result<bool> {
        let snapshot = self.distances.clone();
        let snap_version = self.current.clone();
        let modified = std::mem::take(&mut self.modified);
        let mut next = BTreeSet::new();
        for i in modified {
            for (j, boxes) in self.callers[i].clone() {
                for b in boxes {
                    let site = self.rsm.box_site(b);
                    self.indexes[j].update(site.call, site.ret, snapshot[i].clone())?;
                    self.edge_version[b] = snap_version[i];
                    self.stats.updates += 1;
                }
                let d = self.entry_exit(j)?;
                if !self.sr.eq(&d, &self.distances[j]) {
                    next.insert(j);
                    self.distances[j] = d;
                    self.record_version(j)?;
                }
            }
        }
        let changed = !next.is_empty();
        self.modified = next;
        self.level += 1;
        self.stats.rounds += 1;
        Ok(changed)
    }

    pub fn semiring(&self) -> &S {
        &self.sr
    }

    pub fn rsm(&self) -> &Rsm<S::Value> {
        &self.rsm
    }

    pub fn index(&self, c: usize) -> &TdIndex<S> {
        &self.indexes[c]
    }

    pub fn indexes(&self) -> &[TdIndex<S>] {
        &self.indexes
    }

    /// Current entry-to-exit distance of every component.
    pub fn distances(&self) -> &[S::Value] {
        &self.distances
    }

    /// Stack height the indexes currently account for.
    pub fn level(&self) -> usize {
        self.level
    }

    /// Whether the last round changed nothing.
    pub fn saturated(&self) -> bool {
        self.modified.is_empty()
    }

    pub fn stats(&self) -> RunStats {
        self.stats
    }

    fn check_same(&self, u: Loc, v: Loc) -> Result<()> {
        if u.csm != v.csm {
            return Err(Error::DifferentCsm(u.csm, v.csm));
        }
        if u.csm >= self.rsm.num_components() {
            return Err(Error::IndexOutOfRange {
                index: u.csm,
                limit: self.rsm.num_components(),
            });
        }
        Ok(())
    }

    /// `d((u, []), (v, []), h)` for the height reached so far.
    pub fn same_context_pair(&self, u: Loc, v: Loc) -> Result<S::Value> {
        self.check_same(u, v)?;
        self.indexes[u.csm].query_pair(u.node, v.node)
    }

    /// Answers many pairs, in parallel when enabled.
    pub fn pair_batch(&self, pairs: &[(Loc, Loc)]) -> Vec<Result<S::Value>> {
        let exec = self.indexes.first().map(|i| i.exec()).unwrap_or_default();
        par::map(exec, pairs, |&(u, v)| self.same_context_pair(u, v))
    }

    /// Builds the constant-time pair index over the current distances.
    pub fn pair_index(&self) -> PairQueryIndex<S> {
        PairQueryIndex::build(&self.indexes)
    }

    /// A witness for `d(u, v)` whose call-to-return steps are expanded
    /// recursively into callee executions.
    pub fn interproc_witness(&self, u: Loc, v: Loc) -> Result<(S::Value, NestedPath)> {
        self.check_same(u, v)?;
        let versions = self.versions.as_ref().ok_or_else(|| {
            Error::Unsupported(format!(
                "witness paths need a selective semiring with trivial closure, not {}",
                self.sr.name()
            ))
        })?;
        let (value, path) = self.indexes[u.csm].query_witness(u.node, v.node)?;
        let comp = self.rsm.component(u.csm);
        let edges: Vec<usize> = comp.boxes().iter().map(|&b| self.edge_version[b]).collect();
        let nested = self.nest(versions, u.csm, path, &edges)?;
        Ok((value, nested))
    }

    fn nest(&self, versions: &[Vec<Version>], c: usize, path: Path, edges: &[usize]) -> Result<NestedPath> {
        let comp = self.rsm.component(c);
        let mut calls = Vec::new();
        for (at, pair) in path.nodes.windows(2).enumerate() {
            let NodeKind::Call(b) = comp.kind(pair[0]) else {
                continue;
            };
            let site = self.rsm.box_site(b);
            if pair[1] != site.ret {
                continue;
            }
            let slot = comp
                .boxes()
                .iter()
                .position(|&x| x == b)
                .expect("box of this component");
            let ver = edges[slot];
            let callee = versions[site.callee]
                .get(ver)
                .ok_or_else(|| Error::NoPath(site.call, site.ret))?;
            let body = callee.path.clone().ok_or(Error::NoPath(site.call, site.ret))?;
            let body = self.nest(versions, site.callee, Path { nodes: body }, &callee.edges)?;
            calls.push(NestedCall { at, box_id: b, body });
        }
        Ok(NestedPath {
            csm: c,
            nodes: path.nodes,
            calls,
        })
    }

    /// The weight currently on the call-to-return edge of box `b`.
    pub fn edge_value(&self, b: usize) -> Option<&S::Value> {
        let site = self.rsm.box_site(b);
        self.indexes[site.owner].graph().weight(site.call, site.ret)
    }
}

#[cfg(test)]
mod tests;
