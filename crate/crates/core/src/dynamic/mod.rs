//! Local distance maps over a semi-nice tree decomposition, with weight
//! updates and logarithmic pair queries.

mod query;

pub use query::{Phase, QueryOutcome, TraceStep};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::par::{self, Exec};
use crate::semiring::{Meter, OpCounter, Semiring, Tally};
use crate::treedec::{validate_td, TreeDecomposition};

/// Where one factor of a merged entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Src {
    /// The endpoint is the introduced node itself.
    Same,
    Edge,
    Child(usize),
}

/// How an entry of a local distance map was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hint {
    Zero,
    /// Copied from the entry of a child bag.
    Child(usize),
    /// Routed through the node introduced by the bag.
    Via(Src, Src),
}

type Merged<W> = (Vec<W>, Option<Vec<Hint>>, Tally);

/// Local distance maps for every bag of a decomposition of one graph.
#[derive(Debug, Clone)]
pub struct TdIndex<S: Semiring> {
    sr: S,
    graph: WeightedGraph<S::Value>,
    td: TreeDecomposition,
    tables: Vec<Vec<S::Value>>,
    hints: Option<Vec<Vec<Hint>>>,
    intro: Vec<Option<usize>>,
    ops: OpCounter,
    exec: Exec,
}

impl<S: Semiring + Clone> TdIndex<S> {
    /// Builds every local distance map bottom-up.
    pub fn preprocess(sr: S, graph: WeightedGraph<S::Value>, td: TreeDecomposition) -> Result<Self> {
        Self::preprocess_with(sr, graph, td, Exec::Auto)
    }

    pub fn preprocess_with(sr: S, graph: WeightedGraph<S::Value>, td: TreeDecomposition, exec: Exec) -> Result<Self> {
        if !td.is_semi_nice() {
            return Err(Error::InvalidDecomposition("decomposition is not semi-nice".into()));
        }
        if td.n_nodes() != graph.n() {
            return Err(Error::InvalidDecomposition(format!(
                "decomposition covers {} nodes, graph has {}",
                td.n_nodes(),
                graph.n()
            )));
        }
        let report = validate_td(graph.n(), graph.edges(), &td);
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidDecomposition(v.clone()));
        }
        let intro = (0..td.num_bags()).map(|b| td.introduced(b).first().copied()).collect();
        let hints = (sr.selective() && sr.trivial_closure()).then(|| vec![Vec::new(); td.num_bags()]);
        let mut idx = TdIndex {
            tables: vec![Vec::new(); td.num_bags()],
            sr,
            graph,
            td,
            hints,
            intro,
            ops: OpCounter::default(),
            exec,
        };
        idx.rebuild()?;
        Ok(idx)
    }

    /// Recomputes every table from the current weights.
    pub fn rebuild(&mut self) -> Result<()> {
        let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); self.td.height() + 1];
        for b in 0..self.td.num_bags() {
            by_level[self.td.level(b)].push(b);
        }
        for level in by_level.iter().rev() {
            let merged: Vec<Result<Merged<S::Value>>> = par::map(self.exec, level, |&b| self.merge(b));
            for (&b, m) in level.iter().zip(merged) {
                let (table, hints, tally) = m?;
                self.store(b, table, hints, &tally);
            }
        }
        Ok(())
    }

    fn store(&mut self, b: usize, table: Vec<S::Value>, hints: Option<Vec<Hint>>, tally: &Tally) {
        self.tables[b] = table;
        if let (Some(all), Some(h)) = (self.hints.as_mut(), hints) {
            all[b] = h;
        }
        self.ops.record(tally);
    }

    /// Reassigns `wt(u,v)` and repairs the maps from the edge's bag to the root.
    pub fn update(&mut self, u: usize, v: usize, w: S::Value) -> Result<()> {
        let old = self.graph.weight(u, v).cloned().ok_or(Error::UnknownEdge(u, v))?;
        let start = self.td.edge_bag(u, v).ok_or(Error::UnknownEdge(u, v))?;
        let path: Vec<usize> = self.td.ancestors(start).collect();
        let saved: Vec<(Vec<S::Value>, Option<Vec<Hint>>)> = path
            .iter()
            .map(|&b| (self.tables[b].clone(), self.hints.as_ref().map(|h| h[b].clone())))
            .collect();
        self.graph.set_weight(u, v, w)?;
        for &b in &path {
            match self.merge(b) {
                Ok((table, hints, tally)) => self.store(b, table, hints, &tally),
                Err(e) => {
                    self.graph.set_weight(u, v, old)?;
                    for (&b, (table, hints)) in path.iter().zip(saved) {
                        self.tables[b] = table;
                        if let (Some(all), Some(h)) = (self.hints.as_mut(), hints) {
                            all[b] = h;
                        }
                    }
                    return Err(e);
                }
            }
        }
        Ok(())
    }

    fn pos(&self, b: usize, u: usize) -> Option<usize> {
        self.td.bag(b).binary_search(&u).ok()
    }

    fn child_entry(&self, c: usize, a: usize, b: usize) -> Option<&S::Value> {
        let s = self.td.bag(c).len();
        let i = self.pos(c, a)?;
        let j = self.pos(c, b)?;
        Some(&self.tables[c][i * s + j])
    }

    /// Computes the table of bag `b` from its children and the live weights.
    fn merge(&self, b: usize) -> Result<Merged<S::Value>> {
        let bag = self.td.bag(b);
        let s = bag.len();
        let children = self.td.children(b);
        let track = self.hints.is_some();
        let mut m = Meter::new(&self.sr);
        let zero = m.zero();
        let mut table = vec![zero.clone(); s * s];
        let mut hints = track.then(|| vec![Hint::Zero; s * s]);

        for (i, &u) in bag.iter().enumerate() {
            for (j, &v) in bag.iter().enumerate() {
                let cell = i * s + j;
                for &c in children {
                    if let Some(w) = self.child_entry(c, u, v) {
                        let next = m.plus(&table[cell], w);
                        if let Some(h) = hints.as_mut() {
                            if !m.eq(&next, &table[cell]) {
                                h[cell] = Hint::Child(c);
                            }
                        }
                        table[cell] = next;
                    }
                }
            }
        }

        let Some(x) = self.intro[b] else {
            return Ok((table, hints, m.tally));
        };
        let xi = self.pos(b, x).expect("introduced node lies in its bag");

        // Cycles through x: the self-loop and the children's x-to-x entries.
        let self_loop = self.graph.weight(x, x).cloned().unwrap_or_else(|| zero.clone());
        let mut cycles = m.star(&self_loop)?;
        for &c in children {
            if let Some(w) = self.child_entry(c, x, x) {
                let st = m.star(w)?;
                cycles = m.times(&cycles, &st);
            }
        }
        let wxx = m.star(&cycles)?;

        let mut out = vec![zero.clone(); s];
        let mut out_src = vec![Src::Same; s];
        let mut inn = vec![zero.clone(); s];
        let mut inn_src = vec![Src::Same; s];
        for (j, &v) in bag.iter().enumerate() {
            if j == xi {
                continue;
            }
            out[j] = self.graph.weight(x, v).cloned().unwrap_or_else(|| zero.clone());
            out_src[j] = Src::Edge;
            inn[j] = self.graph.weight(v, x).cloned().unwrap_or_else(|| zero.clone());
            inn_src[j] = Src::Edge;
            for &c in children {
                if let Some(w) = self.child_entry(c, x, v) {
                    let next = m.plus(&out[j], w);
                    if !m.eq(&next, &out[j]) {
                        out_src[j] = Src::Child(c);
                    }
                    out[j] = next;
                }
                if let Some(w) = self.child_entry(c, v, x) {
                    let next = m.plus(&inn[j], w);
                    if !m.eq(&next, &inn[j]) {
                        inn_src[j] = Src::Child(c);
                    }
                    inn[j] = next;
                }
            }
        }

        let left: Vec<S::Value> = (0..s)
            .map(|i| if i == xi { wxx.clone() } else { m.times(&inn[i], &wxx) })
            .collect();
        for i in 0..s {
            for j in 0..s {
                let delta = if j == xi {
                    left[i].clone()
                } else {
                    m.times(&left[i], &out[j])
                };
                let cell = i * s + j;
                let next = m.plus(&delta, &table[cell]);
                if let Some(h) = hints.as_mut() {
                    if !m.is_zero(&delta) && m.eq(&next, &delta) {
                        let l = if i == xi { Src::Same } else { inn_src[i] };
                        let r = if j == xi { Src::Same } else { out_src[j] };
                        h[cell] = Hint::Via(l, r);
                    }
                }
                table[cell] = next;
            }
        }
        Ok((table, hints, m.tally))
    }

    pub fn semiring(&self) -> &S {
        &self.sr
    }

    pub fn graph(&self) -> &WeightedGraph<S::Value> {
        &self.graph
    }

    pub fn td(&self) -> &TreeDecomposition {
        &self.td
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn set_exec(&mut self, exec: Exec) {
        self.exec = exec;
    }

    /// `LD_B(u,v)`, or `None` when `u` or `v` is not in bag `b`.
    pub fn local_distance(&self, b: usize, u: usize, v: usize) -> Option<&S::Value> {
        self.child_entry(b, u, v)
    }

    /// Row-major table of bag `b`, indexed by the sorted bag.
    pub fn table(&self, b: usize) -> &[S::Value] {
        &self.tables[b]
    }

    pub fn hint(&self, b: usize, u: usize, v: usize) -> Option<Hint> {
        let s = self.td.bag(b).len();
        let (i, j) = (self.pos(b, u)?, self.pos(b, v)?);
        self.hints.as_ref().map(|h| h[b][i * s + j])
    }

    /// The node introduced by bag `b`, if any.
    pub fn introduced(&self, b: usize) -> Option<usize> {
        self.intro[b]
    }

    /// Operations performed since construction or the last reset.
    pub fn ops(&self) -> Tally {
        self.ops.snapshot()
    }

    pub fn reset_ops(&self) {
        self.ops.reset();
    }

    /// Whether every table matches `other` value-wise.
    pub fn same_tables(&self, other: &Self) -> bool {
        self.tables.len() == other.tables.len()
            && self
                .tables
                .iter()
                .zip(&other.tables)
                .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.sr.eq(x, y)))
    }
}

#[cfg(test)]
mod tests;
