//! Constant-time pair queries and linear single-source queries.
//!
//! A top-down pass turns the local distance maps into full distances between
//! every two nodes sharing a bag. For each node `u` the index then keeps
//! `F_u(v) = d(u,v)` and `T_u(v) = d(v,u)` for every `v` introduced below
//! the bag of `u`. A pair query combines the maps of the nodes in the common
//! ancestor bag. The combination assumes an idempotent `⊕`, which holds for
//! every semiring shipped with the crate.

use super::model::Loc;
use crate::dynamic::TdIndex;
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::semiring::{Meter, Semiring, Tally};
use crate::treedec::TreeDecomposition;

/// Pair and single-source index of one graph.
#[derive(Debug, Clone)]
pub struct PairIndex<S: Semiring> {
    sr: S,
    td: TreeDecomposition,
    /// Full distances between nodes of each bag, row-major by sorted bag.
    inbag: Vec<Vec<S::Value>>,
    /// Position of each node when nodes are listed by the preorder of their bag.
    pos: Vec<usize>,
    /// Positions of the nodes introduced in each bag's subtree.
    range: Vec<(usize, usize)>,
    fwd: Vec<Vec<S::Value>>,
    bwd: Vec<Vec<S::Value>>,
    build_ops: Tally,
}

fn cell(bag: &[usize], a: usize, b: usize) -> Option<usize> {
    let i = bag.binary_search(&a).ok()?;
    let j = bag.binary_search(&b).ok()?;
    Some(i * bag.len() + j)
}

impl<S: Semiring + Clone> PairIndex<S> {
    pub fn build(idx: &TdIndex<S>) -> Self {
        let sr = idx.semiring().clone();
        let td = idx.td().clone();
        let mut tally = Tally::default();
        let inbag = Self::in_bag_distances(&sr, idx, &mut tally);

        let nb = td.num_bags();
        let mut pre = vec![0; nb];
        let mut order = Vec::with_capacity(nb);
        let mut stack = vec![td.root()];
        while let Some(b) = stack.pop() {
            pre[b] = order.len();
            order.push(b);
            stack.extend(td.children(b).iter().rev());
        }
        let mut size = vec![1; nb];
        for &b in order.iter().rev() {
            if let Some(p) = td.parent(b) {
                size[p] += size[b];
            }
        }
        let n = td.n_nodes();
        let mut nodes: Vec<usize> = (0..n).collect();
        nodes.sort_by_key(|&u| pre[td.home(u).expect("every node has a bag")]);
        let mut pos = vec![0; n];
        for (i, &u) in nodes.iter().enumerate() {
            pos[u] = i;
        }
        let mut before = vec![0; nb + 1];
        for &u in &nodes {
            before[pre[td.home(u).unwrap()] + 1] += 1;
        }
        for i in 0..nb {
            before[i + 1] += before[i];
        }
        let range: Vec<(usize, usize)> = (0..nb).map(|b| (before[pre[b]], before[pre[b] + size[b]])).collect();

        let mut index = PairIndex {
            sr,
            td,
            inbag,
            pos,
            range,
            fwd: Vec::new(),
            bwd: Vec::new(),
            build_ops: tally,
        };
        let exec = idx.exec();
        let maps: Vec<(Vec<S::Value>, Vec<S::Value>, Tally)> = par::map_range(exec, n, |u| {
            let mut m = Meter::new(&index.sr);
            let f = index.subtree_map(&mut m, &order, &pre, &size, u, true);
            let t = index.subtree_map(&mut m, &order, &pre, &size, u, false);
            (f, t, m.tally)
        });
        for (f, t, tally) in maps {
            index.fwd.push(f);
            index.bwd.push(t);
            index.build_ops.add(&tally);
        }
        index
    }

    /// Floyd-Warshall in each bag, seeded with the parent's full distances.
    fn in_bag_distances(sr: &S, idx: &TdIndex<S>, tally: &mut Tally) -> Vec<Vec<S::Value>> {
        let td = idx.td();
        let mut out: Vec<Vec<S::Value>> = vec![Vec::new(); td.num_bags()];
        let mut m = Meter::new(sr);
        let mut stack = vec![td.root()];
        while let Some(b) = stack.pop() {
            let bag = td.bag(b);
            let s = bag.len();
            let mut d: Vec<S::Value> = idx.table(b).to_vec();
            if let Some(p) = td.parent(b) {
                for (i, &a) in bag.iter().enumerate() {
                    for (j, &c) in bag.iter().enumerate() {
                        if let Some(k) = cell(td.bag(p), a, c) {
                            d[i * s + j] = m.plus(&d[i * s + j], &out[p][k]);
                        }
                    }
                }
            }
            for k in 0..s {
                let loop_k = m.star(&d[k * s + k]).expect("closure of a preprocessed value");
                for i in 0..s {
                    if m.is_zero(&d[i * s + k]) {
                        continue;
                    }
                    let left = m.times(&d[i * s + k], &loop_k);
                    for j in 0..s {
                        if m.is_zero(&d[k * s + j]) {
                            continue;
                        }
                        let via = m.times(&left, &d[k * s + j]);
                        d[i * s + j] = m.plus(&d[i * s + j], &via);
                    }
                }
            }
            for i in 0..s {
                d[i * s + i] = m.plus(&d[i * s + i], &m.one());
            }
            out[b] = d;
            stack.extend(td.children(b).iter().copied());
        }
        tally.add(&m.tally);
        out
    }

    /// `F_u` (outgoing) or `T_u` over the nodes introduced below `u`'s bag.
    fn subtree_map(
        &self,
        m: &mut Meter<'_, S>,
        order: &[usize],
        pre: &[usize],
        size: &[usize],
        u: usize,
        outgoing: bool,
    ) -> Vec<S::Value> {
        let home = self.td.home(u).expect("every node has a bag");
        let (lo, hi) = self.range[home];
        let mut map = vec![m.zero(); hi - lo];
        let dist = |b: usize, a: usize, c: usize| -> &S::Value {
            let (x, y) = if outgoing { (a, c) } else { (c, a) };
            &self.inbag[b][cell(self.td.bag(b), x, y).expect("pair inside the bag")]
        };
        for &w in self.td.bag(home) {
            if self.td.home(w) == Some(home) {
                map[self.pos[w] - lo] = dist(home, u, w).clone();
            }
        }
        for &b in &order[pre[home] + 1..pre[home] + size[home]] {
            for &v in self.td.introduced(b) {
                let mut acc = m.zero();
                for &z in self.td.bag(b) {
                    if self.td.home(z) == Some(b) {
                        continue;
                    }
                    let p = self.pos[z];
                    let dz = if (lo..hi).contains(&p) {
                        map[p - lo].clone()
                    } else {
                        dist(home, u, z).clone()
                    };
                    let step = if outgoing {
                        m.times(&dz, dist(b, z, v))
                    } else {
                        m.times(dist(b, z, v), &dz)
                    };
                    m.accumulate(&mut acc, &step);
                }
                map[self.pos[v] - lo] = acc;
            }
        }
        map
    }

    fn check(&self, u: usize) -> Result<()> {
        if u >= self.td.n_nodes() {
            return Err(Error::IndexOutOfRange {
                index: u,
                limit: self.td.n_nodes(),
            });
        }
        Ok(())
    }

    /// `d(u,v)` for two nodes of bag `b`.
    pub fn in_bag(&self, b: usize, u: usize, v: usize) -> Option<&S::Value> {
        cell(self.td.bag(b), u, v).map(|k| &self.inbag[b][k])
    }

    /// `F_u(v)`, defined for `v` introduced at or below the bag of `u`.
    pub fn forward(&self, u: usize, v: usize) -> Option<&S::Value> {
        let (lo, hi) = self.range[self.td.home(u)?];
        let p = *self.pos.get(v)?;
        (lo..hi).contains(&p).then(|| &self.fwd[u][p - lo])
    }

    /// `T_u(v)`, defined for `v` introduced at or below the bag of `u`.
    pub fn backward(&self, u: usize, v: usize) -> Option<&S::Value> {
        let (lo, hi) = self.range[self.td.home(u)?];
        let p = *self.pos.get(v)?;
        (lo..hi).contains(&p).then(|| &self.bwd[u][p - lo])
    }

    /// `d(u,v)` from the maps of the common ancestor bag.
    pub fn query(&self, u: usize, v: usize) -> Result<S::Value> {
        Ok(self.query_counted(u, v)?.0)
    }

    pub fn query_counted(&self, u: usize, v: usize) -> Result<(S::Value, Tally)> {
        self.check(u)?;
        self.check(v)?;
        let top = self.td.lca(self.td.home(u).unwrap(), self.td.home(v).unwrap());
        let mut m = Meter::new(&self.sr);
        let mut acc = m.zero();
        for &z in self.td.bag(top) {
            let t = self.backward(z, u).expect("source below the common bag");
            let f = self.forward(z, v).expect("target below the common bag");
            let step = m.times(t, f);
            m.accumulate(&mut acc, &step);
        }
        Ok((acc, m.tally))
    }

    /// `d(u,v)` for every `v`, by a breadth-first walk over the bags.
    pub fn single_source(&self, u: usize) -> Result<Vec<S::Value>> {
        Ok(self.single_source_counted(u)?.0)
    }

    pub fn single_source_counted(&self, u: usize) -> Result<(Vec<S::Value>, Tally)> {
        self.check(u)?;
        let mut m = Meter::new(&self.sr);
        let n = self.td.n_nodes();
        let mut dist: Vec<Option<S::Value>> = vec![None; n];
        let start = self.td.home(u).unwrap();
        for &w in self.td.bag(start) {
            dist[w] = self.in_bag(start, u, w).cloned();
        }
        let mut seen = vec![false; self.td.num_bags()];
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let next = self.td.children(x).iter().copied().chain(self.td.parent(x));
            for y in next.collect::<Vec<_>>() {
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                for &v in self.td.bag(y) {
                    if dist[v].is_some() {
                        continue;
                    }
                    let mut acc = m.zero();
                    for &z in self.td.bag(y) {
                        if !self.td.contains(x, z) {
                            continue;
                        }
                        let dz = dist[z].as_ref().expect("shared nodes are already reached");
                        let step = m.times(dz, self.in_bag(y, z, v).expect("pair inside the bag"));
                        m.accumulate(&mut acc, &step);
                    }
                    dist[v] = Some(acc);
                }
                queue.push_back(y);
            }
        }
        let zero = m.zero();
        let out = dist.into_iter().map(|d| d.unwrap_or_else(|| zero.clone())).collect();
        Ok((out, m.tally))
    }

    /// Operations spent building the index.
    pub fn build_ops(&self) -> Tally {
        self.build_ops
    }

    /// Stored values across all maps.
    pub fn entries(&self) -> usize {
        self.inbag.iter().map(Vec::len).sum::<usize>()
            + self.fwd.iter().map(Vec::len).sum::<usize>()
            + self.bwd.iter().map(Vec::len).sum::<usize>()
    }

    pub fn td(&self) -> &TreeDecomposition {
        &self.td
    }
}

/// Pair indexes of every component of an RSM.
#[derive(Debug, Clone)]
pub struct PairQueryIndex<S: Semiring> {
    parts: Vec<PairIndex<S>>,
}

impl<S: Semiring + Clone> PairQueryIndex<S> {
    pub fn build(indexes: &[TdIndex<S>]) -> Self {
        let exec = indexes.first().map(TdIndex::exec).unwrap_or(Exec::Auto);
        PairQueryIndex {
            parts: par::map(exec, indexes, PairIndex::build),
        }
    }

    pub fn part(&self, c: usize) -> &PairIndex<S> {
        &self.parts[c]
    }

    fn part_of(&self, c: usize) -> Result<&PairIndex<S>> {
        self.parts.get(c).ok_or(Error::IndexOutOfRange {
            index: c,
            limit: self.parts.len(),
        })
    }

    pub fn pair_query_const(&self, u: Loc, v: Loc) -> Result<S::Value> {
        if u.csm != v.csm {
            return Err(Error::DifferentCsm(u.csm, v.csm));
        }
        self.part_of(u.csm)?.query(u.node, v.node)
    }

    /// Distances from `u` to every node of its component.
    pub fn single_source(&self, u: Loc) -> Result<Vec<S::Value>> {
        self.part_of(u.csm)?.single_source(u.node)
    }
}
