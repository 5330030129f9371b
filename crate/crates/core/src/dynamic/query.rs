use super::{Hint, Src, TdIndex};
use crate::error::{Error, Result};
use crate::graph::Path;
use crate::par;
use crate::semiring::{Meter, Semiring, Tally};

/// Which part of the query a trace step belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Start,
    /// Climbing from the source's bag towards the common ancestor.
    SourceSide,
    /// Climbing from the target's bag towards the common ancestor.
    TargetSide,
    /// At the common ancestor or above it.
    Common,
}

/// Snapshot of the query state after visiting one bag.
#[derive(Debug, Clone)]
pub struct TraceStep<W> {
    pub bag: usize,
    pub phase: Phase,
    pub from_source: Vec<(usize, W)>,
    pub to_target: Vec<(usize, W)>,
    pub best: Option<W>,
}

#[derive(Debug, Clone)]
pub struct QueryOutcome<W> {
    pub value: W,
    pub tally: Tally,
    pub trace: Vec<TraceStep<W>>,
}

/// A stored entry `LD_B(a, b)` used as a path piece.
type Seg = (usize, usize, usize);

struct DeltaMap<W> {
    nodes: Vec<usize>,
    vals: Vec<W>,
    segs: Option<Vec<Vec<Seg>>>,
}

impl<W: Clone> DeltaMap<W> {
    fn get(&self, u: usize) -> Option<usize> {
        self.nodes.binary_search(&u).ok()
    }

    fn snapshot(&self) -> Vec<(usize, W)> {
        self.nodes.iter().copied().zip(self.vals.iter().cloned()).collect()
    }
}

struct Run<W> {
    value: W,
    segs: Option<Vec<Seg>>,
    tally: Tally,
    trace: Vec<TraceStep<W>>,
}

impl<S: Semiring + Clone> TdIndex<S> {
    fn check_node(&self, u: usize) -> Result<usize> {
        self.td
            .home(u)
            .filter(|_| u < self.graph.n())
            .ok_or(Error::IndexOutOfRange {
                index: u,
                limit: self.graph.n(),
            })
    }

    /// `d(u,v)`: the `⊕` over all paths from `u` to `v`.
    pub fn query_pair(&self, u: usize, v: usize) -> Result<S::Value> {
        Ok(self.run(u, v, false, false)?.value)
    }

    /// `d(u,v)` with the operations it took and the per-bag state trace.
    pub fn query_traced(&self, u: usize, v: usize) -> Result<QueryOutcome<S::Value>> {
        let run = self.run(u, v, false, true)?;
        Ok(QueryOutcome {
            value: run.value,
            tally: run.tally,
            trace: run.trace,
        })
    }

    /// Answers many pairs, in parallel when enabled.
    pub fn query_batch(&self, pairs: &[(usize, usize)]) -> Vec<Result<S::Value>> {
        par::map(self.exec, pairs, |&(u, v)| self.query_pair(u, v))
    }

    /// A path whose weight is `d(u,v)`; requires a selective semiring with trivial closure.
    pub fn query_witness(&self, u: usize, v: usize) -> Result<(S::Value, Path)> {
        if self.hints.is_none() {
            return Err(Error::Unsupported(format!(
                "witness paths need a selective semiring with trivial closure, not {}",
                self.sr.name()
            )));
        }
        let run = self.run(u, v, true, false)?;
        if self.sr.is_zero(&run.value) {
            return Err(Error::NoPath(u, v));
        }
        let mut nodes = vec![u];
        for (b, a, c) in run.segs.unwrap_or_default() {
            self.expand_into(b, a, c, &mut nodes)?;
        }
        Ok((run.value, Path { nodes }))
    }

    /// Appends the nodes after `a` on the path stored for `LD_b(a, c)`.
    pub(crate) fn expand_into(&self, b: usize, a: usize, c: usize, out: &mut Vec<usize>) -> Result<()> {
        enum Task {
            Entry(usize, usize, usize),
            Node(usize),
        }
        let mut stack = vec![Task::Entry(b, a, c)];
        while let Some(task) = stack.pop() {
            let (b, a, c) = match task {
                Task::Node(x) => {
                    out.push(x);
                    continue;
                }
                Task::Entry(b, a, c) => (b, a, c),
            };
            match self.hint(b, a, c).unwrap_or(Hint::Zero) {
                Hint::Zero => return Err(Error::NoPath(a, c)),
                Hint::Child(ch) => stack.push(Task::Entry(ch, a, c)),
                Hint::Via(l, r) => {
                    let x = self.intro[b].expect("via hint on an introducing bag");
                    match r {
                        Src::Same => {}
                        Src::Edge => stack.push(Task::Node(c)),
                        Src::Child(ch) => stack.push(Task::Entry(ch, x, c)),
                    }
                    match l {
                        Src::Same => {}
                        Src::Edge => stack.push(Task::Node(x)),
                        Src::Child(ch) => stack.push(Task::Entry(ch, a, x)),
                    }
                }
            }
        }
        Ok(())
    }

    fn start_map(
        &self,
        m: &mut Meter<'_, S>,
        b: usize,
        anchor: usize,
        outgoing: bool,
        track: bool,
    ) -> DeltaMap<S::Value> {
        let nodes = self.td.bag(b).to_vec();
        let vals = nodes
            .iter()
            .map(|&w| {
                let (p, q) = if outgoing { (anchor, w) } else { (w, anchor) };
                self.local_distance(b, p, q).cloned().unwrap_or_else(|| m.zero())
            })
            .collect();
        let segs = track.then(|| {
            nodes
                .iter()
                .map(|&w| vec![if outgoing { (b, anchor, w) } else { (b, w, anchor) }])
                .collect()
        });
        DeltaMap { nodes, vals, segs }
    }

    /// Moves `delta` to bag `b`, then routes it through `b`'s introduced node.
    fn climb(&self, m: &mut Meter<'_, S>, b: usize, delta: &mut DeltaMap<S::Value>, up: bool) {
        let nodes = self.td.bag(b).to_vec();
        let mut vals = Vec::with_capacity(nodes.len());
        let mut segs = delta.segs.as_ref().map(|_| Vec::with_capacity(nodes.len()));
        for &w in &nodes {
            match delta.get(w) {
                Some(i) => {
                    vals.push(delta.vals[i].clone());
                    if let (Some(s), Some(old)) = (segs.as_mut(), delta.segs.as_ref()) {
                        s.push(old[i].clone());
                    }
                }
                None => {
                    vals.push(m.zero());
                    if let Some(s) = segs.as_mut() {
                        s.push(Vec::new());
                    }
                }
            }
        }
        if let Some(x) = self.intro[b] {
            let xi = nodes.binary_search(&x).expect("introduced node lies in its bag");
            let dx = vals[xi].clone();
            let sx = segs.as_ref().map(|s: &Vec<Vec<Seg>>| s[xi].clone());
            for (k, &w) in nodes.iter().enumerate() {
                let cand = if up {
                    let ld = self.local_distance(b, x, w).expect("bag entry");
                    m.times(&dx, ld)
                } else {
                    let ld = self.local_distance(b, w, x).expect("bag entry");
                    m.times(ld, &dx)
                };
                let next = m.plus(&vals[k], &cand);
                if let (Some(s), Some(sx)) = (segs.as_mut(), sx.as_ref()) {
                    if !m.eq(&next, &vals[k]) {
                        s[k] = if up {
                            let mut p = sx.clone();
                            p.push((b, x, w));
                            p
                        } else {
                            let mut p = vec![(b, w, x)];
                            p.extend(sx.iter().copied());
                            p
                        };
                    }
                }
                vals[k] = next;
            }
        }
        *delta = DeltaMap { nodes, vals, segs };
    }

    fn offer(
        m: &mut Meter<'_, S>,
        best: &mut S::Value,
        best_segs: &mut Option<Vec<Seg>>,
        du: &DeltaMap<S::Value>,
        dv: &DeltaMap<S::Value>,
        x: usize,
    ) {
        let (i, j) = (du.get(x).expect("x in bag"), dv.get(x).expect("x in bag"));
        let cand = m.times(&du.vals[i], &dv.vals[j]);
        let next = m.plus(best, &cand);
        if let (Some(su), Some(sv)) = (du.segs.as_ref(), dv.segs.as_ref()) {
            if !m.eq(&next, best) {
                let mut p = su[i].clone();
                p.extend(sv[j].iter().copied());
                *best_segs = Some(p);
            }
        }
        *best = next;
    }

    fn run(&self, u: usize, v: usize, track: bool, trace: bool) -> Result<Run<S::Value>> {
        let bu = self.check_node(u)?;
        let bv = self.check_node(v)?;
        let mut m = Meter::new(&self.sr);
        let mut steps = Vec::new();
        let record = |steps: &mut Vec<TraceStep<S::Value>>,
                      bag: usize,
                      phase: Phase,
                      du: Option<&DeltaMap<S::Value>>,
                      dv: Option<&DeltaMap<S::Value>>,
                      best: Option<&S::Value>| {
            if trace {
                steps.push(TraceStep {
                    bag,
                    phase,
                    from_source: du.map(DeltaMap::snapshot).unwrap_or_default(),
                    to_target: dv.map(DeltaMap::snapshot).unwrap_or_default(),
                    best: best.cloned(),
                });
            }
        };

        let mut du = self.start_map(&mut m, bu, u, true, track);
        let mut dv = self.start_map(&mut m, bv, v, false, track);
        record(&mut steps, bu, Phase::Start, Some(&du), None, None);
        record(&mut steps, bv, Phase::Start, None, Some(&dv), None);

        let top = self.td.lca(bu, bv);
        let mut b = bu;
        while b != top {
            b = self.td.parent(b).expect("ancestor below the common bag");
            self.climb(&mut m, b, &mut du, true);
            record(&mut steps, b, Phase::SourceSide, Some(&du), None, None);
        }
        let mut b = bv;
        while b != top {
            b = self.td.parent(b).expect("ancestor below the common bag");
            self.climb(&mut m, b, &mut dv, false);
            record(&mut steps, b, Phase::TargetSide, None, Some(&dv), None);
        }

        let mut best = m.zero();
        let mut best_segs = None;
        for &x in self.td.bag(top) {
            Self::offer(&mut m, &mut best, &mut best_segs, &du, &dv, x);
        }
        record(&mut steps, top, Phase::Common, Some(&du), Some(&dv), Some(&best));
        let mut b = top;
        while let Some(p) = self.td.parent(b) {
            b = p;
            self.climb(&mut m, b, &mut du, true);
            self.climb(&mut m, b, &mut dv, false);
            if let Some(x) = self.intro[b] {
                Self::offer(&mut m, &mut best, &mut best_segs, &du, &dv, x);
            }
            record(&mut steps, b, Phase::Common, Some(&du), Some(&dv), Some(&best));
        }
        self.ops.record(&m.tally);
        Ok(Run {
            value: best,
            segs: if track {
                Some(best_segs.unwrap_or_default())
            } else {
                None
            },
            tally: m.tally,
            trace: steps,
        })
    }
}
