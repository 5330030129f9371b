//! Closed semirings and operation accounting.
//!
//! Every path computation in the crate is generic over [`Semiring`]. Engines
//! route calls through a [`Meter`] so that the number of `plus`, `times` and
//! `star` applications, and the primitive steps they cost, can be reported.

mod boolean;
mod counting;
mod flow;
mod tropical;
mod viterbi;

pub use boolean::Boolean;
pub use counting::Counting;
pub use flow::{FlowFunction, FlowSemiring, MeetMode};
pub use tropical::Tropical;
pub use viterbi::Viterbi;

use std::fmt::Debug;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::Result;

/// A partially complete semiring with a closure operator.
pub trait Semiring: Send + Sync {
    type Value: Clone + Debug + Send + Sync;

    fn name(&self) -> &'static str;
    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn plus(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn times(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    /// `s* = 1 ⊕ s ⊗ s*`.
    fn star(&self, s: &Self::Value) -> Result<Self::Value>;
    /// Value equality, with tolerance for real carriers.
    fn eq(&self, a: &Self::Value, b: &Self::Value) -> bool;
    fn parse_value(&self, text: &str) -> Result<Self::Value>;
    fn format_value(&self, v: &Self::Value) -> String;

    /// Human-facing rendering; defaults to the file format.
    fn display_value(&self, v: &Self::Value) -> String {
        self.format_value(v)
    }

    fn is_zero(&self, v: &Self::Value) -> bool {
        self.eq(v, &self.zero())
    }

    /// True when `star` is `1` on every value it is defined for.
    fn trivial_closure(&self) -> bool;

    /// True when `plus` always returns one of its arguments.
    fn selective(&self) -> bool;

    /// Primitive steps charged for one `plus`.
    fn plus_cost(&self) -> u64 {
        1
    }

    /// Primitive steps charged for one `times`.
    fn times_cost(&self) -> u64 {
        1
    }

    /// Length bound of strictly ascending chains per value, used to cap
    /// fixpoint iteration.
    fn chain_factor(&self) -> usize {
        4
    }
}

/// Plain operation counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub plus: u64,
    pub times: u64,
    pub star: u64,
    pub steps: u64,
}

impl Tally {
    pub fn total(&self) -> u64 {
        self.plus + self.times + self.star
    }

    pub fn add(&mut self, other: &Tally) {
        self.plus += other.plus;
        self.times += other.times;
        self.star += other.star;
        self.steps += other.steps;
    }
}

/// Shared, thread-safe operation counter owned by one engine instance.
#[derive(Debug, Default)]
pub struct OpCounter {
    plus: AtomicU64,
    times: AtomicU64,
    star: AtomicU64,
    steps: AtomicU64,
}

impl OpCounter {
    pub fn record(&self, t: &Tally) {
        self.plus.fetch_add(t.plus, Ordering::Relaxed);
        self.times.fetch_add(t.times, Ordering::Relaxed);
        self.star.fetch_add(t.star, Ordering::Relaxed);
        self.steps.fetch_add(t.steps, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> Tally {
        Tally {
            plus: self.plus.load(Ordering::Relaxed),
            times: self.times.load(Ordering::Relaxed),
            star: self.star.load(Ordering::Relaxed),
            steps: self.steps.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.plus.store(0, Ordering::Relaxed);
        self.times.store(0, Ordering::Relaxed);
        self.star.store(0, Ordering::Relaxed);
        self.steps.store(0, Ordering::Relaxed);
    }
}

impl Clone for OpCounter {
    fn clone(&self) -> Self {
        let c = OpCounter::default();
        c.record(&self.snapshot());
        c
    }
}

/// A semiring handle that counts every operation it performs.
pub struct Meter<'a, S: Semiring> {
    pub sr: &'a S,
    pub tally: Tally,
}

impl<'a, S: Semiring> Meter<'a, S> {
    pub fn new(sr: &'a S) -> Self {
        Meter {
            sr,
            tally: Tally::default(),
        }
    }

    #[inline]
    pub fn plus(&mut self, a: &S::Value, b: &S::Value) -> S::Value {
        self.tally.plus += 1;
        self.tally.steps += self.sr.plus_cost();
        self.sr.plus(a, b)
    }

    #[inline]
    pub fn times(&mut self, a: &S::Value, b: &S::Value) -> S::Value {
        self.tally.times += 1;
        self.tally.steps += self.sr.times_cost();
        self.sr.times(a, b)
    }

    /// `acc ← acc ⊕ v`.
    #[inline]
    pub fn accumulate(&mut self, acc: &mut S::Value, v: &S::Value) {
        *acc = self.plus(acc, v);
    }

    pub fn star(&mut self, s: &S::Value) -> Result<S::Value> {
        self.tally.star += 1;
        self.tally.steps += self.sr.times_cost() * self.sr.chain_factor() as u64;
        self.sr.star(s)
    }

    #[inline]
    pub fn zero(&self) -> S::Value {
        self.sr.zero()
    }

    #[inline]
    pub fn one(&self) -> S::Value {
        self.sr.one()
    }

    #[inline]
    pub fn eq(&self, a: &S::Value, b: &S::Value) -> bool {
        self.sr.eq(a, b)
    }

    #[inline]
    pub fn is_zero(&self, a: &S::Value) -> bool {
        self.sr.is_zero(a)
    }
}

/// Outcome of one axiom check.
#[derive(Debug, Clone)]
pub struct AxiomResult {
    pub axiom: &'static str,
    pub passed: bool,
    pub counterexample: Option<String>,
}

/// Result of [`check_axioms`].
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> Vec<&AxiomResult> {
        self.results.iter().filter(|r| !r.passed).collect()
    }
}

/// Checks the semiring laws on all pairs and triples of `samples`.
///
/// `eq` is given explicitly so callers can pick the tolerance; for exact
/// carriers pass the semiring's own equality.
pub fn check_axioms<S, F>(sr: &S, samples: &[S::Value], eq: F) -> AxiomReport
where
    S: Semiring,
    F: Fn(&S::Value, &S::Value) -> bool,
{
    let mut checks: Vec<(&'static str, Option<String>)> = vec![
        ("plus associative", None),
        ("plus commutative", None),
        ("plus neutral", None),
        ("times associative", None),
        ("times neutral", None),
        ("left distributive", None),
        ("right distributive", None),
        ("zero absorbing", None),
        ("star identity", None),
    ];
    let fail = |slot: &mut Option<String>, msg: String| {
        if slot.is_none() {
            *slot = Some(msg);
        }
    };
    let zero = sr.zero();
    let one = sr.one();
    for a in samples {
        if !eq(&sr.plus(a, &zero), a) {
            fail(&mut checks[2].1, format!("{a:?} + 0"));
        }
        if !eq(&sr.times(a, &one), a) || !eq(&sr.times(&one, a), a) {
            fail(&mut checks[4].1, format!("{a:?} * 1"));
        }
        if !eq(&sr.times(a, &zero), &zero) || !eq(&sr.times(&zero, a), &zero) {
            fail(&mut checks[7].1, format!("{a:?} * 0"));
        }
        if let Ok(s) = sr.star(a) {
            let right = sr.plus(&one, &sr.times(a, &s));
            let left = sr.plus(&one, &sr.times(&s, a));
            if !eq(&s, &right) || !eq(&s, &left) {
                fail(&mut checks[8].1, format!("star({a:?}) = {s:?}"));
            }
        }
        for b in samples {
            if !eq(&sr.plus(a, b), &sr.plus(b, a)) {
                fail(&mut checks[1].1, format!("{a:?}, {b:?}"));
            }
            for c in samples {
                let l = sr.plus(&sr.plus(a, b), c);
                let r = sr.plus(a, &sr.plus(b, c));
                if !eq(&l, &r) {
                    fail(&mut checks[0].1, format!("{a:?}, {b:?}, {c:?}"));
                }
                let l = sr.times(&sr.times(a, b), c);
                let r = sr.times(a, &sr.times(b, c));
                if !eq(&l, &r) {
                    fail(&mut checks[3].1, format!("{a:?}, {b:?}, {c:?}"));
                }
                let l = sr.times(a, &sr.plus(b, c));
                let r = sr.plus(&sr.times(a, b), &sr.times(a, c));
                if !eq(&l, &r) {
                    fail(&mut checks[5].1, format!("{a:?}, {b:?}, {c:?}"));
                }
                let l = sr.times(&sr.plus(a, b), c);
                let r = sr.plus(&sr.times(a, c), &sr.times(b, c));
                if !eq(&l, &r) {
                    fail(&mut checks[6].1, format!("{a:?}, {b:?}, {c:?}"));
                }
            }
        }
    }
    AxiomReport {
        results: checks
            .into_iter()
            .map(|(axiom, cx)| AxiomResult {
                axiom,
                passed: cx.is_none(),
                counterexample: cx,
            })
            .collect(),
    }
}

/// Absolute tolerance used for real-valued carriers.
pub const REAL_TOLERANCE: f64 = 1e-9;

pub(crate) fn reals_close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol
}

/// Parses a finite or `inf` real, reporting the column of the first bad byte.
pub(crate) fn parse_real(text: &str) -> Result<f64> {
    use crate::error::Error;
    let t = text.trim();
    if t == "inf" || t == "+inf" {
        return Ok(f64::INFINITY);
    }
    let offset = text.len() - text.trim_start().len();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => {
            let bad = t
                .char_indices()
                .find(|&(_, c)| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
                .map(|(i, _)| i)
                .unwrap_or(0);
            Err(Error::parse(1, offset + bad + 1, format!("invalid number {t:?}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_axioms_exhaustive() {
        let sr = Boolean;
        let report = check_axioms(&sr, &[false, true], |a, b| a == b);
        assert!(report.all_passed(), "{:?}", report.failures());
    }

    #[test]
    fn tropical_axioms_on_fixed_samples() {
        let sr = Tropical;
        let report = check_axioms(&sr, &[0.0, 1.0, 5.0, f64::INFINITY], |a, b| sr.eq(a, b));
        assert!(report.all_passed(), "{:?}", report.failures());
    }

    #[test]
    fn meter_counts_each_call() {
        let sr = Tropical;
        let mut m = Meter::new(&sr);
        let x = m.plus(&1.0, &2.0);
        let y = m.times(&x, &3.0);
        m.star(&y).unwrap();
        assert_eq!(m.tally.plus, 1);
        assert_eq!(m.tally.times, 1);
        assert_eq!(m.tally.star, 1);
        assert_eq!(m.tally.total(), 3);
    }

    #[test]
    fn counter_accumulates_tallies() {
        let c = OpCounter::default();
        c.record(&Tally {
            plus: 2,
            times: 3,
            star: 0,
            steps: 5,
        });
        c.record(&Tally {
            plus: 1,
            times: 0,
            star: 1,
            steps: 2,
        });
        let s = c.snapshot();
        assert_eq!((s.plus, s.times, s.star, s.steps), (3, 3, 1, 7));
        c.reset();
        assert_eq!(c.snapshot().total(), 0);
    }

    #[test]
    fn broken_samples_are_reported() {
        // Tropical minus the zero check: a NaN sample breaks neutrality.
        let sr = Tropical;
        let report = check_axioms(&sr, &[f64::NAN], |a, b| sr.eq(a, b));
        assert!(!report.all_passed());
    }
}
