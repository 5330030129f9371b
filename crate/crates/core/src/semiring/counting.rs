use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::Semiring;
use crate::error::Result;

/// Wraps a semiring and counts `plus`, `times` and `star` calls, for code
/// that calls the semiring directly instead of through a [`super::Meter`].
#[derive(Debug, Clone)]
pub struct Counting<S> {
    pub inner: S,
    ops: Arc<AtomicU64>,
}

impl<S: Semiring> Counting<S> {
    pub fn new(inner: S) -> Self {
        Counting {
            inner,
            ops: Arc::default(),
        }
    }

    /// Operations counted so far, across clones.
    pub fn ops(&self) -> u64 {
        self.ops.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.ops.store(0, Ordering::Relaxed);
    }

    fn tick(&self) {
        self.ops.fetch_add(1, Ordering::Relaxed);
    }
}

impl<S: Semiring> Semiring for Counting<S> {
    type Value = S::Value;

    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn zero(&self) -> S::Value {
        self.inner.zero()
    }

    fn one(&self) -> S::Value {
        self.inner.one()
    }

    fn plus(&self, a: &S::Value, b: &S::Value) -> S::Value {
        self.tick();
        self.inner.plus(a, b)
    }

    fn times(&self, a: &S::Value, b: &S::Value) -> S::Value {
        self.tick();
        self.inner.times(a, b)
    }

    fn star(&self, s: &S::Value) -> Result<S::Value> {
        self.tick();
        self.inner.star(s)
    }

    fn eq(&self, a: &S::Value, b: &S::Value) -> bool {
        self.inner.eq(a, b)
    }

    fn parse_value(&self, text: &str) -> Result<S::Value> {
        self.inner.parse_value(text)
    }

    fn format_value(&self, v: &S::Value) -> String {
        self.inner.format_value(v)
    }

    fn display_value(&self, v: &S::Value) -> String {
        self.inner.display_value(v)
    }

    fn is_zero(&self, v: &S::Value) -> bool {
        self.inner.is_zero(v)
    }

    fn trivial_closure(&self) -> bool {
        self.inner.trivial_closure()
    }

    fn selective(&self) -> bool {
        self.inner.selective()
    }

    fn plus_cost(&self) -> u64 {
        self.inner.plus_cost()
    }

    fn times_cost(&self) -> u64 {
        self.inner.times_cost()
    }

    fn chain_factor(&self) -> usize {
        self.inner.chain_factor()
    }
}
