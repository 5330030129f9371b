use super::{parse_real, reals_close, Semiring, REAL_TOLERANCE};
use crate::error::{Error, Result};

/// Shortest paths: `(ℝ ∪ {∞}, min, +, ∞, 0)`.
///
/// Negative weights are accepted; `star` of a negative value signals a
/// negative cycle.
#[derive(Debug, Clone, Copy, Default)]
pub struct Tropical;

impl Semiring for Tropical {
    type Value = f64;

    fn name(&self) -> &'static str {
        "trop"
    }

    fn zero(&self) -> f64 {
        f64::INFINITY
    }

    fn one(&self) -> f64 {
        0.0
    }

    fn plus(&self, a: &f64, b: &f64) -> f64 {
        a.min(*b)
    }

    fn times(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }

    fn star(&self, s: &f64) -> Result<f64> {
        if *s < -REAL_TOLERANCE {
            Err(Error::NegativeCycle)
        } else {
            Ok(0.0)
        }
    }

    fn eq(&self, a: &f64, b: &f64) -> bool {
        reals_close(*a, *b, REAL_TOLERANCE)
    }

    fn parse_value(&self, text: &str) -> Result<f64> {
        parse_real(text)
    }

    fn format_value(&self, v: &f64) -> String {
        if v.is_infinite() {
            "inf".to_string()
        } else {
            format!("{v}")
        }
    }

    fn trivial_closure(&self) -> bool {
        true
    }

    fn selective(&self) -> bool {
        true
    }
}
