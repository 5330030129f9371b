use super::{parse_real, reals_close, Semiring, REAL_TOLERANCE};
use crate::error::{Error, Result};

/// Most probable paths: `([0,1], max, ·, 0, 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Viterbi;

impl Semiring for Viterbi {
    type Value = f64;

    fn name(&self) -> &'static str {
        "viterbi"
    }

    fn zero(&self) -> f64 {
        0.0
    }

    fn one(&self) -> f64 {
        1.0
    }

    fn plus(&self, a: &f64, b: &f64) -> f64 {
        a.max(*b)
    }

    fn times(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }

    fn star(&self, _s: &f64) -> Result<f64> {
        Ok(1.0)
    }

    fn eq(&self, a: &f64, b: &f64) -> bool {
        reals_close(*a, *b, REAL_TOLERANCE)
    }

    fn parse_value(&self, text: &str) -> Result<f64> {
        let v = parse_real(text)?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::parse(1, 1, format!("probability {v} outside [0,1]")));
        }
        Ok(v)
    }

    fn format_value(&self, v: &f64) -> String {
        format!("{v}")
    }

    fn trivial_closure(&self) -> bool {
        true
    }

    fn selective(&self) -> bool {
        true
    }
}
