use super::Semiring;
use crate::error::{Error, Result};

/// Reachability: `(bool, ∨, ∧, false, true)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Boolean;

impl Semiring for Boolean {
    type Value = bool;

    fn name(&self) -> &'static str {
        "bool"
    }

    fn zero(&self) -> bool {
        false
    }

    fn one(&self) -> bool {
        true
    }

    fn plus(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }

    fn times(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }

    fn star(&self, _s: &bool) -> Result<bool> {
        Ok(true)
    }

    fn eq(&self, a: &bool, b: &bool) -> bool {
        a == b
    }

    fn parse_value(&self, text: &str) -> Result<bool> {
        match text.trim() {
            "1" | "true" | "True" => Ok(true),
            "0" | "false" | "False" => Ok(false),
            other => Err(Error::parse(
                1,
                text.len() - text.trim_start().len() + 1,
                format!("expected 0 or 1, found {other:?}"),
            )),
        }
    }

    fn format_value(&self, v: &bool) -> String {
        if *v { "1" } else { "0" }.to_string()
    }

    fn display_value(&self, v: &bool) -> String {
        if *v { "True" } else { "False" }.to_string()
    }

    fn trivial_closure(&self) -> bool {
        true
    }

    fn selective(&self) -> bool {
        true
    }

    fn chain_factor(&self) -> usize {
        1
    }
}
