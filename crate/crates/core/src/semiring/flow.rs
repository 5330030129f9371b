//! Distributive flow functions over a finite fact domain.
//!
//! A function `2^D → 2^D` is stored as a relation on `D ∪ {Λ}`: row `s`
//! holds the facts that `s` flows to, and row `Λ` holds facts generated
//! unconditionally. Every non-zero function keeps `Λ → Λ`.

use super::Semiring;
use crate::error::{Error, Result};

/// Which lattice meet the analysis uses to join paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeetMode {
    /// May-analysis: facts from any path survive.
    Union,
    /// Must-analysis: only facts holding on every path survive.
    Intersection,
}

/// A relation over `D ∪ {Λ}`; index `domain` stands for `Λ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlowFunction {
    domain: usize,
    rows: Vec<u64>,
}

impl FlowFunction {
    pub fn empty(domain: usize) -> Self {
        FlowFunction {
            domain,
            rows: vec![0; domain + 1],
        }
    }

    pub fn identity(domain: usize) -> Self {
        let mut f = Self::empty(domain);
        for (i, row) in f.rows.iter_mut().enumerate() {
            *row = 1 << i;
        }
        f
    }

    /// Builds a function from explicit edges; `None` stands for `Λ`.
    /// `Λ → Λ` is always added.
    pub fn from_pairs(domain: usize, pairs: &[(Option<usize>, Option<usize>)]) -> Self {
        let mut f = Self::empty(domain);
        let idx = |x: Option<usize>| x.unwrap_or(domain);
        for &(s, d) in pairs {
            f.rows[idx(s)] |= 1 << idx(d);
        }
        f.rows[domain] |= 1 << domain;
        f
    }

    /// Identity on facts outside `kill`, plus `Λ → g` for every `g` in `gen`.
    pub fn gen_kill(domain: usize, gen: &[usize], kill: &[usize]) -> Self {
        let mut f = Self::identity(domain);
        for &k in kill {
            f.rows[k] &= !(1 << k);
        }
        for &g in gen {
            f.rows[domain] |= 1 << g;
        }
        f
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn contains(&self, src: Option<usize>, dst: Option<usize>) -> bool {
        let s = src.unwrap_or(self.domain);
        let d = dst.unwrap_or(self.domain);
        self.rows[s] >> d & 1 == 1
    }

    /// All `(src, dst)` pairs, `None` for `Λ`.
    pub fn pairs(&self) -> Vec<(Option<usize>, Option<usize>)> {
        let lam = |i: usize| if i == self.domain { None } else { Some(i) };
        let mut out = Vec::new();
        for s in 0..=self.domain {
            for d in 0..=self.domain {
                if self.rows[s] >> d & 1 == 1 {
                    out.push((lam(s), lam(d)));
                }
            }
        }
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        FlowFunction {
            domain: self.domain,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect(),
        }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut out = 0u64;
                let mut bits = r;
                while bits != 0 {
                    let s = bits.trailing_zeros() as usize;
                    out |= other.rows[s];
                    bits &= bits - 1;
                }
                out
            })
            .collect();
        FlowFunction {
            domain: self.domain,
            rows,
        }
    }

    fn image(&self, facts: u64) -> u64 {
        let mut out = 0u64;
        let mut bits = facts | 1 << self.domain;
        while bits != 0 {
            let s = bits.trailing_zeros() as usize;
            out |= self.rows[s];
            bits &= bits - 1;
        }
        out & !(1 << self.domain)
    }

    /// Applies the function to a fact set given as a bitmask over `D`.
    pub fn apply(&self, facts: u64, mode: MeetMode) -> u64 {
        let all = (1u64 << self.domain) - 1;
        match mode {
            MeetMode::Union => self.image(facts & all),
            MeetMode::Intersection => all & !self.image(all & !facts),
        }
    }
}

/// The meet-composition semiring `(F, ⊓, ∘, ∅, I)` for a fixed domain.
///
/// In intersection mode a relation `R` denotes `S ↦ D \ R(D \ S)`, so meet
/// is still relation union and the algebra is shared by both modes.
#[derive(Debug, Clone, Copy)]
pub struct FlowSemiring {
    domain: usize,
    mode: MeetMode,
}

impl FlowSemiring {
    pub const MAX_DOMAIN: usize = 63;

    pub fn new(domain: usize, mode: MeetMode) -> Result<Self> {
        if domain == 0 || domain > Self::MAX_DOMAIN {
            return Err(Error::Unsupported(format!(
                "flow domain size {domain} outside 1..={}",
                Self::MAX_DOMAIN
            )));
        }
        Ok(FlowSemiring { domain, mode })
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn mode(&self) -> MeetMode {
        self.mode
    }

    /// Reads the `|D|=k;` prefix of a flow value without a semiring.
    pub fn domain_of(text: &str) -> Result<usize> {
        let t = text.trim();
        let rest = t
            .strip_prefix("|D|=")
            .ok_or_else(|| Error::parse(1, 1, "expected |D|=k;"))?;
        let end = rest
            .find(';')
            .ok_or_else(|| Error::parse(1, t.len(), "missing ';' after domain size"))?;
        rest[..end]
            .trim()
            .parse()
            .map_err(|_| Error::parse(1, 5, "invalid domain size"))
    }
}

impl Semiring for FlowSemiring {
    type Value = FlowFunction;

    fn name(&self) -> &'static str {
        "ifds"
    }

    fn zero(&self) -> FlowFunction {
        FlowFunction::empty(self.domain)
    }

    fn one(&self) -> FlowFunction {
        FlowFunction::identity(self.domain)
    }

    fn plus(&self, a: &FlowFunction, b: &FlowFunction) -> FlowFunction {
        a.union(b)
    }

    fn times(&self, a: &FlowFunction, b: &FlowFunction) -> FlowFunction {
        a.then(b)
    }

    fn star(&self, s: &FlowFunction) -> Result<FlowFunction> {
        let mut acc = self.one();
        loop {
            let next = acc.union(&acc.then(s));
            if next == acc {
                return Ok(acc);
            }
            acc = next;
        }
    }

    fn eq(&self, a: &FlowFunction, b: &FlowFunction) -> bool {
        a == b
    }

    fn parse_value(&self, text: &str) -> Result<FlowFunction> {
        let lead = text.len() - text.trim_start().len();
        let t = text.trim();
        let domain = Self::domain_of(t)?;
        if domain != self.domain {
            return Err(Error::parse(
                1,
                lead + 1,
                format!("domain size {domain} does not match {}", self.domain),
            ));
        }
        let body_start = t.find(';').unwrap() + 1;
        let mut f = FlowFunction::empty(domain);
        let mut pos = body_start;
        for item in t[body_start..].split(',') {
            let col = lead + pos + 1;
            pos += item.len() + 1;
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (s, d) = item
                .split_once("->")
                .ok_or_else(|| Error::parse(1, col, format!("expected src->dst, found {item:?}")))?;
            let fact = |x: &str| -> Result<usize> {
                let x = x.trim();
                if x == "L" {
                    return Ok(domain);
                }
                match x.parse::<usize>() {
                    Ok(v) if v < domain => Ok(v),
                    _ => Err(Error::parse(1, col, format!("invalid fact {x:?}"))),
                }
            };
            let (s, d) = (fact(s)?, fact(d)?);
            f.rows[s] |= 1 << d;
        }
        if !f.is_empty() && !f.contains(None, None) {
            return Err(Error::parse(1, lead + 1, "non-empty flow function lacks L->L"));
        }
        Ok(f)
    }

    fn format_value(&self, v: &FlowFunction) -> String {
        let name = |i: usize| {
            if i == v.domain {
                "L".to_string()
            } else {
                i.to_string()
            }
        };
        let mut parts = Vec::new();
        for s in 0..=v.domain {
            for d in 0..=v.domain {
                if v.rows[s] >> d & 1 == 1 {
                    parts.push(format!("{}->{}", name(s), name(d)));
                }
            }
        }
        format!("|D|={};{}", v.domain, parts.join(","))
    }

    fn trivial_closure(&self) -> bool {
        false
    }

    fn selective(&self) -> bool {
        false
    }

    fn plus_cost(&self) -> u64 {
        let d = self.domain as u64 + 1;
        d * d
    }

    fn times_cost(&self) -> u64 {
        let d = self.domain as u64 + 1;
        d * d * d
    }

    fn chain_factor(&self) -> usize {
        (self.domain + 1) * (self.domain + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::check_axioms;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_fn(rng: &mut ChaCha8Rng, domain: usize) -> FlowFunction {
        if rng.gen_bool(0.1) {
            return FlowFunction::empty(domain);
        }
        let mut pairs = Vec::new();
        for s in 0..=domain {
            for d in 0..=domain {
                if rng.gen_bool(0.3) {
                    let l = |i: usize| if i == domain { None } else { Some(i) };
                    pairs.push((l(s), l(d)));
                }
            }
        }
        FlowFunction::from_pairs(domain, &pairs)
    }

    #[test]
    fn identity_parses() {
        let sr = FlowSemiring::new(2, MeetMode::Union).unwrap();
        let f = sr.parse_value("|D|=2;0->0,1->1,L->L").unwrap();
        assert_eq!(f, sr.one());
        assert_eq!(sr.format_value(&f), "|D|=2;0->0,1->1,L->L");
    }

    #[test]
    fn empty_parses_to_zero() {
        let sr = FlowSemiring::new(3, MeetMode::Union).unwrap();
        assert_eq!(sr.parse_value("|D|=3;").unwrap(), sr.zero());
    }

    #[test]
    fn lambda_anchor_required() {
        let sr = FlowSemiring::new(2, MeetMode::Union).unwrap();
        assert!(sr.parse_value("|D|=2;0->1").is_err());
        assert!(sr.parse_value("|D|=3;L->L").is_err());
        assert!(sr.parse_value("|D|=2;0->5,L->L").is_err());
    }

    #[test]
    fn star_of_gen_is_meet_with_identity() {
        let sr = FlowSemiring::new(1, MeetMode::Union).unwrap();
        let gen = FlowFunction::gen_kill(1, &[0], &[]);
        // gen d1 already contains the identity, so gen* = I ⊓ gen = gen.
        let star = sr.star(&gen).unwrap();
        assert_eq!(star, sr.plus(&sr.one(), &gen));
    }

    #[test]
    fn axioms_hold_on_random_functions() {
        let sr = FlowSemiring::new(2, MeetMode::Union).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<_> = (0..10).map(|_| random_fn(&mut rng, 2)).collect();
        let report = check_axioms(&sr, &samples, |a, b| a == b);
        assert!(report.all_passed(), "{:?}", report.failures());
    }

    #[test]
    fn composition_matches_function_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for domain in 1..=3 {
            for mode in [MeetMode::Union, MeetMode::Intersection] {
                let sr = FlowSemiring::new(domain, mode).unwrap();
                for _ in 0..50 {
                    // The empty relation stands for "no path", not for a function.
                    let f = random_fn(&mut rng, domain);
                    if f.is_empty() {
                        continue;
                    }
                    let g = random_fn(&mut rng, domain);
                    let fg = sr.times(&f, &g);
                    let meet = sr.plus(&f, &g);
                    for s in 0..(1u64 << domain) {
                        assert_eq!(fg.apply(s, mode), g.apply(f.apply(s, mode), mode));
                        let (a, b) = (f.apply(s, mode), g.apply(s, mode));
                        let expect = match mode {
                            MeetMode::Union => a | b,
                            MeetMode::Intersection => a & b,
                        };
                        assert_eq!(meet.apply(s, mode), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn intersection_zero_is_top_and_one_is_identity() {
        let sr = FlowSemiring::new(3, MeetMode::Intersection).unwrap();
        for s in 0..8u64 {
            assert_eq!(sr.zero().apply(s, MeetMode::Intersection), 0b111);
            assert_eq!(sr.one().apply(s, MeetMode::Intersection), s);
        }
    }

    #[test]
    fn costs_follow_domain() {
        let sr = FlowSemiring::new(3, MeetMode::Union).unwrap();
        assert_eq!(sr.plus_cost(), 16);
        assert_eq!(sr.times_cost(), 64);
    }
}
