//! PACE-style `.td` files: `s td <bags> <width+1> <n>`, `b <id> <v...>`, then
//! tree edges `<a> <b>`. Ids are 1-based on disk. A `c root <id>` comment
//! selects the root bag; bag 1 is the root otherwise.

use super::TreeDecomposition;
use crate::error::{Error, Result};

/// A `.td` file as written, before tree checks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawTd {
    pub n_nodes: usize,
    pub declared_width_plus_one: usize,
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
    pub root: Option<usize>,
}

impl RawTd {
    pub fn into_td(self) -> Result<TreeDecomposition> {
        TreeDecomposition::from_edges(self.n_nodes, self.bags, &self.edges, self.root)
    }
}

fn number(tok: Option<&str>, line: usize, col: usize) -> Result<usize> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(line, col, "expected a number"))
}

fn one_based(x: usize, limit: usize, line: usize) -> Result<usize> {
    if x == 0 {
        return Err(Error::parse(line, 1, "ids are 1-based"));
    }
    if x > limit {
        return Err(Error::IndexOutOfRange { index: x - 1, limit });
    }
    Ok(x - 1)
}

pub fn parse_td(text: &str) -> Result<RawTd> {
    let mut raw = RawTd::default();
    let mut seen = Vec::new();
    let mut header = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let mut toks = line.split_whitespace();
        let Some(head) = toks.next() else { continue };
        match head {
            "c" => {
                if toks.next() == Some("root") {
                    raw.root = Some(number(toks.next(), line_no, 8)?);
                }
            }
            "s" => {
                if header {
                    return Err(Error::parse(line_no, 1, "duplicate header"));
                }
                if toks.next() != Some("td") {
                    return Err(Error::parse(line_no, 3, "expected 's td'"));
                }
                let k = number(toks.next(), line_no, 6)?;
                raw.declared_width_plus_one = number(toks.next(), line_no, 8)?;
                raw.n_nodes = number(toks.next(), line_no, 10)?;
                raw.bags = vec![Vec::new(); k];
                seen = vec![false; k];
                header = true;
            }
            "b" => {
                if !header {
                    return Err(Error::parse(line_no, 1, "bag before header"));
                }
                let id = one_based(number(toks.next(), line_no, 3)?, raw.bags.len(), line_no)?;
                if seen[id] {
                    return Err(Error::parse(line_no, 3, format!("bag {} listed twice", id + 1)));
                }
                seen[id] = true;
                for tok in toks {
                    let v: usize = tok
                        .parse()
                        .map_err(|_| Error::parse(line_no, 5, format!("bad node id {tok:?}")))?;
                    raw.bags[id].push(one_based(v, raw.n_nodes, line_no)?);
                }
            }
            _ => {
                if !header {
                    return Err(Error::parse(line_no, 1, "edge before header"));
                }
                let a = one_based(number(Some(head), line_no, 1)?, raw.bags.len(), line_no)?;
                let b = one_based(number(toks.next(), line_no, 3)?, raw.bags.len(), line_no)?;
                raw.edges.push((a, b));
            }
        }
    }
    if !header {
        return Err(Error::parse(1, 1, "missing 's td' header"));
    }
    if let Some(r) = raw.root {
        raw.root = Some(one_based(r, raw.bags.len(), 1)?);
    }
    Ok(raw)
}

pub fn write_td(td: &TreeDecomposition) -> String {
    let mut out = format!("s td {} {} {}\n", td.num_bags(), td.width() + 1, td.n_nodes());
    if td.root() != 0 {
        out.push_str(&format!("c root {}\n", td.root() + 1));
    }
    for (b, bag) in td.bags().iter().enumerate() {
        out.push_str(&format!("b {}", b + 1));
        for &x in bag {
            out.push_str(&format!(" {}", x + 1));
        }
        out.push('\n');
    }
    for (p, c) in td.tree_edges() {
        out.push_str(&format!("{} {}\n", p + 1, c + 1));
    }
    out
}
