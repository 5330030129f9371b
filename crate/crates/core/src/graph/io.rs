//! Line-oriented graph files.
//!
//! ```text
//! # comment
//! p graph <n> <m>
//! v <id> <name>
//! e <u> <v> <weight-text>
//! ```

use super::WeightedGraph;
use crate::error::{Error, Result};
use crate::semiring::Semiring;

/// A parsed graph file whose weights are still text.
#[derive(Debug, Clone, Default)]
pub struct GraphFile {
    pub n: usize,
    /// `(u, v, weight text, line number)`.
    pub edges: Vec<(usize, usize, String, usize)>,
    pub names: Vec<(usize, String)>,
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, col: usize, what: &str) -> Result<T> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(line, col, format!("expected {what}")))
}

/// Parses the structure of a graph file without interpreting weights.
pub fn parse_graph_file(text: &str) -> Result<GraphFile> {
    let mut header: Option<(usize, usize)> = None;
    let mut file = GraphFile::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(Error::parse(line_no, 1, "duplicate header"));
                }
                if toks.next() != Some("graph") {
                    return Err(Error::parse(line_no, 3, "expected 'p graph <n> <m>'"));
                }
                let n = field(toks.next(), line_no, 9, "node count")?;
                let m = field(toks.next(), line_no, 11, "edge count")?;
                header = Some((n, m));
                file.n = n;
            }
            Some("v") => {
                let n = header
                    .ok_or_else(|| Error::parse(line_no, 1, "node line before header"))?
                    .0;
                let id: usize = field(toks.next(), line_no, 3, "node id")?;
                if id >= n {
                    return Err(Error::IndexOutOfRange { index: id, limit: n });
                }
                let name = toks
                    .next()
                    .ok_or_else(|| Error::parse(line_no, 3, "expected node name"))?;
                file.names.push((id, name.to_string()));
            }
            Some("e") => {
                let n = header
                    .ok_or_else(|| Error::parse(line_no, 1, "edge line before header"))?
                    .0;
                let u: usize = field(toks.next(), line_no, 3, "source node")?;
                let v: usize = field(toks.next(), line_no, 5, "target node")?;
                for x in [u, v] {
                    if x >= n {
                        return Err(Error::IndexOutOfRange { index: x, limit: n });
                    }
                }
                let weight: Vec<&str> = toks.collect();
                if weight.is_empty() {
                    return Err(Error::parse(line_no, line.len(), "missing weight"));
                }
                file.edges.push((u, v, weight.join(" "), line_no));
            }
            Some(other) => {
                return Err(Error::parse(line_no, 1, format!("unknown directive {other:?}")));
            }
            None => {}
        }
    }
    let (_, m) = header.ok_or_else(|| Error::parse(1, 1, "missing 'p graph' header"))?;
    if m != file.edges.len() {
        return Err(Error::parse(
            1,
            1,
            format!("header declares {m} edges, found {}", file.edges.len()),
        ));
    }
    Ok(file)
}

impl GraphFile {
    /// Interprets the weights with `sr`.
    pub fn into_graph<S: Semiring>(self, sr: &S) -> Result<WeightedGraph<S::Value>> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for (u, v, text, line) in self.edges {
            let w = sr.parse_value(&text).map_err(|e| match e {
                Error::Parse { column, message, .. } => Error::Parse { line, column, message },
                other => other,
            })?;
            edges.push((u, v, w));
        }
        let mut g = WeightedGraph::from_edges(sr, self.n, edges)?;
        if !self.names.is_empty() {
            let mut names: Vec<String> = (0..self.n).map(|i| i.to_string()).collect();
            for (id, name) in self.names {
                names[id] = name;
            }
            g.set_names(names)?;
        }
        Ok(g)
    }
}

/// Parses a graph file and its weights.
pub fn load_graph<S: Semiring>(text: &str, sr: &S) -> Result<WeightedGraph<S::Value>> {
    parse_graph_file(text)?.into_graph(sr)
}

/// Renders a graph in the file format accepted by [`load_graph`].
pub fn save_graph<S: Semiring>(g: &WeightedGraph<S::Value>, sr: &S) -> String {
    let mut out = format!("p graph {} {}\n", g.n(), g.m());
    if let Some(names) = g.names() {
        for (i, name) in names.iter().enumerate() {
            out.push_str(&format!("v {i} {name}\n"));
        }
    }
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        out.push_str(&format!("e {u} {v} {}\n", sr.format_value(g.edge_weight(id))));
    }
    out
}
