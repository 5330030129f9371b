//! Line-oriented RSM files.
//!
//! ```text
//! # comment
//! csm <name> <n> entry <id> exit <id>
//! box <label> in <csm> calls <csm> [at <call-id> <ret-id>]
//! name <csm> <id> <node-name>
//! edge <csm> <u> <v> <weight-text>
//! td <csm> <path>
//! ```
//!
//! Node ids are 0-based. Without `at`, a box appends its call and return
//! nodes after the component's `n` declared nodes. Edge endpoints may be node
//! ids, declared names, `call:<label>` or `ret:<label>`. Directives may appear
//! in any order.

use std::path::Path;

use super::model::Rsm;
use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::treedec::{parse_td, TreeDecomposition};

/// A parsed RSM with the decomposition files it refers to.
#[derive(Debug, Clone)]
pub struct RsmSource<W> {
    pub rsm: Rsm<W>,
    /// Per component, the path given by a `td` line.
    pub td_paths: Vec<Option<String>>,
}

struct Line<'a> {
    no: usize,
    toks: Vec<&'a str>,
}

fn need<'a>(l: &Line<'a>, i: usize, what: &str) -> Result<&'a str> {
    l.toks
        .get(i)
        .copied()
        .ok_or_else(|| Error::parse(l.no, 1, format!("expected {what}")))
}

fn number(l: &Line<'_>, i: usize, what: &str) -> Result<usize> {
    need(l, i, what)?
        .parse()
        .map_err(|_| Error::parse(l.no, 1, format!("expected {what}")))
}

fn keyword(l: &Line<'_>, i: usize, kw: &str) -> Result<()> {
    if need(l, i, kw)? != kw {
        return Err(Error::parse(l.no, 1, format!("expected '{kw}'")));
    }
    Ok(())
}

fn at_line(no: usize, e: Error) -> Error {
    match e {
        Error::Parse { column, message, .. } => Error::Parse {
            line: no,
            column,
            message,
        },
        other => other,
    }
}

/// Parses an RSM file and interprets its weights with `sr`.
pub fn parse_rsm<S: Semiring>(text: &str, sr: &S) -> Result<RsmSource<S::Value>> {
    let mut groups: [Vec<Line<'_>>; 5] = Default::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let slot = match toks[0] {
            "csm" => 0,
            "box" => 1,
            "name" => 2,
            "edge" => 3,
            "td" => 4,
            other => return Err(Error::parse(i + 1, 1, format!("unknown directive {other:?}"))),
        };
        groups[slot].push(Line { no: i + 1, toks });
    }
    let [csms, boxes, names, edges, tds] = groups;

    let mut rsm = Rsm::new();
    for l in &csms {
        let name = need(l, 1, "component name")?;
        let n = number(l, 2, "node count")?;
        keyword(l, 3, "entry")?;
        let entry = number(l, 4, "entry id")?;
        keyword(l, 5, "exit")?;
        let exit = number(l, 6, "exit id")?;
        rsm.add_component(name, n, entry, exit)?;
    }
    let component = |l: &Line<'_>, i: usize| -> Result<usize> {
        let tok = need(l, i, "component")?;
        rsm.find_component(tok)
            .ok_or_else(|| Error::Structure(format!("line {}: unknown component {tok:?}", l.no)))
    };
    let mut placed = Vec::new();
    for l in &boxes {
        let label = need(l, 1, "box label")?.to_string();
        keyword(l, 2, "in")?;
        let owner = component(l, 3)?;
        keyword(l, 4, "calls")?;
        let callee = component(l, 5)?;
        let at = if l.toks.len() > 6 {
            keyword(l, 6, "at")?;
            Some((number(l, 7, "call id")?, number(l, 8, "return id")?))
        } else {
            None
        };
        placed.push((label, owner, callee, at));
    }
    // Boxes with explicit nodes first, so appended nodes do not shift them.
    for (label, owner, callee, at) in &placed {
        if let Some((call, ret)) = at {
            rsm.add_box_labeled(*owner, *callee, *call, *ret, Some(label.clone()))?;
        }
    }
    for (label, owner, callee, at) in &placed {
        if at.is_none() {
            let n = rsm.component(*owner).n();
            rsm.add_box_labeled_fresh(*owner, *callee, n, Some(label.clone()))?;
        }
    }

    let mut node_names: Vec<Option<Vec<String>>> = vec![None; rsm.num_components()];
    for l in &names {
        let c = rsm
            .find_component(need(l, 1, "component")?)
            .ok_or_else(|| Error::Structure(format!("line {}: unknown component", l.no)))?;
        let id = number(l, 2, "node id")?;
        let name = need(l, 3, "node name")?;
        let n = rsm.component(c).n();
        if id >= n {
            return Err(Error::IndexOutOfRange { index: id, limit: n });
        }
        node_names[c].get_or_insert_with(|| (0..n).map(|i| i.to_string()).collect())[id] = name.to_string();
    }
    for (c, names) in node_names.into_iter().enumerate() {
        if let Some(names) = names {
            rsm.set_node_names(c, names)?;
        }
    }

    for l in &edges {
        let c = rsm
            .find_component(need(l, 1, "component")?)
            .ok_or_else(|| Error::Structure(format!("line {}: unknown component", l.no)))?;
        let node = |i: usize| -> Result<usize> {
            let tok = need(l, i, "node")?;
            rsm.resolve_node(c, tok)
                .ok_or_else(|| Error::Structure(format!("line {}: unknown node {tok:?}", l.no)))
        };
        let (u, v) = (node(2)?, node(3)?);
        if l.toks.len() < 5 {
            return Err(Error::parse(l.no, 1, "missing weight"));
        }
        let w = sr.parse_value(&l.toks[4..].join(" ")).map_err(|e| at_line(l.no, e))?;
        rsm.add_edge(c, u, v, w)?;
    }

    let mut td_paths = vec![None; rsm.num_components()];
    for l in &tds {
        let c = rsm
            .find_component(need(l, 1, "component")?)
            .ok_or_else(|| Error::Structure(format!("line {}: unknown component", l.no)))?;
        td_paths[c] = Some(need(l, 2, "decomposition path")?.to_string());
    }
    Ok(RsmSource { rsm, td_paths })
}

/// Reads an RSM file and the decompositions it names, resolved against the
/// file's directory.
pub fn load_rsm_file<S: Semiring>(path: &Path, sr: &S) -> Result<(Rsm<S::Value>, Vec<Option<TreeDecomposition>>)> {
    let text = std::fs::read_to_string(path)?;
    let src = parse_rsm(&text, sr)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tds = Vec::with_capacity(src.td_paths.len());
    for (c, p) in src.td_paths.iter().enumerate() {
        tds.push(match p {
            None => None,
            Some(p) => {
                let raw = parse_td(&std::fs::read_to_string(dir.join(p))?)?;
                let n = src.rsm.component(c).n();
                if raw.n_nodes != n {
                    return Err(Error::InvalidDecomposition(format!(
                        "{p} covers {} nodes, component has {n}",
                        raw.n_nodes
                    )));
                }
                Some(raw.into_td()?)
            }
        });
    }
    Ok((src.rsm, tds))
}

/// Renders an RSM in the format accepted by [`parse_rsm`], with every box
/// placed explicitly.
pub fn write_rsm<S: Semiring>(rsm: &Rsm<S::Value>, sr: &S) -> String {
    let mut out = String::new();
    for c in rsm.components() {
        out.push_str(&format!(
            "csm {} {} entry {} exit {}\n",
            c.name(),
            c.n(),
            c.entry(),
            c.exit()
        ));
    }
    for (b, site) in rsm.boxes().iter().enumerate() {
        out.push_str(&format!(
            "box {} in {} calls {} at {} {}\n",
            rsm.box_label(b),
            rsm.component(site.owner).name(),
            rsm.component(site.callee).name(),
            site.call,
            site.ret
        ));
    }
    for c in rsm.components() {
        if let Some(names) = c.names() {
            for (i, name) in names.iter().enumerate() {
                out.push_str(&format!("name {} {i} {name}\n", c.name()));
            }
        }
        for (u, v, w) in c.edges() {
            out.push_str(&format!(
                "edge {} {} {} {}\n",
                c.name(),
                c.label(*u),
                c.label(*v),
                sr.format_value(w)
            ));
        }
    }
    out
}
