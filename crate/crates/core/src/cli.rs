//! The `treepath` command line.
//!
//! Exit codes: 0 on success, 1 on parse, I/O or query failures, 2 on an
//! invalid tree decomposition.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use crate::bench::{constants, run_sweep, to_csv, BenchSemiring, SweepConfig};
use crate::dynamic::TdIndex;
use crate::error::{Error, Result};
use crate::graph::{generate_tw_bounded, load_graph, parse_graph_file, save_graph};
use crate::par::Exec;
use crate::rsm::{
    generate_rsm, load_rsm_file, write_rsm, Bound, Loc, NestedPath, PairIndex, Prep, Rsm, RsmEngine, RsmGenOptions,
    RsmOptions,
};
use crate::semiring::{Boolean, FlowSemiring, MeetMode, Semiring, Tropical, Viterbi};
use crate::treedec::{
    balance_raw, balance_td, build_td, make_semi_nice, parse_td, rank_bags, rank_bound, validate_td, write_td,
    Heuristic, TreeDecomposition,
};

#[derive(Parser, Debug)]
#[command(name = "treepath", version, about = "Algebraic path queries via tree decompositions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build, validate or balance a tree decomposition of a graph.
    Td(TdArgs),
    /// Answer path queries on a graph or an RSM.
    Query(QueryArgs),
    /// Compare the engine with the all-pairs and per-query baselines.
    Bench(BenchArgs),
    /// Write a random graph or RSM.
    Gen(GenArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TdAction {
    Build,
    Validate,
    Balance,
}

#[derive(Args, Debug)]
struct TdArgs {
    action: TdAction,
    graph: PathBuf,
    /// Start from this decomposition instead of computing one.
    #[arg(long)]
    td: Option<PathBuf>,
    /// Where to write the resulting decomposition.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SemiringArg {
    Bool,
    Trop,
    Viterbi,
    Ifds,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Pair,
    Source,
    Witness,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum IndexKind {
    /// Logarithmic-time queries on the dynamic index.
    Log,
    /// Constant-time pair queries on a static index.
    Const,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PrepArg {
    Balanced,
    AsGiven,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MeetArg {
    Union,
    Intersection,
}

#[derive(Args, Debug)]
struct QueryArgs {
    /// A graph file (`p graph ...`) or an RSM file (`csm ...`).
    input: PathBuf,
    #[arg(long, value_enum, default_value = "bool")]
    semiring: SemiringArg,
    #[arg(long, value_enum, default_value = "pair")]
    mode: Mode,
    /// Bound on the stack height for RSM queries.
    #[arg(long, conflicts_with = "fixpoint")]
    h: Option<usize>,
    /// Iterate RSM summaries until nothing changes.
    #[arg(long)]
    fixpoint: bool,
    /// Query file, one `u v` or `u` per line; `-` or absent reads stdin.
    #[arg(long)]
    queries: Option<String>,
    #[arg(long, value_enum, default_value = "log")]
    index: IndexKind,
    /// Component used for node tokens without a `csm@` prefix.
    #[arg(long)]
    csm: Option<String>,
    /// Fact domain size for `ifds`; read from the first weight otherwise.
    #[arg(long)]
    domain: Option<usize>,
    #[arg(long, value_enum, default_value = "union")]
    meet: MeetArg,
    /// Decomposition of a graph input.
    #[arg(long)]
    td: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "balanced")]
    prep: PrepArg,
    /// Disable data-parallel preprocessing.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated sizes; `2^k` is accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, default_value = "2^6,2^8,2^10")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, value_enum, default_value = "trop")]
    semiring: BenchArg,
    #[arg(long, default_value_t = 200)]
    queries: usize,
    #[arg(long, default_value_t = 50)]
    updates: usize,
    /// Largest size for the cubic all-pairs baseline.
    #[arg(long, default_value_t = 1024)]
    complete_limit: usize,
    /// Instances drawn per size.
    #[arg(long, default_value_t = 1)]
    instances: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BenchArg {
    Bool,
    Trop,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum GenKind {
    Graph,
    Rsm,
}

#[derive(Args, Debug)]
struct GenArgs {
    kind: GenKind,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Nodes of a graph, or the node cap per component of an RSM.
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    /// Components of an RSM.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, value_enum, default_value = "trop")]
    semiring: BenchArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the generator's decomposition of a graph.
    #[arg(long)]
    td_out: Option<PathBuf>,
}

fn parse_size(s: &str) -> std::result::Result<usize, String> {
    let s = s.trim();
    let parsed = match s.split_once('^') {
        Some((b, e)) => b
            .parse::<usize>()
            .ok()
            .zip(e.parse::<u32>().ok())
            .and_then(|(b, e)| b.checked_pow(e)),
        None => s.parse().ok(),
    };
    parsed.ok_or_else(|| format!("invalid size {s:?}"))
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let res = match cli.cmd {
        Cmd::Td(a) => cmd_td(&a, &mut out),
        Cmd::Query(a) => cmd_query(&a, &mut out),
        Cmd::Bench(a) => cmd_bench(&a, &mut out),
        Cmd::Gen(a) => cmd_gen(&a, &mut out),
    };
    let _ = out.flush();
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidDecomposition(_) => 2,
                _ => 1,
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn load_td(path: &Path, n: usize) -> Result<TreeDecomposition> {
    let raw = parse_td(&read(path)?)?;
    if raw.n_nodes != n {
        return Err(Error::InvalidDecomposition(format!(
            "decomposition covers {} nodes, graph has {n}",
            raw.n_nodes
        )));
    }
    raw.into_td()
}

fn cmd_td(a: &TdArgs, out: &mut impl Write) -> Result<i32> {
    let file = parse_graph_file(&read(&a.graph)?)?;
    let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e.0, e.1)).collect();
    let mut balanced = None;
    let given = a.td.as_deref().map(|p| load_td(p, file.n)).transpose()?;
    let td = match (a.action, given) {
        (TdAction::Validate, None) => {
            return Err(Error::Unsupported("validate needs --td".into()));
        }
        (TdAction::Validate, Some(td)) | (TdAction::Build, Some(td)) => td,
        (TdAction::Build, None) => build_td(file.n, &edges, None, Heuristic::Auto)?,
        (TdAction::Balance, td) => {
            let td = match td {
                Some(td) => td,
                None => build_td(file.n, &edges, None, Heuristic::Auto)?,
            };
            let raw = balance_raw(&td, &rank_bags(&td)?)?;
            balanced = Some((raw.height(), rank_bound(td.num_bags())));
            make_semi_nice(&raw)?
        }
    };
    let report = validate_td(file.n, &edges, &td);
    if !report.is_valid() {
        writeln!(out, "width={} invalid", report.width).map_err(io)?;
        for v in &report.violations {
            writeln!(out, "violation: {v}").map_err(io)?;
        }
        return Ok(2);
    }
    writeln!(out, "width={} ok", report.width).map_err(io)?;
    writeln!(out, "height={}", td.height()).map_err(io)?;
    writeln!(out, "bags={}", td.num_bags()).map_err(io)?;
    if let Some((h, bound)) = balanced {
        writeln!(out, "balanced_height={h} bound={bound}").map_err(io)?;
    }
    if let Some(p) = &a.out {
        write_file(p, &write_td(&td))?;
    }
    Ok(0)
}

enum Input {
    Graph,
    Rsm,
}

fn detect(text: &str) -> Result<Input> {
    for line in text.lines() {
        match line.split_whitespace().next() {
            None | Some("#") => continue,
            Some(t) if t.starts_with('#') => continue,
            Some("p") => return Ok(Input::Graph),
            Some("csm") => return Ok(Input::Rsm),
            Some(_) => break,
        }
    }
    Err(Error::parse(1, 1, "expected a `p graph` header or a `csm` line"))
}

fn query_lines(spec: Option<&str>) -> Result<Vec<(usize, String)>> {
    let text = match spec {
        None | Some("-") => {
            let mut s = String::new();
            for line in std::io::stdin().lock().lines() {
                s.push_str(&line.map_err(io)?);
                s.push('\n');
            }
            s
        }
        Some(p) => read(Path::new(p))?,
    };
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect())
}

fn flow_domain(text: &str) -> Result<usize> {
    text.find("|D|=")
        .map(|i| FlowSemiring::domain_of(&text[i..]))
        .unwrap_or_else(|| Err(Error::Unsupported("ifds needs --domain or a flow-valued weight".into())))
}

fn cmd_query(a: &QueryArgs, out: &mut impl Write) -> Result<i32> {
    let text = read(&a.input)?;
    match a.semiring {
        SemiringArg::Bool => query_with(Boolean, a, &text, out),
        SemiringArg::Trop => query_with(Tropical, a, &text, out),
        SemiringArg::Viterbi => query_with(Viterbi, a, &text, out),
        SemiringArg::Ifds => {
            let domain = match a.domain {
                Some(d) => d,
                None => flow_domain(&text)?,
            };
            let mode = match a.meet {
                MeetArg::Union => MeetMode::Union,
                MeetArg::Intersection => MeetMode::Intersection,
            };
            query_with(FlowSemiring::new(domain, mode)?, a, &text, out)
        }
    }
}

fn exec_of(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::Auto
    }
}

fn query_with<S>(sr: S, a: &QueryArgs, text: &str, out: &mut impl Write) -> Result<i32>
where
    S: Semiring + Clone,
{
    match detect(text)? {
        Input::Graph => graph_queries(sr, a, text, out),
        Input::Rsm => rsm_queries(sr, a, out),
    }
}

/// Splits a query line into one or two tokens as the mode requires.
fn tokens(line: &str, mode: Mode) -> Result<(String, Option<String>)> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    match (mode, toks.as_slice()) {
        (Mode::Source, [u]) => Ok((u.to_string(), None)),
        (Mode::Pair | Mode::Witness, [u, v]) => Ok((u.to_string(), Some(v.to_string()))),
        _ => Err(Error::parse(
            1,
            1,
            if mode == Mode::Source {
                "expected `u`"
            } else {
                "expected `u v`"
            },
        )),
    }
}

fn unknown(token: &str) -> Error {
    Error::Structure(format!("unknown node {token:?}"))
}

fn emit(out: &mut impl Write, line_no: usize, res: Result<String>, failed: &mut bool) -> Result<()> {
    match res {
        Ok(s) => writeln!(out, "{s}").map_err(io),
        Err(e) => {
            *failed = true;
            writeln!(out, "error line {line_no}: {e}").map_err(io)
        }
    }
}

fn graph_queries<S>(sr: S, a: &QueryArgs, text: &str, out: &mut impl Write) -> Result<i32>
where
    S: Semiring + Clone,
{
    let g = load_graph(text, &sr)?;
    let td = match &a.td {
        Some(p) => load_td(p, g.n())?,
        None => build_td(g.n(), g.edges(), None, Heuristic::Auto)?,
    };
    let td = match a.prep {
        PrepArg::Balanced => balance_td(&td)?,
        PrepArg::AsGiven => make_semi_nice(&td)?,
    };
    let idx = TdIndex::preprocess_with(sr.clone(), g, td, exec_of(a.sequential))?;
    let g = idx.graph();
    let pidx = (a.index == IndexKind::Const || a.mode == Mode::Source).then(|| PairIndex::build(&idx));
    let mut failed = false;
    for (no, line) in query_lines(a.queries.as_deref())? {
        let res = (|| -> Result<String> {
            let (u, v) = tokens(&line, a.mode)?;
            let u = g.resolve(&u).ok_or_else(|| unknown(&u))?;
            let v = v.map(|v| g.resolve(&v).ok_or_else(|| unknown(&v))).transpose()?;
            match (a.mode, v) {
                (Mode::Pair, Some(v)) => {
                    let d = match &pidx {
                        Some(p) => p.query(u, v)?,
                        None => idx.query_pair(u, v)?,
                    };
                    Ok(sr.display_value(&d))
                }
                (Mode::Witness, Some(v)) => match idx.query_witness(u, v) {
                    Ok((d, path)) => {
                        let nodes: Vec<String> = path.nodes.iter().map(|&x| g.label(x)).collect();
                        Ok(format!("{}: {}", sr.display_value(&d), nodes.join(" -> ")))
                    }
                    Err(Error::NoPath(..)) => Ok(format!("{}: no path", sr.display_value(&sr.zero()))),
                    Err(e) => Err(e),
                },
                _ => {
                    let row = pidx.as_ref().expect("built for source mode").single_source(u)?;
                    Ok(render_row(&sr, &row, |x| g.label(x)))
                }
            }
        })();
        emit(out, no, res, &mut failed)?;
    }
    Ok(i32::from(failed))
}

fn render_row<S: Semiring>(sr: &S, row: &[S::Value], label: impl Fn(usize) -> String) -> String {
    row.iter()
        .enumerate()
        .filter(|(_, d)| !sr.is_zero(d))
        .map(|(x, d)| format!("{}={}", label(x), sr.display_value(d)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// `1 -> 4 [ 1 -> 6 ] -> 5`: a bracketed callee execution follows each
/// call node whose call-to-return step was taken.
pub fn render_nested<W: Clone>(rsm: &Rsm<W>, p: &NestedPath) -> String {
    let comp = rsm.component(p.csm);
    let mut parts = Vec::new();
    let mut calls = p.calls.iter().peekable();
    for (i, &x) in p.nodes.iter().enumerate() {
        let mut s = comp.label(x);
        if let Some(c) = calls.next_if(|c| c.at == i) {
            s.push_str(&format!(
                " [ {}@{} ]",
                rsm.component(c.body.csm).name(),
                render_nested(rsm, &c.body)
            ));
        }
        parts.push(s);
    }
    parts.join(" -> ")
}

fn rsm_queries<S>(sr: S, a: &QueryArgs, out: &mut impl Write) -> Result<i32>
where
    S: Semiring + Clone,
{
    let (rsm, tds) = load_rsm_file(&a.input, &sr)?;
    let default = match &a.csm {
        Some(t) => Some(
            rsm.find_component(t)
                .ok_or_else(|| Error::Structure(format!("unknown component {t:?}")))?,
        ),
        None => (rsm.num_components() > 0).then_some(0),
    };
    let bound = match (a.h, a.fixpoint, a.semiring) {
        (Some(h), _, _) => Bound::Height(h),
        (None, true, _) | (None, false, SemiringArg::Bool | SemiringArg::Ifds) => Bound::Fixpoint,
        (None, false, _) => Bound::Height(rsm.num_components()),
    };
    let opts = RsmOptions {
        prep: match a.prep {
            PrepArg::Balanced => Prep::Balanced,
            PrepArg::AsGiven => Prep::AsGiven,
        },
        exec: exec_of(a.sequential),
        tds,
    };
    let mut engine = RsmEngine::build(sr.clone(), rsm, &opts)?;
    engine.rsm_distance(bound)?;
    let rsm = engine.rsm();
    let pidx = (a.index == IndexKind::Const || a.mode == Mode::Source).then(|| engine.pair_index());
    let resolve = |t: &str| rsm.resolve(default, t).ok_or_else(|| unknown(t));
    let mut failed = false;
    for (no, line) in query_lines(a.queries.as_deref())? {
        let res = (|| -> Result<String> {
            let (u, v) = tokens(&line, a.mode)?;
            let u: Loc = resolve(&u)?;
            let v = v.map(|v| resolve(&v)).transpose()?;
            match (a.mode, v) {
                (Mode::Pair, Some(v)) => {
                    let d = match &pidx {
                        Some(p) => p.pair_query_const(u, v)?,
                        None => engine.same_context_pair(u, v)?,
                    };
                    Ok(sr.display_value(&d))
                }
                (Mode::Witness, Some(v)) => match engine.interproc_witness(u, v) {
                    Ok((d, path)) => Ok(format!("{}: {}", sr.display_value(&d), render_nested(rsm, &path))),
                    Err(Error::NoPath(..)) => Ok(format!("{}: no path", sr.display_value(&sr.zero()))),
                    Err(e) => Err(e),
                },
                _ => {
                    let row = pidx.as_ref().expect("built for source mode").single_source(u)?;
                    let comp = rsm.component(u.csm);
                    Ok(render_row(&sr, &row, |x| comp.label(x)))
                }
            }
        })();
        emit(out, no, res, &mut failed)?;
    }
    Ok(i32::from(failed))
}

fn cmd_bench(a: &BenchArgs, out: &mut impl Write) -> Result<i32> {
    let cfg = SweepConfig {
        sizes: a.sizes.clone(),
        t: a.t,
        seed: a.seed,
        semiring: match a.semiring {
            BenchArg::Bool => BenchSemiring::Bool,
            BenchArg::Trop => BenchSemiring::Trop,
        },
        queries: a.queries,
        updates: a.updates,
        complete_limit: a.complete_limit,
        exec: exec_of(a.sequential),
        instances: a.instances,
        ..SweepConfig::default()
    };
    let rows = run_sweep(&cfg)?;
    let csv = to_csv(&rows);
    match &a.out {
        Some(p) => write_file(p, &csv)?,
        None => out.write_all(csv.as_bytes()).map_err(io)?,
    }
    eprintln!("{}", constants(&rows));
    Ok(0)
}

fn cmd_gen(a: &GenArgs, out: &mut impl Write) -> Result<i32> {
    let text = match (a.kind, a.semiring) {
        (GenKind::Graph, BenchArg::Bool) => gen_graph(Boolean, a, |_| true)?,
        (GenKind::Graph, BenchArg::Trop) => gen_graph(Tropical, a, |r| r.gen_range(0..=10) as f64)?,
        (GenKind::Rsm, BenchArg::Bool) => gen_rsm(Boolean, a, |_| true)?,
        (GenKind::Rsm, BenchArg::Trop) => gen_rsm(Tropical, a, |r| r.gen_range(0..=10) as f64)?,
    };
    match &a.out {
        Some(p) => write_file(p, &text)?,
        None => out.write_all(text.as_bytes()).map_err(io)?,
    }
    Ok(0)
}

fn gen_graph<S: Semiring>(
    sr: S,
    a: &GenArgs,
    mut sample: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> S::Value,
) -> Result<String> {
    let gen = generate_tw_bounded(&sr, a.n, a.t, a.seed, &mut sample)?;
    if let Some(p) = &a.td_out {
        write_file(p, &write_td(&gen.td))?;
    }
    Ok(save_graph(&gen.graph, &sr))
}

fn gen_rsm<S: Semiring>(
    sr: S,
    a: &GenArgs,
    mut sample: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> S::Value,
) -> Result<String> {
    let opts = RsmGenOptions {
        components: a.k,
        max_nodes: a.n.max(4),
        treewidth: a.t,
        ..RsmGenOptions::default()
    };
    let rsm = generate_rsm(&sr, &opts, a.seed, &mut sample)?;
    Ok(write_rsm(&rsm, &sr))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_accept_powers() {
        assert_eq!(parse_size("2^10"), Ok(1024));
        assert_eq!(parse_size("77"), Ok(77));
        assert!(parse_size("2^x").is_err());
    }

    #[test]
    fn detects_input_kind() {
        assert!(matches!(detect("# c\np graph 1 0\n"), Ok(Input::Graph)));
        assert!(matches!(detect("csm main 3 entry 0 exit 2\n"), Ok(Input::Rsm)));
        assert!(detect("e 0 1 1\n").is_err());
    }

    #[test]
    fn query_tokens_follow_mode() {
        assert!(tokens("1 2", Mode::Pair).is_ok());
        assert!(tokens("1", Mode::Pair).is_err());
        assert!(tokens("1", Mode::Source).is_ok());
        assert!(tokens("1 2 3", Mode::Witness).is_err());
    }
}
