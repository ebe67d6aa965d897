//! Command-line front end: argument parsing, batch execution and output
//! formatting for the `khcover` binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use khcover::dinv::d_table;
use khcover::goeritz::{black_graph, build_lattice, det_matrix_tree, goeritz_determinant, GoeritzError};
use khcover::homalg::{flatten_cube, spectral_pages, PageTable};
use khcover::khovanov::{assemble_with_budget, budget_from_env, homology, KhTableJson};
use khcover::quasialt::{qa_certify, QaBudget, QaOutcome};
use khcover::{parse_pd, BigInt, DTable, KhovanovError, Lattice, LinkDiagram, CONVENTIONS_VERSION};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_NOT_ALTERNATING: i32 = 4;

#[derive(Parser, Debug, Clone)]
#[command(name = "khcover", version, about = "Khovanov homology, determinants, d-invariants and quasi-alternating certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Khovanov homology table and graded Euler characteristic.
    Kh,
    /// d-invariant table of the branched double cover (alternating input).
    Dinv,
    /// det <= rank of reduced Khovanov homology, with collapse flag.
    Bounds,
    /// Quasi-alternating certificate search.
    Qa,
    /// Pages of the cube-filtration spectral sequence.
    Ss,
    /// Link determinant.
    Det,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// PD files or directories of `.pd` files.
    #[arg(global = true)]
    pub inputs: Vec<PathBuf>,
    /// Reduced homology (marked arc from --mark, default arc 1).
    #[arg(long, global = true, conflicts_with = "unreduced")]
    pub reduced: bool,
    /// Unreduced homology (default for `kh`; `ss` defaults to reduced).
    #[arg(long, global = true)]
    pub unreduced: bool,
    /// Use the mirror diagram.
    #[arg(long, global = true)]
    pub mirror: bool,
    /// Marked arc for reduced homology.
    #[arg(long, global = true)]
    pub mark: Option<u32>,
    /// Reverse the orientation of a component (repeatable).
    #[arg(long, global = true)]
    pub reverse: Vec<usize>,
    /// Memory budget in MiB for `kh`/`bounds`/`ss`; node count or duration (`10s`, `500ms`) for `qa`.
    #[arg(long, global = true, value_parser = parse_budget)]
    pub budget: Option<Budget>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Spanning-tree seed for the lattice in `dinv`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Count(u64),
    Time(Duration),
}

pub fn parse_budget(s: &str) -> Result<Budget, String> {
    let s = s.trim();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad budget '{s}': {e}"));
    if let Some(t) = s.strip_suffix("ms") {
        Ok(Budget::Time(Duration::from_secs_f64(num(t)? / 1000.0)))
    } else if let Some(t) = s.strip_suffix('s') {
        Ok(Budget::Time(Duration::from_secs_f64(num(t)?)))
    } else if let Some(t) = s.strip_suffix('m') {
        Ok(Budget::Time(Duration::from_secs_f64(num(t)? * 60.0)))
    } else {
        s.parse::<u64>().map(Budget::Count).map_err(|e| format!("bad budget '{s}': {e}"))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    NotAlternating(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::NotAlternating(_) => EXIT_NOT_ALTERNATING,
        }
    }
}

impl From<KhovanovError> for CliError {
    fn from(e: KhovanovError) -> Self {
        match e {
            KhovanovError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Result of one input: a JSON record plus CSV rows and text.
#[derive(Debug, Clone)]
struct Record {
    json: Value,
    csv_rows: Vec<Vec<String>>,
    text: String,
}

/// Everything a run prints, and its exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Expands directories into their `.pd` files, sorted by name.
pub fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "pd"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn load(path: &Path, o: &Options) -> Result<LinkDiagram, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(e.to_string()))?;
    let mut d = parse_pd(&text).map_err(|e| CliError::Input(e.to_string()))?;
    if !o.reverse.is_empty() {
        d = d.reversed(&o.reverse).map_err(|e| CliError::Input(e.to_string()))?;
    }
    if o.mirror {
        d = d.mirror();
    }
    Ok(d)
}

fn marked(d: &LinkDiagram, mark: Option<u32>) -> Result<LinkDiagram, CliError> {
    let m = mark.or(d.mark()).unwrap_or(1);
    d.clone().with_mark(Some(m)).map_err(|e| CliError::Input(e.to_string()))
}

fn memory_budget(o: &Options) -> u64 {
    match o.budget {
        Some(Budget::Count(mb)) => mb,
        _ => budget_from_env(),
    }
}

fn determinant(d: &LinkDiagram) -> i64 {
    match goeritz_determinant::<i64>(d) {
        Ok(v) => v,
        Err(_) => 0,
    }
}

fn reduced_rank(d: &LinkDiagram, o: &Options) -> Result<usize, CliError> {
    if d.arc_count() == 0 {
        return Ok(1);
    }
    let c = assemble_with_budget(&marked(d, o.mark)?, true, memory_budget(o))?;
    Ok(homology(&c).total_rank())
}

fn kh_text(t: &KhTableJson) -> String {
    let mut s = format!("total rank {}\nEuler characteristic {}\n", t.total_rank, t.euler_poly);
    if t.gradings.is_empty() {
        return s;
    }
    let ms: Vec<i64> = t.gradings.iter().map(|g| g[0]).collect();
    let ns: Vec<i64> = t.gradings.iter().map(|g| g[1]).collect();
    let (m0, m1) = (*ms.iter().min().unwrap(), *ms.iter().max().unwrap());
    let (n0, n1) = (*ns.iter().min().unwrap(), *ns.iter().max().unwrap());
    let _ = write!(s, "{:>5} |", "n\\m");
    for m in m0..=m1 {
        let _ = write!(s, "{m:>4}");
    }
    s.push('\n');
    for n in (n0..=n1).rev() {
        if !t.gradings.iter().any(|g| g[1] == n) {
            continue;
        }
        let _ = write!(s, "{n:>5} |");
        for m in m0..=m1 {
            let r = t.gradings.iter().find(|g| g[0] == m && g[1] == n).map_or(0, |g| g[2]);
            if r == 0 {
                let _ = write!(s, "{:>4}", ".");
            } else {
                let _ = write!(s, "{r:>4}");
            }
        }
        s.push('\n');
    }
    s
}

fn cmd_kh(d: &LinkDiagram, o: &Options) -> Result<Record, CliError> {
    let reduced = o.reduced || (o.mark.is_some() && !o.unreduced);
    let d = if reduced { marked(d, o.mark)? } else { d.clone() };
    let c = assemble_with_budget(&d, reduced, memory_budget(o))?;
    let t = homology(&c).to_json();
    let csv_rows = t.gradings.iter().map(|g| vec![g[0].to_string(), g[1].to_string(), g[2].to_string()]).collect();
    Ok(Record { json: serde_json::to_value(&t).expect("serializable"), csv_rows, text: kh_text(&t) })
}

fn lattice(d: &LinkDiagram, seed: u64) -> Result<Lattice, CliError> {
    let g = black_graph(d).map_err(|e| match e {
        GoeritzError::NotAlternating | GoeritzError::Disconnected => CliError::NotAlternating(e.to_string()),
        other => CliError::Input(other.to_string()),
    })?;
    build_lattice(&g, seed).map_err(|e| CliError::Input(e.to_string()))
}

fn dinv_text(t: &DTable) -> String {
    let mut s = format!(
        "det {} invariant factors ({})\n",
        t.det,
        t.invariant_factors.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    );
    if t.invariant_factors.len() == 2 {
        // Rows indexed by the first factor, columns by the second.
        let cols = t.invariant_factors[1].to_string().parse::<usize>().unwrap_or(0);
        for row in t.classes.chunks(cols.max(1)) {
            s.push_str(&row.iter().map(|c| format!("{:>7}", c.d.to_string())).collect::<Vec<_>>().join(" "));
            s.push('\n');
        }
    } else {
        for c in &t.classes {
            let label = c.label.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
            let _ = writeln!(s, "({label}) {}", c.d);
        }
    }
    s
}

fn cmd_dinv(d: &LinkDiagram, o: &Options) -> Result<Record, CliError> {
    let l = lattice(d, o.seed)?;
    let t: DTable = d_table(&l.q).map_err(|e| CliError::Input(e.to_string()))?;
    let mut json = serde_json::to_value(t.to_json()).expect("serializable");
    json["lattice"] = serde_json::to_value(l.to_json()).expect("serializable");
    let csv_rows = t
        .classes
        .iter()
        .map(|c| c.label.iter().map(ToString::to_string).chain([c.d.to_string()]).collect())
        .collect();
    Ok(Record { json, csv_rows, text: dinv_text(&t) })
}

#[derive(Serialize)]
struct BoundsReport {
    det: i64,
    kh_rank: usize,
    collapsed: bool,
    certified: Vec<&'static str>,
}

fn cmd_bounds(d: &LinkDiagram, o: &Options) -> Result<Record, CliError> {
    let det = determinant(d);
    let kh_rank = reduced_rank(d, o)?;
    let collapsed = det == kh_rank as i64;
    let mut certified = vec!["det <= rank HF(branched double cover)", "rank HF(branched double cover) <= kh_rank"];
    if collapsed {
        certified.push("equality throughout: the double cover is an L-space");
    }
    let r = BoundsReport { det, kh_rank, collapsed, certified };
    let text = format!(
        "det {det} <= rank HF <= kh_rank {kh_rank}{}\n",
        if collapsed { " (collapsed)" } else { " (gap)" }
    );
    Ok(Record {
        json: serde_json::to_value(&r).expect("serializable"),
        csv_rows: vec![vec![det.to_string(), kh_rank.to_string(), collapsed.to_string()]],
        text,
    })
}

fn qa_budget(d: &LinkDiagram, o: &Options) -> QaBudget {
    match o.budget {
        Some(Budget::Count(n)) => QaBudget::nodes(n as usize),
        Some(Budget::Time(t)) => QaBudget::time(t),
        None => QaBudget::for_diagram(d),
    }
}

fn cmd_qa(d: &LinkDiagram, o: &Options) -> Result<Record, CliError> {
    let out = qa_certify(d, qa_budget(d, o));
    let (csv_rows, text) = match &out {
        QaOutcome::Certified { certificate, .. } => {
            let (x, d0, d1) = certificate.split_dets().map_or((String::new(), 0, 0), |(x, a, b)| (x.to_string(), a, b));
            (
                vec![vec!["certified".into(), certificate.det.to_string(), x, d0.to_string(), d1.to_string()]],
                format!("quasi-alternating certificate\n{}", certificate.render()),
            )
        }
        QaOutcome::Unknown { diagnostics } => (
            vec![vec!["unknown".into(), diagnostics.root_det.to_string(), String::new(), String::new(), String::new()]],
            format!(
                "unknown (inconclusive): det {}, {} nodes visited{}\n",
                diagnostics.root_det,
                diagnostics.nodes_visited,
                if diagnostics.budget_exhausted { ", budget exhausted" } else { "" }
            ),
        ),
    };
    Ok(Record { json: serde_json::to_value(&out).expect("serializable"), csv_rows, text })
}

fn cmd_ss(d: &LinkDiagram, o: &Options) -> Result<Record, CliError> {
    let reduced = !o.unreduced;
    let d = if reduced { marked(d, o.mark)? } else { d.clone() };
    if d.arc_count() == 0 {
        return Err(CliError::Input("crossingless diagram has no cube to filter".into()));
    }
    let cube = assemble_with_budget(&d, reduced, memory_budget(o))?;
    let f = flatten_cube(&cube).map_err(|e| CliError::Input(e.to_string()))?;
    let pages: PageTable = spectral_pages(&f, 2);
    let csv_rows = pages
        .pages
        .iter()
        .flat_map(|p| p.ranks_by_level.iter().enumerate().map(move |(k, r)| vec![p.r.to_string(), k.to_string(), r.to_string()]))
        .collect();
    let mut text = String::new();
    for p in &pages.pages {
        let _ = writeln!(text, "E^{}: {:?}", p.r, p.ranks_by_level);
    }
    let _ = writeln!(text, "stable from E^{}, total rank {}", pages.stable_page, pages.total_homology_rank);
    Ok(Record { json: serde_json::to_value(&pages).expect("serializable"), csv_rows, text })
}

fn cmd_det(d: &LinkDiagram, _o: &Options) -> Result<Record, CliError> {
    let det = determinant(d);
    let alternating = d.is_connected() && d.is_alternating();
    let trees: Option<BigInt> = alternating.then(|| det_matrix_tree(&black_graph(d).expect("alternating")));
    let json = json!({ "det": det, "alternating": alternating, "spanning_trees": trees.as_ref().map(ToString::to_string) });
    Ok(Record {
        json,
        csv_rows: vec![vec![det.to_string(), alternating.to_string()]],
        text: format!("det {det}{}\n", if alternating { " (alternating)" } else { "" }),
    })
}

fn csv_header(cmd: Command, width: usize) -> Vec<String> {
    let cols: Vec<String> = match cmd {
        Command::Kh => vec!["m".into(), "n".into(), "rank".into()],
        Command::Dinv => (1..=width.saturating_sub(1)).map(|i| format!("label_{i}")).chain(["d".into()]).collect(),
        Command::Bounds => vec!["det".into(), "kh_rank".into(), "collapsed".into()],
        Command::Qa => vec!["result".into(), "det".into(), "crossing".into(), "det0".into(), "det1".into()],
        Command::Ss => vec!["page".into(), "level".into(), "rank".into()],
        Command::Det => vec!["det".into(), "alternating".into()],
    };
    std::iter::once("file".to_string()).chain(cols).collect()
}

fn run_one(cmd: Command, path: &Path, o: &Options) -> Result<Record, CliError> {
    let d = load(path, o)?;
    match cmd {
        Command::Kh => cmd_kh(&d, o),
        Command::Dinv => cmd_dinv(&d, o),
        Command::Bounds => cmd_bounds(&d, o),
        Command::Qa => cmd_qa(&d, o),
        Command::Ss => cmd_ss(&d, o),
        Command::Det => cmd_det(&d, o),
    }
}

/// Runs a parsed command line and renders its output.
pub fn run(cli: &Cli) -> RunOutput {
    let o = &cli.opts;
    let inputs = match expand_inputs(&o.inputs) {
        Ok(v) if !v.is_empty() => v,
        Ok(_) => return RunOutput { stdout: String::new(), stderr: "no input files\n".into(), code: EXIT_INPUT },
        Err(e) => return RunOutput { stdout: String::new(), stderr: format!("{e}\n"), code: e.exit_code() },
    };
    let work = || inputs.par_iter().map(|p| run_one(cli.command, p, o)).collect::<Vec<_>>();
    let results = match o.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(work),
            Err(e) => return RunOutput { stdout: String::new(), stderr: format!("{e}\n"), code: EXIT_INPUT },
        },
        None => work(),
    };

    let mut stderr = String::new();
    let mut code = EXIT_OK;
    for (p, r) in inputs.iter().zip(&results) {
        if let Err(e) = r {
            let _ = writeln!(stderr, "{}: {e}", p.display());
            if code == EXIT_OK {
                code = e.exit_code();
            }
        }
    }
    let name = |p: &PathBuf| p.display().to_string();
    let stdout = match o.format {
        Format::Json => {
            let records: Vec<Value> = inputs
                .iter()
                .zip(&results)
                .map(|(p, r)| match r {
                    Ok(rec) => {
                        let mut v = json!({ "file": name(p), "conventions_version": CONVENTIONS_VERSION });
                        v["result"] = rec.json.clone();
                        v
                    }
                    Err(e) => json!({ "file": name(p), "conventions_version": CONVENTIONS_VERSION,
                                      "error": e.to_string(), "exit_code": e.exit_code() }),
                })
                .collect();
            let out = if records.len() == 1 { records[0].clone() } else { Value::Array(records) };
            serde_json::to_string_pretty(&out).expect("serializable") + "\n"
        }
        Format::Csv => {
            let width = results.iter().flatten().flat_map(|r| r.csv_rows.iter().map(Vec::len)).max().unwrap_or(0);
            let mut s = format!("# conventions_version={CONVENTIONS_VERSION}\n");
            s.push_str(&csv_header(cli.command, width).join(","));
            s.push('\n');
            for (p, r) in inputs.iter().zip(&results) {
                if let Ok(rec) = r {
                    for row in &rec.csv_rows {
                        let mut cells = vec![name(p)];
                        cells.extend(row.iter().cloned());
                        s.push_str(&cells.join(","));
                        s.push('\n');
                    }
                }
            }
            s
        }
        Format::Text => {
            let mut s = format!("conventions: {CONVENTIONS_VERSION}\n");
            for (p, r) in inputs.iter().zip(&results) {
                if let Ok(rec) = r {
                    let _ = write!(s, "== {}\n{}", name(p), rec.text);
                }
            }
            s
        }
    };
    RunOutput { stdout, stderr, code }
}
