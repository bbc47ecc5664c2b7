//! Command-line front end. Every command produces a [`CommandReport`];
//! `--json` prints it verbatim, otherwise a short text rendering is shown.
//!
//! Exit codes: 0 success, 2 unreadable or malformed input, 3 precondition
//! violated (disconnected graph, genus too small, mismatched cocycle or
//! lengths), 4 internal invariant failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::ceresa::{
    self, classify, compute_w, image_lattice, is_cz_trivial_curve, is_cz_trivial_graph, specialize,
    CeresaCocycle, CeresaError, GraphTestMode, TrivialityVerdict,
};
use crate::extalg::WedgeTriple;
use crate::graph::io::{parse_graph, parse_lengths_csv, GraphFile, GraphFileError};
use crate::graph::{
    build_cycle_context, has_minor, GraphError, MinorPattern, MultiGraph, TropicalCurve,
};
use crate::ids::EdgeId;
use crate::intlin::scalar_to_json;
use crate::fixtures;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "tropical-ceresa", version, about = "Exact Ceresa-Zharkov triviality tests for graphs and tropical curves")]
pub struct Cli {
    /// Print the full report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the polarization matrix Q_G.
    Qmatrix {
        graph: PathBuf,
        /// Spanning tree as comma-separated edge ids.
        #[arg(long)]
        tree: Option<String>,
    },
    /// Decide hyperelliptic type (equivalently Ceresa-Zharkov triviality).
    Classify { graph: PathBuf },
    /// Test a cocycle's class at graph level, or at curve level when lengths are known.
    CzTest {
        graph: PathBuf,
        /// A cocycle JSON file, or builtin:K4 / builtin:L3.
        #[arg(long)]
        cocycle: String,
        /// Edge lengths in file edge order, comma-separated.
        #[arg(long)]
        lengths: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Image2)]
        mode: Mode,
    },
    /// Search for a K4 or L3 minor.
    Minor {
        graph: PathBuf,
        #[arg(long, value_parser = parse_pattern)]
        pattern: MinorPattern,
    },
    /// Hermite basis of the image lattice at the given lengths.
    Lattice {
        graph: PathBuf,
        #[arg(long)]
        lengths: String,
    },
    /// Enumerate stable graphs and check the classifier and fixture identities.
    VerifyTheorem {
        #[arg(long)]
        max_edges: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Image2,
    Psi,
}

fn parse_pattern(s: &str) -> Result<MinorPattern, String> {
    s.parse().map_err(|e: <MinorPattern as std::str::FromStr>::Err| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandReport {
    pub command: String,
    pub inputs: Value,
    pub result: Value,
    pub exact: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<GraphFileError> for CliError {
    fn from(e: GraphFileError) -> Self {
        match e {
            GraphFileError::Graph(g) => g.into(),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<CeresaError> for CliError {
    fn from(e: CeresaError) -> Self {
        match e {
            CeresaError::Invariant(m) => CliError::Internal(m),
            CeresaError::Document(m) => CliError::Parse(m),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

fn read_graph(path: &PathBuf) -> Result<GraphFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| match e {
        GraphFileError::Syntax { .. } | GraphFileError::Json(_) | GraphFileError::PartialLengths => {
            CliError::Parse(format!("{}: {e}", path.display()))
        }
        GraphFileError::Graph(g) => CliError::Precondition(format!("{}: {g}", path.display())),
    })
}

fn parse_edge_list(s: &str) -> Result<Vec<EdgeId>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map(EdgeId)
                .map_err(|_| CliError::Parse(format!("bad edge id {t:?}")))
        })
        .collect()
}

fn curve_from_csv(graph: &MultiGraph, csv: &str) -> Result<TropicalCurve, CliError> {
    let lengths = parse_lengths_csv(csv).map_err(CliError::Parse)?;
    Ok(TropicalCurve::from_positional(graph.clone(), &lengths)?)
}

fn poly_matrix_json(m: &crate::PolyMatrix) -> Value {
    Value::Array(
        m.rows()
            .map(|r| Value::Array(r.iter().map(|p| Value::String(p.to_string())).collect()))
            .collect(),
    )
}

fn f3_json<T: std::fmt::Display>(c: &BTreeMap<(usize, usize, usize), T>) -> Value {
    Value::Object(
        c.iter()
            .map(|(&(r, s, t), v)| (WedgeTriple::betas(r, s, t).to_string(), Value::String(v.to_string())))
            .collect(),
    )
}

fn int_rows_json(rows: &[Vec<BigInt>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(scalar_to_json).collect()))
            .collect(),
    )
}

fn verdict_json(v: &TrivialityVerdict) -> Value {
    serde_json::to_value(v).expect("verdicts serialize")
}

fn load_cocycle(spec: &str, graph: &MultiGraph) -> Result<CeresaCocycle, CliError> {
    let cocycle = match spec {
        "builtin:K4" => ceresa::v_tau_k4(),
        "builtin:L3" => ceresa::v_tau_l3(),
        other if other.starts_with("builtin:") => {
            return Err(CliError::Parse(format!("unknown builtin cocycle {other:?}; expected builtin:K4 or builtin:L3")))
        }
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Parse(format!("cannot read {path}: {e}")))?;
            CeresaCocycle::from_json(&text)?
        }
    };
    if cocycle.context().graph() != graph {
        let what = if spec.starts_with("builtin:") {
            "the built-in cocycle is only valid on its pinned labeling (see `fixtures/`)"
        } else {
            "the cocycle was written for a different graph"
        };
        return Err(CliError::Precondition(format!("graph does not match cocycle: {what}")));
    }
    Ok(cocycle)
}

/// Executes a parsed command line.
pub fn run_command(cli: &Cli) -> Result<CommandReport, CliError> {
    let report = |command: &str, inputs: Value, result: Value| CommandReport {
        command: command.to_string(),
        inputs,
        result,
        exact: true,
    };
    match &cli.command {
        Command::Qmatrix { graph, tree } => {
            let file = read_graph(graph)?;
            let hint = tree.as_deref().map(parse_edge_list).transpose()?;
            let ctx = build_cycle_context(&file.graph, hint.as_deref())?;
            Ok(report(
                "qmatrix",
                json!({"graph": graph, "tree": tree}),
                json!({
                    "genus": ctx.genus(),
                    "basis": ctx.basis_edges(),
                    "tree": ctx.tree_edges(),
                    "q": poly_matrix_json(ctx.q()),
                }),
            ))
        }
        Command::Classify { graph } => {
            let file = read_graph(graph)?;
            let verdict = classify(&file.graph)?;
            Ok(report(
                "classify",
                json!({"graph": graph}),
                json!({
                    "genus": file.graph.genus(),
                    "hyperelliptic_type": verdict.trivial,
                    "verdict": verdict_json(&verdict),
                }),
            ))
        }
        Command::CzTest { graph, cocycle, lengths, mode } => {
            let file = read_graph(graph)?;
            let v = load_cocycle(cocycle, &file.graph)?;
            let w = compute_w(&v);
            let curve = match lengths {
                Some(csv) => Some(curve_from_csv(&file.graph, csv)?),
                None => file.curve(),
            };
            let inputs = json!({"graph": graph, "cocycle": cocycle, "lengths": lengths, "mode": format!("{mode:?}").to_lowercase()});
            let result = match curve {
                Some(curve) => {
                    let verdict = is_cz_trivial_curve(&curve, &v)?;
                    if verdict.trivial && verdict.aab_witness().is_some() && !ceresa::replay_curve_witness(&curve, &v, &verdict) {
                        return Err(CliError::Internal("curve-level witness does not replay".into()));
                    }
                    json!({
                        "level": "curve",
                        "w": f3_json(w.c()),
                        "w_specialized": f3_json(&specialize(&w, &curve)?),
                        "verdict": verdict_json(&verdict),
                    })
                }
                None => {
                    let mode = match mode {
                        Mode::Image2 => GraphTestMode::Image2,
                        Mode::Psi => GraphTestMode::Psi,
                    };
                    let verdict = is_cz_trivial_graph(&file.graph, &v, mode)?;
                    if verdict.trivial && verdict.aab_witness().is_some() && !ceresa::replay_graph_witness(&w, &verdict, mode) {
                        return Err(CliError::Internal("graph-level witness does not replay".into()));
                    }
                    json!({
                        "level": "graph",
                        "w": f3_json(w.c()),
                        "verdict": verdict_json(&verdict),
                    })
                }
            };
            Ok(report("cz-test", inputs, result))
        }
        Command::Minor { graph, pattern } => {
            let file = read_graph(graph)?;
            let search = has_minor(&file.graph, *pattern);
            if let Some(w) = &search.witness {
                if !w.verify(&file.graph) {
                    return Err(CliError::Internal("minor witness does not replay".into()));
                }
            }
            Ok(report(
                "minor",
                json!({"graph": graph, "pattern": pattern}),
                serde_json::to_value(&search).expect("minor searches serialize"),
            ))
        }
        Command::Lattice { graph, lengths } => {
            let file = read_graph(graph)?;
            let curve = curve_from_csv(&file.graph, lengths)?;
            let ctx = build_cycle_context(&file.graph, None)?;
            if ctx.genus() < 3 {
                return Err(CliError::Precondition(format!(
                    "genus {} is below 3, so F3 L is zero",
                    ctx.genus()
                )));
            }
            let lattice = image_lattice(&ctx, &curve)?;
            Ok(report(
                "lattice",
                json!({"graph": graph, "lengths": lengths}),
                json!({
                    "coordinates": lattice.coordinates.iter().map(|&(r, s, t)| WedgeTriple::betas(r, s, t).to_string()).collect::<Vec<_>>(),
                    "hnf": int_rows_json(&lattice.hnf),
                    "rank": lattice.hnf.len(),
                    "index": lattice.index().map(|i| scalar_to_json(&i)),
                }),
            ))
        }
        Command::VerifyTheorem { max_edges } => {
            let theorem = ceresa::verify_theorem(*max_edges);
            let value = serde_json::to_value(&theorem).expect("reports serialize");
            if !theorem.ok() {
                return Err(CliError::Internal(format!(
                    "verification failed: {}",
                    serde_json::to_string(&value).unwrap_or_default()
                )));
            }
            Ok(report("verify-theorem", json!({"max_edges": max_edges}), value))
        }
    }
}

/// Text rendering of a successful report.
pub fn render_text(report: &CommandReport) -> String {
    let r = &report.result;
    let mut out = String::new();
    match report.command.as_str() {
        "qmatrix" => {
            writeln!(out, "genus {}", r["genus"]).unwrap();
            for row in r["q"].as_array().into_iter().flatten() {
                let cells: Vec<&str> = row.as_array().into_iter().flatten().filter_map(Value::as_str).collect();
                writeln!(out, "[{}]", cells.join(", ")).unwrap();
            }
        }
        "classify" => {
            let trivial = r["hyperelliptic_type"].as_bool().unwrap_or(false);
            let cert = &r["verdict"]["certificate"];
            if trivial {
                writeln!(out, "hyperelliptic type: Ceresa-Zharkov trivial").unwrap();
            } else {
                writeln!(out, "not hyperelliptic type: {} minor, not Ceresa-Zharkov trivial", cert["pattern"].as_str().unwrap_or("?")).unwrap();
                writeln!(out, "contract {}", cert["witness"]["contract"]).unwrap();
                writeln!(out, "delete {}", cert["witness"]["delete"]).unwrap();
            }
            writeln!(out, "replay hash {}", r["verdict"]["replay_hash"].as_str().unwrap_or("")).unwrap();
        }
        "cz-test" => {
            writeln!(out, "{}-level test", r["level"].as_str().unwrap_or("?")).unwrap();
            writeln!(out, "w = {}", r["w"]).unwrap();
            if let Some(s) = r.get("w_specialized") {
                writeln!(out, "w(lengths) = {s}").unwrap();
            }
            let trivial = r["verdict"]["trivial"].as_bool().unwrap_or(false);
            writeln!(out, "{}", if trivial { "trivial" } else { "not trivial" }).unwrap();
            writeln!(out, "certificate {}", r["verdict"]["certificate"]).unwrap();
        }
        "minor" => {
            if r["found"].as_bool().unwrap_or(false) {
                writeln!(out, "found: contract {} then delete {}", r["witness"]["contract"], r["witness"]["delete"]).unwrap();
            } else {
                writeln!(out, "not found").unwrap();
            }
        }
        "lattice" => {
            writeln!(out, "coordinates {}", r["coordinates"]).unwrap();
            for row in r["hnf"].as_array().into_iter().flatten() {
                writeln!(out, "{row}").unwrap();
            }
            if !r["index"].is_null() {
                writeln!(out, "index {}", r["index"]).unwrap();
            }
        }
        "verify-theorem" => {
            writeln!(
                out,
                "{} stable graphs: {} hyperelliptic type, {} not",
                r["graphs_checked"], r["trivial"], r["not_trivial"]
            )
            .unwrap();
            for check in r["fixture_checks"].as_array().into_iter().flatten() {
                let mark = if check["passed"].as_bool() == Some(true) { "ok  " } else { "FAIL" };
                writeln!(out, "{mark} {}", check["name"].as_str().unwrap_or("")).unwrap();
            }
            let transports = r["transport_checks"].as_array().map_or(0, Vec::len);
            let curve_trivial = r["transport_checks"]
                .as_array()
                .into_iter()
                .flatten()
                .filter(|c| c["all_ones_curve_trivial"].as_bool() == Some(true))
                .count();
            writeln!(
                out,
                "{transports} subdivisions of K4/L3 tested at graph level ({curve_trivial} trivial as all-ones curves)"
            )
            .unwrap();
            writeln!(out, "{} violations", r["failures"].as_array().map_or(0, Vec::len)).unwrap();
            writeln!(
                out,
                "algebraic checks cover only graphs with a known cocycle: the two base graphs and their subdivisions"
            )
            .unwrap();
        }
        _ => {
            writeln!(out, "{}", serde_json::to_string_pretty(r).unwrap_or_default()).unwrap();
        }
    }
    out
}

/// Runs the tool on `args` (including the program name), writing to the
/// given sinks, and returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    match run_command(&cli) {
        Ok(report) => {
            let text = if cli.json {
                serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
            } else {
                render_text(&report)
            };
            let _ = stdout.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            if cli.json {
                let body = json!({"error": e.to_string(), "exit_code": e.exit_code()});
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&body).unwrap_or_default());
            }
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Text graph file of a pinned fixture, as shipped in `fixtures/`.
pub fn fixture_text(name: &str) -> Option<String> {
    let graph = match name {
        "K4" => fixtures::k4(),
        "L3" => fixtures::l3(),
        _ => return None,
    };
    Some(crate::graph::io::to_text(&graph, None))
}
