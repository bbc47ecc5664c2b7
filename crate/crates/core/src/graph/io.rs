//! Text and JSON graph files.
//!
//! Text format, one record per line, `#` starts a comment:
//!
//! ```text
//! v <id>
//! e <id> <tail> <head> [length]
//! ```
//!
//! `v` lines are optional. Lengths are all present or all absent. The JSON
//! form is `{"vertices": [...], "edges": [{"id", "tail", "head", "length"?}]}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Edge, GraphError, MultiGraph, TropicalCurve};
use crate::ids::{EdgeId, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid JSON graph: {0}")]
    Json(String),
    #[error("lengths must be given for every edge or for none")]
    PartialLengths,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A parsed graph file: the graph and, if present, its edge lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: MultiGraph,
    pub lengths: Option<BTreeMap<EdgeId, u64>>,
}

impl GraphFile {
    pub fn curve(&self) -> Option<TropicalCurve> {
        self.lengths
            .as_ref()
            .map(|l| TropicalCurve::new(self.graph.clone(), l.clone()).expect("validated when parsed"))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonGraph {
    vertices: Vec<u32>,
    edges: Vec<JsonEdge>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonEdge {
    id: u32,
    tail: u32,
    head: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length: Option<u64>,
}

/// Parses either format; input starting with `{` is read as JSON.
pub fn parse_graph(input: &str) -> Result<GraphFile, GraphFileError> {
    if input.trim_start().starts_with('{') {
        parse_graph_json(input)
    } else {
        parse_graph_text(input)
    }
}

pub fn parse_graph_text(input: &str) -> Result<GraphFile, GraphFileError> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut lengths = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let syntax = |message: String| GraphFileError::Syntax { line, message };
        let number = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| syntax(format!("expected a non-negative integer, found {s:?}")))
        };
        match fields[0] {
            "v" if fields.len() == 2 => vertices.push(VertexId(number(fields[1])?)),
            "e" if fields.len() == 4 || fields.len() == 5 => {
                edges.push(Edge::new(number(fields[1])?, number(fields[2])?, number(fields[3])?));
                let length = match fields.get(4) {
                    Some(s) => Some(
                        s.parse::<u64>()
                            .ok()
                            .filter(|&l| l > 0)
                            .ok_or_else(|| syntax(format!("length must be a positive integer, found {s:?}")))?,
                    ),
                    None => None,
                };
                lengths.push(length);
            }
            "v" => return Err(syntax("expected `v <id>`".into())),
            "e" => return Err(syntax("expected `e <id> <tail> <head> [length]`".into())),
            other => return Err(syntax(format!("unknown record type {other:?}"))),
        }
    }
    assemble(vertices, edges, lengths)
}

pub fn parse_graph_json(input: &str) -> Result<GraphFile, GraphFileError> {
    let parsed: JsonGraph =
        serde_json::from_str(input).map_err(|e| GraphFileError::Json(e.to_string()))?;
    let edges = parsed.edges.iter().map(|e| Edge::new(e.id, e.tail, e.head)).collect();
    let lengths = parsed.edges.iter().map(|e| e.length).collect();
    assemble(parsed.vertices.into_iter().map(VertexId).collect(), edges, lengths)
}

fn assemble(
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    lengths: Vec<Option<u64>>,
) -> Result<GraphFile, GraphFileError> {
    let graph = MultiGraph::new(vertices, edges)?;
    let given = lengths.iter().filter(|l| l.is_some()).count();
    let lengths = if given == 0 {
        None
    } else if given == lengths.len() {
        let map: BTreeMap<EdgeId, u64> = graph
            .edge_ids()
            .zip(lengths.into_iter().flatten())
            .collect();
        if map.values().any(|&l| l == 0) {
            let e = map.iter().find(|(_, &l)| l == 0).map(|(e, _)| *e).unwrap();
            return Err(GraphError::NonPositiveLength(e).into());
        }
        Some(map)
    } else {
        return Err(GraphFileError::PartialLengths);
    };
    Ok(GraphFile { graph, lengths })
}

/// Text rendering: every vertex as a sorted `v` line, then the edges in order.
pub fn to_text(graph: &MultiGraph, lengths: Option<&BTreeMap<EdgeId, u64>>) -> String {
    let mut out = String::new();
    for v in graph.vertices() {
        writeln!(out, "v {v}").unwrap();
    }
    for e in graph.edges() {
        write!(out, "e {} {} {}", e.id, e.tail, e.head).unwrap();
        if let Some(l) = lengths.and_then(|m| m.get(&e.id)) {
            write!(out, " {l}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn to_json_value(graph: &MultiGraph, lengths: Option<&BTreeMap<EdgeId, u64>>) -> serde_json::Value {
    let doc = JsonGraph {
        vertices: graph.vertices().map(|v| v.0).collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| JsonEdge {
                id: e.id.0,
                tail: e.tail.0,
                head: e.head.0,
                length: lengths.and_then(|m| m.get(&e.id).copied()),
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("graph documents serialize")
}

pub fn to_json(graph: &MultiGraph, lengths: Option<&BTreeMap<EdgeId, u64>>) -> String {
    serde_json::to_string_pretty(&to_json_value(graph, lengths)).expect("graph documents serialize")
}

/// Parses comma-separated positive lengths, e.g. `2,1,1,1,1,1`.
pub fn parse_lengths_csv(input: &str) -> Result<Vec<u64>, String> {
    input
        .split(',')
        .map(str::trim)
        .map(|s| {
            s.parse::<u64>()
                .ok()
                .filter(|&l| l > 0)
                .ok_or_else(|| format!("length must be a positive integer, found {s:?}"))
        })
        .collect()
}
