//! Detection of the forbidden minors `K4` and `L3` with replayable witnesses.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::enumerate::canonical_key;
use super::{GraphError, MultiGraph};
use crate::ids::{EdgeId, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MinorPattern {
    K4,
    L3,
}

impl MinorPattern {
    /// The pattern graph: the complete graph on four vertices, or a triangle
    /// with every edge doubled.
    pub fn graph(self) -> MultiGraph {
        match self {
            MinorPattern::K4 => MultiGraph::from_edges(&[
                (1, 1, 2),
                (2, 1, 3),
                (3, 1, 4),
                (4, 2, 3),
                (5, 2, 4),
                (6, 3, 4),
            ]),
            MinorPattern::L3 => MultiGraph::from_edges(&[
                (1, 1, 2),
                (2, 1, 2),
                (3, 2, 3),
                (4, 2, 3),
                (5, 3, 1),
                (6, 3, 1),
            ]),
        }
        .expect("pattern graphs are connected")
    }

    pub fn genus(self) -> usize {
        match self {
            MinorPattern::K4 => 3,
            MinorPattern::L3 => 4,
        }
    }

    fn parts(self) -> usize {
        match self {
            MinorPattern::K4 => 4,
            MinorPattern::L3 => 3,
        }
    }

    /// Edges needed between every pair of branch sets.
    fn multiplicity(self) -> usize {
        match self {
            MinorPattern::K4 => 1,
            MinorPattern::L3 => 2,
        }
    }
}

impl fmt::Display for MinorPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MinorPattern::K4 => "K4",
            MinorPattern::L3 => "L3",
        })
    }
}

impl FromStr for MinorPattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "K4" | "k4" => Ok(MinorPattern::K4),
            "L3" | "l3" => Ok(MinorPattern::L3),
            other => Err(format!("unknown minor pattern {other:?}; expected K4 or L3")),
        }
    }
}

/// Contract `contract` in order, then delete `delete` in order; the result
/// is isomorphic to the pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorWitness {
    pub pattern: MinorPattern,
    pub contract: Vec<EdgeId>,
    pub delete: Vec<EdgeId>,
}

impl MinorWitness {
    pub fn replay(&self, graph: &MultiGraph) -> Result<MultiGraph, GraphError> {
        let mut g = graph.clone();
        for &e in &self.contract {
            g = g.contract_edge(e)?;
        }
        for &e in &self.delete {
            g = g.delete_edge(e)?;
        }
        Ok(g)
    }

    /// Replays the operations and checks the result against the pattern.
    pub fn verify(&self, graph: &MultiGraph) -> bool {
        self.replay(graph)
            .map(|m| canonical_key(&m) == canonical_key(&self.pattern.graph()))
            .unwrap_or(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorSearch {
    pub found: bool,
    pub witness: Option<MinorWitness>,
}

impl MinorSearch {
    fn absent() -> Self {
        MinorSearch {
            found: false,
            witness: None,
        }
    }
}

/// Decides whether `pattern` is a minor of `graph`. Minors cannot raise the
/// genus or the vertex count, and a graph whose simplification reduces to
/// nothing under series-parallel reductions has no `K4` minor; otherwise the
/// branch-set search decides.
pub fn has_minor(graph: &MultiGraph, pattern: MinorPattern) -> MinorSearch {
    if graph.genus() < pattern.genus() || graph.num_vertices() < pattern.parts() {
        return MinorSearch::absent();
    }
    if pattern == MinorPattern::K4 && is_k4_minor_free_by_reduction(graph) {
        return MinorSearch::absent();
    }
    has_minor_by_search(graph, pattern)
}

/// True iff the graph has neither a `K4` nor an `L3` minor.
pub fn is_hyperelliptic_type(graph: &MultiGraph) -> bool {
    !has_minor(graph, MinorPattern::K4).found && !has_minor(graph, MinorPattern::L3).found
}

/// Treewidth-at-most-two test on the underlying simple graph: repeatedly
/// delete vertices of degree at most one and suppress vertices of degree
/// two. The graph is `K4`-minor-free iff this empties it.
pub fn is_k4_minor_free_by_reduction(graph: &MultiGraph) -> bool {
    let mut adjacency: BTreeMap<VertexId, BTreeSet<VertexId>> =
        graph.vertices().map(|v| (v, BTreeSet::new())).collect();
    for e in graph.edges().iter().filter(|e| !e.is_loop()) {
        adjacency.get_mut(&e.tail).unwrap().insert(e.head);
        adjacency.get_mut(&e.head).unwrap().insert(e.tail);
    }
    loop {
        let Some((&v, _)) = adjacency.iter().find(|(_, n)| n.len() <= 2) else {
            return adjacency.is_empty();
        };
        let neighbours = adjacency.remove(&v).unwrap();
        for w in &neighbours {
            adjacency.get_mut(w).unwrap().remove(&v);
        }
        if let [a, b] = neighbours.iter().copied().collect::<Vec<_>>()[..] {
            adjacency.get_mut(&a).unwrap().insert(b);
            adjacency.get_mut(&b).unwrap().insert(a);
        }
    }
}

/// Exhaustive search over partitions of the vertices into connected branch
/// sets, one per pattern vertex, with enough edges between every pair.
pub fn has_minor_by_search(graph: &MultiGraph, pattern: MinorPattern) -> MinorSearch {
    let vertices: Vec<VertexId> = graph.vertices().collect();
    let m = pattern.parts();
    if vertices.len() < m || graph.genus() < pattern.genus() {
        return MinorSearch::absent();
    }
    let mut assignment = vec![0usize; vertices.len()];
    let mut finder = BranchSets {
        graph,
        vertices: &vertices,
        parts: m,
        multiplicity: pattern.multiplicity(),
    };
    match finder.assign(&mut assignment, 0, 0) {
        Some(parts) => MinorSearch {
            found: true,
            witness: Some(finder.witness(pattern, &parts)),
        },
        None => MinorSearch::absent(),
    }
}

struct BranchSets<'a> {
    graph: &'a MultiGraph,
    vertices: &'a [VertexId],
    parts: usize,
    multiplicity: usize,
}

impl BranchSets<'_> {
    fn assign(&mut self, assignment: &mut [usize], next: usize, used: usize) -> Option<BTreeMap<VertexId, usize>> {
        if next == self.vertices.len() {
            if used != self.parts {
                return None;
            }
            let parts: BTreeMap<VertexId, usize> = self
                .vertices
                .iter()
                .copied()
                .zip(assignment.iter().copied())
                .collect();
            return self.accepts(&parts).then_some(parts);
        }
        let left = self.vertices.len() - next;
        if used + left < self.parts {
            return None;
        }
        let top = used.min(self.parts - 1);
        for part in 0..=top {
            assignment[next] = part;
            let used_now = used.max(part + 1);
            if let Some(found) = self.assign(assignment, next + 1, used_now) {
                return Some(found);
            }
        }
        None
    }

    fn accepts(&self, parts: &BTreeMap<VertexId, usize>) -> bool {
        let mut between = vec![vec![0usize; self.parts]; self.parts];
        for e in self.graph.edges() {
            let (a, b) = (parts[&e.tail], parts[&e.head]);
            if a != b {
                between[a][b] += 1;
                between[b][a] += 1;
            }
        }
        for a in 0..self.parts {
            for b in a + 1..self.parts {
                if between[a][b] < self.multiplicity {
                    return false;
                }
            }
        }
        (0..self.parts).all(|p| !self.spanning_tree(parts, p).is_none())
    }

    /// Edges of a spanning tree of branch set `p`, or `None` if it is not
    /// connected.
    fn spanning_tree(&self, parts: &BTreeMap<VertexId, usize>, p: usize) -> Option<Vec<EdgeId>> {
        let members: Vec<VertexId> = parts.iter().filter(|(_, &q)| q == p).map(|(&v, _)| v).collect();
        let root = *members.first()?;
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        let mut tree = Vec::new();
        while let Some(v) = queue.pop_front() {
            for e in self.graph.incident(v) {
                let w = e.other(v);
                if parts[&w] == p && seen.insert(w) {
                    tree.push(e.id);
                    queue.push_back(w);
                }
            }
        }
        (seen.len() == members.len()).then_some(tree)
    }

    fn witness(&self, pattern: MinorPattern, parts: &BTreeMap<VertexId, usize>) -> MinorWitness {
        let mut contract = Vec::new();
        for p in 0..self.parts {
            contract.extend(self.spanning_tree(parts, p).expect("accepted partition"));
        }
        let contracted: BTreeSet<EdgeId> = contract.iter().copied().collect();
        let mut kept = vec![vec![0usize; self.parts]; self.parts];
        let mut delete = Vec::new();
        for e in self.graph.edges() {
            if contracted.contains(&e.id) {
                continue;
            }
            let (a, b) = (parts[&e.tail], parts[&e.head]);
            if a != b && kept[a][b] < self.multiplicity {
                kept[a][b] += 1;
                kept[b][a] += 1;
            } else {
                delete.push(e.id);
            }
        }
        MinorWitness {
            pattern,
            contract,
            delete,
        }
    }
}
