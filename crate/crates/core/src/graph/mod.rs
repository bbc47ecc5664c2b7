//! Connected multigraphs (loops and parallel edges allowed), tropical curves,
//! and the graph operations used by the Ceresa-Zharkov machinery.

mod cycles;
mod enumerate;
pub mod io;
mod minor;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{EdgeId, VertexId};

pub use cycles::{build_cycle_context, specialize_q, CycleBasisContext};
pub use enumerate::{canonical_key, enumerate_graphs, is_isomorphic, CanonicalKey};
pub use minor::{
    has_minor, has_minor_by_search, is_hyperelliptic_type, is_k4_minor_free_by_reduction,
    MinorPattern, MinorSearch, MinorWitness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("graph is not connected")]
    Disconnected,
    #[error("edge id {0} is used twice")]
    DuplicateEdge(EdgeId),
    #[error("vertex id {0} is used twice")]
    DuplicateVertex(VertexId),
    #[error("edge {edge} references unknown vertex {vertex}")]
    UnknownVertex { edge: EdgeId, vertex: VertexId },
    #[error("no edge with id {0}")]
    UnknownEdge(EdgeId),
    #[error("edge {0} is a loop and cannot be contracted")]
    LoopContraction(EdgeId),
    #[error("deleting edge {0} would disconnect the graph")]
    WouldDisconnect(EdgeId),
    #[error("not a spanning tree: {0}")]
    NotSpanningTree(String),
    #[error("genus {genus} is below the required minimum {min}")]
    GenusTooSmall { genus: usize, min: usize },
    #[error("edge {0} has no length")]
    MissingLength(EdgeId),
    #[error("edge {0} has a non-positive length")]
    NonPositiveLength(EdgeId),
    #[error("graphs do not match: {0}")]
    Mismatch(String),
}

/// An oriented edge; `tail == head` for a loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

impl Edge {
    pub fn new(id: u32, tail: u32, head: u32) -> Self {
        Edge {
            id: EdgeId(id),
            tail: VertexId(tail),
            head: VertexId(head),
        }
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }

    /// The endpoint opposite to `v`.
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }
}

/// A finite connected multigraph. The stored `(tail, head)` order of each
/// edge is its orientation; edges keep their insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiGraph {
    vertices: BTreeSet<VertexId>,
    edges: Vec<Edge>,
}

impl MultiGraph {
    /// Builds a graph, checking that ids are unique, endpoints exist and the
    /// result is connected. Endpoints not listed in `vertices` are added.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = Edge>,
    {
        let mut vs = BTreeSet::new();
        for v in vertices {
            if !vs.insert(v) {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        let edges: Vec<Edge> = edges.into_iter().collect();
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !seen.insert(e.id) {
                return Err(GraphError::DuplicateEdge(e.id));
            }
            vs.insert(e.tail);
            vs.insert(e.head);
        }
        Self::checked(vs, edges)
    }

    /// Like [`MultiGraph::new`] but every endpoint must be declared.
    pub fn with_declared_vertices(
        vertices: BTreeSet<VertexId>,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !seen.insert(e.id) {
                return Err(GraphError::DuplicateEdge(e.id));
            }
            for v in [e.tail, e.head] {
                if !vertices.contains(&v) {
                    return Err(GraphError::UnknownVertex { edge: e.id, vertex: v });
                }
            }
        }
        Self::checked(vertices, edges)
    }

    /// Convenience constructor from `(id, tail, head)` triples.
    pub fn from_edges(edges: &[(u32, u32, u32)]) -> Result<Self, GraphError> {
        Self::new(
            std::iter::empty(),
            edges.iter().map(|&(id, t, h)| Edge::new(id, t, h)),
        )
    }

    fn checked(vertices: BTreeSet<VertexId>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let g = MultiGraph { vertices, edges };
        if !g.is_connected_without(None) {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|e| e.id)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn genus(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    /// Valence of `v`; a loop contributes 2.
    pub fn valence(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.tail == v) + usize::from(e.head == v))
            .sum()
    }

    /// Edges incident to `v`, in edge order; a loop is listed once.
    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.tail == v || e.head == v)
    }

    pub fn is_stable(&self) -> bool {
        self.vertices.iter().all(|&v| self.valence(v) >= 3)
    }

    fn max_vertex_id(&self) -> u32 {
        self.vertices.iter().next_back().map_or(0, |v| v.0)
    }

    /// Smallest edge id strictly above every id in use.
    pub fn fresh_edge_id(&self) -> EdgeId {
        EdgeId(self.edges.iter().map(|e| e.id.0 + 1).max().unwrap_or(1))
    }

    fn is_connected_without(&self, skip: Option<EdgeId>) -> bool {
        let Some(&start) = self.vertices.iter().next() else {
            return true;
        };
        let mut adjacency: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for e in self.edges.iter().filter(|e| Some(e.id) != skip) {
            adjacency.entry(e.tail).or_default().push(e.head);
            adjacency.entry(e.head).or_default().push(e.tail);
        }
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in adjacency.get(&v).into_iter().flatten() {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// True when removing `e` disconnects the graph.
    pub fn is_bridge(&self, e: EdgeId) -> bool {
        !self.is_connected_without(Some(e))
    }

    /// Contracts the non-loop edge `f`. The endpoint with the larger id is
    /// merged into the one with the smaller id; all other edges keep their
    /// ids and orientations.
    pub fn contract_edge(&self, f: EdgeId) -> Result<MultiGraph, GraphError> {
        let edge = *self.edge(f).ok_or(GraphError::UnknownEdge(f))?;
        if edge.is_loop() {
            return Err(GraphError::LoopContraction(f));
        }
        let keep = edge.tail.min(edge.head);
        let gone = edge.tail.max(edge.head);
        let rename = |v: VertexId| if v == gone { keep } else { v };
        let edges = self
            .edges
            .iter()
            .filter(|e| e.id != f)
            .map(|e| Edge {
                id: e.id,
                tail: rename(e.tail),
                head: rename(e.head),
            })
            .collect();
        let mut vertices = self.vertices.clone();
        vertices.remove(&gone);
        Ok(MultiGraph { vertices, edges })
    }

    /// Removes `f`, refusing when that would disconnect the graph.
    pub fn delete_edge(&self, f: EdgeId) -> Result<MultiGraph, GraphError> {
        if self.edge(f).is_none() {
            return Err(GraphError::UnknownEdge(f));
        }
        if self.is_bridge(f) {
            return Err(GraphError::WouldDisconnect(f));
        }
        Ok(MultiGraph {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().filter(|e| e.id != f).copied().collect(),
        })
    }

    /// Subdivides `f = (u -> v)` by a new vertex `m`: `f` becomes `u -> m`
    /// and a fresh edge `m -> v` is appended. Returns the graph, the new
    /// vertex and the new edge.
    pub fn subdivide_edge(&self, f: EdgeId) -> Result<(MultiGraph, VertexId, EdgeId), GraphError> {
        let edge = *self.edge(f).ok_or(GraphError::UnknownEdge(f))?;
        let mid = VertexId(self.max_vertex_id() + 1);
        let fresh = self.fresh_edge_id();
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| if e.id == f { Edge { head: mid, ..*e } } else { *e })
            .collect();
        edges.push(Edge {
            id: fresh,
            tail: mid,
            head: edge.head,
        });
        let mut vertices = self.vertices.clone();
        vertices.insert(mid);
        Ok((MultiGraph { vertices, edges }, mid, fresh))
    }

    /// Biconnected components. Every loop is its own block and every bridge
    /// is a two-vertex, one-edge block.
    pub fn blocks(&self) -> Vec<MultiGraph> {
        let mut blocks = Vec::new();
        for e in self.edges.iter().filter(|e| e.is_loop()) {
            blocks.push(MultiGraph {
                vertices: BTreeSet::from([e.tail]),
                edges: vec![*e],
            });
        }
        let proper: Vec<&Edge> = self.edges.iter().filter(|e| !e.is_loop()).collect();
        let mut adjacency: BTreeMap<VertexId, Vec<(usize, VertexId)>> = BTreeMap::new();
        for (i, e) in proper.iter().enumerate() {
            adjacency.entry(e.tail).or_default().push((i, e.head));
            adjacency.entry(e.head).or_default().push((i, e.tail));
        }

        let mut disc: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut low: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut edge_stack: Vec<usize> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut time = 0;

        for &root in &self.vertices {
            if disc.contains_key(&root) {
                continue;
            }
            disc.insert(root, time);
            low.insert(root, time);
            time += 1;
            // (vertex, edge used to enter it, next adjacency position)
            let mut stack: Vec<(VertexId, Option<usize>, usize)> = vec![(root, None, 0)];
            while let Some(&mut (v, via, ref mut pos)) = stack.last_mut() {
                let neighbours = adjacency.get(&v).map(Vec::as_slice).unwrap_or(&[]);
                if *pos < neighbours.len() {
                    let (ei, w) = neighbours[*pos];
                    *pos += 1;
                    if Some(ei) == via {
                        continue;
                    }
                    match disc.get(&w) {
                        None => {
                            edge_stack.push(ei);
                            disc.insert(w, time);
                            low.insert(w, time);
                            time += 1;
                            stack.push((w, Some(ei), 0));
                        }
                        Some(&dw) if dw < disc[&v] => {
                            edge_stack.push(ei);
                            let lv = low[&v].min(dw);
                            low.insert(v, lv);
                        }
                        Some(_) => {}
                    }
                } else {
                    stack.pop();
                    if let Some(&(parent, _, _)) = stack.last() {
                        let lp = low[&parent].min(low[&v]);
                        low.insert(parent, lp);
                        if low[&v] >= disc[&parent] {
                            let entry = via.expect("non-root vertex has an entry edge");
                            let mut group = Vec::new();
                            while let Some(top) = edge_stack.pop() {
                                group.push(top);
                                if top == entry {
                                    break;
                                }
                            }
                            groups.push(group);
                        }
                    }
                }
            }
        }

        for mut group in groups {
            group.sort_unstable();
            let edges: Vec<Edge> = group.iter().map(|&i| *proper[i]).collect();
            let vertices = edges.iter().flat_map(|e| [e.tail, e.head]).collect();
            blocks.push(MultiGraph { vertices, edges });
        }
        blocks.sort_by_key(|b| b.edges.iter().map(|e| e.id).min());
        blocks
    }

    /// Edges whose removal disconnects the graph.
    pub fn bridges(&self) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|e| !e.is_loop() && self.is_bridge(e.id))
            .map(|e| e.id)
            .collect()
    }

    /// Contracts every bridge.
    pub fn two_edge_connectivization(&self) -> MultiGraph {
        let mut g = self.clone();
        for b in self.bridges() {
            g = g.contract_edge(b).expect("bridges are not loops");
        }
        g
    }

    /// The stable graph tropically equivalent to `self`: 1-valent vertices
    /// are removed with their edge and 2-valent vertices are smoothed, until
    /// neither exists. The smoothed edge keeps the smaller of the two ids.
    pub fn stabilize(&self) -> Result<MultiGraph, GraphError> {
        let genus = self.genus();
        if genus < 2 {
            return Err(GraphError::GenusTooSmall { genus, min: 2 });
        }
        let mut g = self.clone();
        loop {
            let candidate = g
                .vertices
                .iter()
                .copied()
                .find(|&v| matches!(g.valence(v), 1 | 2) && !g.incident(v).any(Edge::is_loop));
            let Some(v) = candidate else {
                return Ok(g);
            };
            let incident: Vec<Edge> = g.incident(v).copied().collect();
            g.vertices.remove(&v);
            match incident.as_slice() {
                [leaf] => g.edges.retain(|e| e.id != leaf.id),
                [a, b] => {
                    let (keep, drop) = if a.id < b.id { (*a, *b) } else { (*b, *a) };
                    let far = drop.other(v);
                    let merged = Edge {
                        id: keep.id,
                        tail: if keep.tail == v { far } else { keep.tail },
                        head: if keep.head == v { far } else { keep.head },
                    };
                    g.edges.retain(|e| e.id != drop.id);
                    for e in g.edges.iter_mut() {
                        if e.id == keep.id {
                            *e = merged;
                        }
                    }
                }
                _ => unreachable!("valence 1 or 2 without loops"),
            }
        }
    }

    /// Renumbers vertices `1..=n` and edges `1..=m` in their current order.
    pub fn relabeled(&self) -> MultiGraph {
        let vmap: BTreeMap<VertexId, VertexId> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, VertexId(i as u32 + 1)))
            .collect();
        MultiGraph {
            vertices: vmap.values().copied().collect(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| Edge {
                    id: EdgeId(i as u32 + 1),
                    tail: vmap[&e.tail],
                    head: vmap[&e.head],
                })
                .collect(),
        }
    }
}

/// A multigraph with positive integer edge lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalCurve {
    graph: MultiGraph,
    lengths: BTreeMap<EdgeId, u64>,
}

impl TropicalCurve {
    pub fn new(graph: MultiGraph, lengths: BTreeMap<EdgeId, u64>) -> Result<Self, GraphError> {
        for e in graph.edges() {
            match lengths.get(&e.id) {
                None => return Err(GraphError::MissingLength(e.id)),
                Some(0) => return Err(GraphError::NonPositiveLength(e.id)),
                Some(_) => {}
            }
        }
        if let Some(extra) = lengths.keys().find(|id| graph.edge(**id).is_none()) {
            return Err(GraphError::UnknownEdge(*extra));
        }
        Ok(TropicalCurve { graph, lengths })
    }

    /// Lengths listed in the graph's edge order.
    pub fn from_positional(graph: MultiGraph, lengths: &[u64]) -> Result<Self, GraphError> {
        if lengths.len() != graph.num_edges() {
            return Err(GraphError::Mismatch(format!(
                "{} lengths given for {} edges",
                lengths.len(),
                graph.num_edges()
            )));
        }
        let map = graph.edge_ids().zip(lengths.iter().copied()).collect();
        Self::new(graph, map)
    }

    pub fn all_ones(graph: MultiGraph) -> Self {
        let lengths = graph.edge_ids().map(|e| (e, 1)).collect();
        TropicalCurve { graph, lengths }
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn lengths(&self) -> &BTreeMap<EdgeId, u64> {
        &self.lengths
    }

    pub fn length(&self, e: EdgeId) -> Option<u64> {
        self.lengths.get(&e).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn barbell() -> MultiGraph {
        MultiGraph::from_edges(&[(1, 1, 1), (2, 1, 2), (3, 2, 2)]).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert_eq!(
            MultiGraph::from_edges(&[(1, 1, 2), (2, 3, 4)]),
            Err(GraphError::Disconnected)
        );
        assert_eq!(
            MultiGraph::from_edges(&[(1, 1, 2), (1, 2, 1)]),
            Err(GraphError::DuplicateEdge(EdgeId(1)))
        );
        let lone = MultiGraph::new([VertexId(7)], []).unwrap();
        assert_eq!(lone.genus(), 0);
    }

    #[test]
    fn genus_of_examples() {
        assert_eq!(fixtures::k4().genus(), 3);
        assert_eq!(fixtures::l3().genus(), 4);
        let path = MultiGraph::from_edges(&[(1, 1, 2), (2, 2, 3), (3, 2, 4)]).unwrap();
        assert_eq!(path.genus(), 0);
    }

    #[test]
    fn contraction() {
        let k4 = fixtures::k4();
        let c = k4.contract_edge(EdgeId(4)).unwrap();
        assert_eq!((c.num_vertices(), c.num_edges(), c.genus()), (3, 5, 3));

        let path = MultiGraph::from_edges(&[(1, 1, 2), (2, 2, 3), (3, 3, 4)]).unwrap();
        let shorter = path.contract_edge(EdgeId(2)).unwrap();
        assert_eq!((shorter.num_vertices(), shorter.num_edges()), (3, 2));

        let wedge = barbell().contract_edge(EdgeId(2)).unwrap();
        assert_eq!((wedge.num_vertices(), wedge.genus()), (1, 2));
        assert!(wedge.edges().iter().all(Edge::is_loop));

        assert_eq!(
            barbell().contract_edge(EdgeId(1)),
            Err(GraphError::LoopContraction(EdgeId(1)))
        );
    }

    #[test]
    fn deletion() {
        let banana = MultiGraph::from_edges(&[(1, 1, 2), (2, 1, 2)]).unwrap();
        let single = banana.delete_edge(EdgeId(2)).unwrap();
        assert_eq!((single.num_edges(), single.genus()), (1, 0));
        let g = barbell().delete_edge(EdgeId(1)).unwrap();
        assert_eq!(g.genus(), 1);
        assert_eq!(
            barbell().delete_edge(EdgeId(2)),
            Err(GraphError::WouldDisconnect(EdgeId(2)))
        );
    }

    #[test]
    fn block_decomposition() {
        assert_eq!(fixtures::k4().blocks().len(), 1);
        let bowtie =
            MultiGraph::from_edges(&[(1, 1, 2), (2, 2, 3), (3, 3, 1), (4, 1, 4), (5, 4, 5), (6, 5, 1)])
                .unwrap();
        let blocks = bowtie.blocks();
        assert_eq!(blocks.len(), 2);
        assert!(blocks.iter().all(|b| b.num_edges() == 3 && b.genus() == 1));

        let blocks = barbell().blocks();
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks.iter().filter(|b| b.num_edges() == 1 && b.num_vertices() == 2).count(), 1);
        assert_eq!(blocks.iter().map(MultiGraph::genus).sum::<usize>(), 2);

        let l3 = fixtures::l3();
        assert_eq!(l3.blocks().len(), 1);
    }

    #[test]
    fn stabilization() {
        let k4 = fixtures::k4();
        let (sub, _, _) = k4.subdivide_edge(EdgeId(3)).unwrap();
        let s = sub.stabilize().unwrap();
        assert_eq!(s, k4);

        let mut edges: Vec<Edge> = k4.edges().to_vec();
        edges.push(Edge::new(7, 1, 10));
        edges.push(Edge::new(8, 10, 11));
        let pendant = MultiGraph::new([], edges).unwrap();
        assert_eq!(pendant.stabilize().unwrap(), k4);

        assert_eq!(k4.stabilize().unwrap(), k4);
        let cycle = MultiGraph::from_edges(&[(1, 1, 2), (2, 2, 1)]).unwrap();
        assert!(matches!(cycle.stabilize(), Err(GraphError::GenusTooSmall { .. })));
    }

    #[test]
    fn two_edge_connectivization_contracts_bridges() {
        let g = barbell().two_edge_connectivization();
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.genus(), 2);
    }

    #[test]
    fn tropical_curve_lengths() {
        let k4 = fixtures::k4();
        assert!(TropicalCurve::from_positional(k4.clone(), &[1, 1, 1]).is_err());
        assert_eq!(
            TropicalCurve::from_positional(k4.clone(), &[1, 0, 1, 1, 1, 1]),
            Err(GraphError::NonPositiveLength(EdgeId(2)))
        );
        let c = TropicalCurve::from_positional(k4, &[2, 1, 1, 1, 1, 1]).unwrap();
        assert_eq!(c.length(EdgeId(1)), Some(2));
    }
}
