//! Canonical forms of unlabeled multigraphs and enumeration of stable graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use super::{Edge, MultiGraph};
use crate::ids::VertexId;

/// Isomorphism invariant: vertex count plus the lexicographically least
/// upper-triangular multiplicity vector (loops on the diagonal) over all
/// vertex orders compatible with a refined degree ordering.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    pub num_vertices: usize,
    pub multiplicities: Vec<u32>,
}

impl CanonicalKey {
    /// The graph on vertices `1..=n` whose edges are listed slot by slot.
    pub fn to_graph(&self) -> MultiGraph {
        let n = self.num_vertices;
        let mut edges = Vec::new();
        let mut slot = 0;
        for i in 0..n {
            for j in i..n {
                for _ in 0..self.multiplicities[slot] {
                    let id = edges.len() as u32 + 1;
                    edges.push(Edge::new(id, i as u32 + 1, j as u32 + 1));
                }
                slot += 1;
            }
        }
        let vertices = (1..=n as u32).map(VertexId);
        MultiGraph::new(vertices, edges).expect("canonical keys describe connected graphs")
    }
}

fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        xs.reverse();
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

fn upper_triangle(mult: &[Vec<u32>], order: &[usize]) -> Vec<u32> {
    let n = order.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(mult[order[i]][order[j]]);
        }
    }
    out
}

pub fn canonical_key(graph: &MultiGraph) -> CanonicalKey {
    let vertices: Vec<VertexId> = graph.vertices().collect();
    let index: BTreeMap<VertexId, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = vertices.len();
    let mut mult = vec![vec![0u32; n]; n];
    for e in graph.edges() {
        let (a, b) = (index[&e.tail], index[&e.head]);
        mult[a][b] += 1;
        if a != b {
            mult[b][a] += 1;
        }
    }
    let valence: Vec<u32> = (0..n)
        .map(|v| (0..n).map(|w| mult[v][w]).sum::<u32>() + mult[v][v])
        .collect();
    // Refined invariant: valence, loops, then the sorted (valence, multiplicity)
    // profile of the neighbours.
    let invariant: Vec<(u32, u32, Vec<(u32, u32)>)> = (0..n)
        .map(|v| {
            let mut profile: Vec<(u32, u32)> = (0..n)
                .filter(|&w| w != v && mult[v][w] > 0)
                .map(|w| (valence[w], mult[v][w]))
                .collect();
            profile.sort_unstable_by(|a, b| b.cmp(a));
            (valence[v], mult[v][v], profile)
        })
        .collect();
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| invariant[b].cmp(&invariant[a]));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &sorted {
        match classes.last_mut() {
            Some(class) if invariant[class[0]] == invariant[v] => class.push(v),
            _ => classes.push(vec![v]),
        }
    }
    for class in classes.iter_mut() {
        class.sort_unstable();
    }

    let mut best: Option<Vec<u32>> = None;
    loop {
        let order: Vec<usize> = classes.iter().flatten().copied().collect();
        let candidate = upper_triangle(&mult, &order);
        if best.as_ref().map_or(true, |b| candidate < *b) {
            best = Some(candidate);
        }
        // Advance the product of per-class permutations like an odometer.
        let mut advanced = false;
        for class in classes.iter_mut().rev() {
            if next_permutation(class) {
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    CanonicalKey {
        num_vertices: n,
        multiplicities: best.unwrap_or_default(),
    }
}

/// Isomorphism of the underlying unoriented, unlabeled multigraphs.
pub fn is_isomorphic(a: &MultiGraph, b: &MultiGraph) -> bool {
    a.num_vertices() == b.num_vertices()
        && a.num_edges() == b.num_edges()
        && canonical_key(a) == canonical_key(b)
}

/// All stable connected multigraphs (every vertex of valence at least 3,
/// loops counting twice) with at most `max_edges` edges and genus in
/// `genus`, one per isomorphism class, each in canonical labeling. Ordered by
/// edge count, then genus, then canonical key.
pub fn enumerate_graphs(max_edges: usize, genus: RangeInclusive<usize>) -> Vec<MultiGraph> {
    let mut out = Vec::new();
    for e in 1..=max_edges {
        for g in genus.clone() {
            if g > e {
                continue;
            }
            let n = e + 1 - g;
            if 3 * n > 2 * e {
                continue;
            }
            let mut keys = BTreeSet::new();
            let mut search = Search {
                n,
                slots: (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect(),
                mult: vec![vec![0; n]; n],
                degree: vec![0; n],
                remaining: e as u32,
                found: &mut keys,
            };
            search.run(0);
            out.extend(keys.into_iter().map(|k| k.to_graph()));
        }
    }
    out
}

struct Search<'a> {
    n: usize,
    slots: Vec<(usize, usize)>,
    mult: Vec<Vec<u32>>,
    degree: Vec<u32>,
    remaining: u32,
    found: &'a mut BTreeSet<CanonicalKey>,
}

impl Search<'_> {
    fn row_complete(&self, i: usize) -> bool {
        self.degree[i] >= 3 && (i == 0 || self.degree[i] <= self.degree[i - 1])
    }

    fn run(&mut self, slot: usize) {
        if slot == self.slots.len() {
            if self.remaining == 0 && self.connected() {
                let graph = self.graph();
                self.found.insert(canonical_key(&graph));
            }
            return;
        }
        let (i, j) = self.slots[slot];
        let last_in_row = j + 1 == self.n;
        let cost = if i == j { 2 } else { 1 };
        for m in 0..=self.remaining {
            self.mult[i][j] = m;
            self.mult[j][i] = m;
            self.degree[i] += cost * m;
            if i != j {
                self.degree[j] += m;
            }
            self.remaining -= m;
            let bound = if i == 0 { u32::MAX } else { self.degree[i - 1] };
            let ok = self.degree[i] <= bound && (!last_in_row || self.row_complete(i));
            if ok {
                self.run(slot + 1);
            }
            self.remaining += m;
            self.degree[i] -= cost * m;
            if i != j {
                self.degree[j] -= m;
            }
            self.mult[i][j] = 0;
            self.mult[j][i] = 0;
            if !ok && self.degree[i] + cost * m > bound {
                break;
            }
        }
    }

    fn connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..self.n {
                if !seen[w] && self.mult[v][w] > 0 {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn graph(&self) -> MultiGraph {
        let mut edges = Vec::new();
        for &(i, j) in &self.slots {
            for _ in 0..self.mult[i][j] {
                let id = edges.len() as u32 + 1;
                edges.push(Edge::new(id, i as u32 + 1, j as u32 + 1));
            }
        }
        MultiGraph::new((1..=self.n as u32).map(VertexId), edges).expect("checked connected")
    }
}
