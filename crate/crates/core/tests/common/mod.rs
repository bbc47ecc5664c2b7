#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropical_ceresa::extalg::{HElement, LElement, SymplecticLabel, WedgeTriple};
use tropical_ceresa::graph::{Edge, MultiGraph};
use tropical_ceresa::{EdgeId, IntPolynomial, VertexId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A connected multigraph of the given genus on 1 to 4 vertices: a random
/// tree plus `genus` extra edges (loops allowed), random orientations and a
/// shuffled set of edge ids.
pub fn random_graph(rng: &mut ChaCha8Rng, genus: usize) -> MultiGraph {
    let n: u32 = rng.gen_range(1..=4);
    let mut ends = Vec::new();
    for v in 2..=n {
        ends.push((rng.gen_range(1..v), v));
    }
    for _ in 0..genus {
        ends.push((rng.gen_range(1..=n), rng.gen_range(1..=n)));
    }
    let mut ids: Vec<u32> = (1..=ends.len() as u32).collect();
    ids.shuffle(rng);
    let edges: Vec<Edge> = ends
        .into_iter()
        .zip(ids)
        .map(|((a, b), id)| if rng.gen_bool(0.5) { Edge::new(id, a, b) } else { Edge::new(id, b, a) })
        .collect();
    MultiGraph::new((1..=n).map(VertexId), edges).expect("trees plus extra edges are connected")
}

pub fn small_int(rng: &mut ChaCha8Rng) -> BigInt {
    BigInt::from(rng.gen_range(-3i64..=3))
}

/// A random linear form over the graph's edge variables.
pub fn linear_form(rng: &mut ChaCha8Rng, graph: &MultiGraph) -> IntPolynomial {
    let ids: Vec<EdgeId> = graph.edge_ids().collect();
    let mut p = IntPolynomial::zero();
    for _ in 0..rng.gen_range(0..=2) {
        let e = *ids.choose(rng).unwrap();
        p = p + IntPolynomial::var(e).scale(&small_int(rng));
    }
    p
}

pub fn random_b(rng: &mut ChaCha8Rng, graph: &MultiGraph, g: usize) -> BTreeMap<(usize, usize, usize), IntPolynomial> {
    let mut b = BTreeMap::new();
    for i in 1..=g {
        for j in 1..=g {
            for k in j + 1..=g {
                if rng.gen_bool(0.4) {
                    b.insert((i, j, k), linear_form(rng, graph));
                }
            }
        }
    }
    b
}

pub fn random_a(rng: &mut ChaCha8Rng, g: usize) -> BTreeMap<(usize, usize, usize), IntPolynomial> {
    let mut a = BTreeMap::new();
    for i in 1..=g {
        for j in i + 1..=g {
            for k in 1..=g {
                if rng.gen_bool(0.4) {
                    a.insert((i, j, k), IntPolynomial::constant(small_int(rng)));
                }
            }
        }
    }
    a
}

pub fn random_h(rng: &mut ChaCha8Rng, graph: &MultiGraph, g: usize) -> HElement<IntPolynomial> {
    HElement {
        alpha: (0..g).map(|_| linear_form(rng, graph) + IntPolynomial::constant(small_int(rng))).collect(),
        beta: (0..g).map(|_| linear_form(rng, graph) + IntPolynomial::constant(small_int(rng))).collect(),
    }
}

pub fn labels(g: usize) -> Vec<SymplecticLabel> {
    (1..=g)
        .map(SymplecticLabel::alpha)
        .chain((1..=g).map(SymplecticLabel::beta))
        .collect()
}

/// A random element of `L ⊗ R` whose terms all have at least `min_betas`
/// beta factors.
pub fn random_l(rng: &mut ChaCha8Rng, graph: &MultiGraph, g: usize, min_betas: usize) -> LElement<IntPolynomial> {
    let all = labels(g);
    let mut x = LElement::zero();
    for _ in 0..rng.gen_range(1..=5) {
        let pick: Vec<SymplecticLabel> = all.choose_multiple(rng, 3).copied().collect();
        if let Some((_, w)) = WedgeTriple::new(pick[0], pick[1], pick[2]) {
            if w.beta_count() >= min_betas {
                x.add_term(w, linear_form(rng, graph) + IntPolynomial::constant(small_int(rng)));
            }
        }
    }
    x
}

/// A random spanning tree: Kruskal over a shuffled edge list.
pub fn random_tree(rng: &mut ChaCha8Rng, graph: &MultiGraph) -> Vec<EdgeId> {
    let mut edges: Vec<Edge> = graph.edges().to_vec();
    edges.shuffle(rng);
    let mut parent: BTreeMap<VertexId, VertexId> = graph.vertices().map(|v| (v, v)).collect();
    fn find(parent: &mut BTreeMap<VertexId, VertexId>, v: VertexId) -> VertexId {
        let p = parent[&v];
        if p == v {
            return v;
        }
        let root = find(parent, p);
        parent.insert(v, root);
        root
    }
    let mut tree = Vec::new();
    for e in edges {
        let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
        if a != b {
            parent.insert(a, b);
            tree.push(e.id);
        }
    }
    tree
}

pub fn random_lengths(rng: &mut ChaCha8Rng, graph: &MultiGraph) -> BTreeMap<EdgeId, u64> {
    graph.edge_ids().map(|e| (e, rng.gen_range(1..=4))).collect()
}
