//! Spanning trees, oriented fundamental cycles and the polynomial matrix `Q_G`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;

use super::{GraphError, MultiGraph, TropicalCurve};
use crate::ids::{EdgeId, VertexId};
use crate::intlin::Matrix;
use crate::{IntMatrix, IntPolynomial, PolyMatrix};

/// A multigraph with an ordered edge list `e_1, …, e_n` whose last `n - g`
/// edges form a spanning tree, the fundamental cycles `γ_1, …, γ_g` of the
/// first `g` edges, and `Q_G = Σ_e x_e [ℓ_e][ℓ_e]ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleBasisContext {
    graph: MultiGraph,
    basis: Vec<EdgeId>,
    tree: Vec<EdgeId>,
    cycles: Vec<BTreeMap<EdgeId, i64>>,
    q: PolyMatrix,
}

/// Context with the default spanning tree (BFS from the least vertex id,
/// least edge id first) or with `tree_hint`. Non-tree edges are numbered in
/// the graph's edge order.
pub fn build_cycle_context(
    graph: &MultiGraph,
    tree_hint: Option<&[EdgeId]>,
) -> Result<CycleBasisContext, GraphError> {
    let tree: Vec<EdgeId> = match tree_hint {
        Some(t) => t.to_vec(),
        None => bfs_tree(graph),
    };
    let in_tree: BTreeSet<EdgeId> = tree.iter().copied().collect();
    let basis: Vec<EdgeId> = graph.edge_ids().filter(|e| !in_tree.contains(e)).collect();
    CycleBasisContext::with_order(graph, &basis, &tree)
}

fn bfs_tree(graph: &MultiGraph) -> Vec<EdgeId> {
    let Some(root) = graph.vertices().next() else {
        return Vec::new();
    };
    let mut seen = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    let mut tree = Vec::new();
    while let Some(v) = queue.pop_front() {
        let mut incident: Vec<_> = graph.incident(v).collect();
        incident.sort_by_key(|e| e.id);
        for e in incident {
            let w = e.other(v);
            if seen.insert(w) {
                tree.push(e.id);
                queue.push_back(w);
            }
        }
    }
    tree
}

impl CycleBasisContext {
    /// Context with an explicit order of the non-tree edges. `basis` must be
    /// exactly the complement of `tree`, and `tree` a spanning tree.
    pub fn with_order(
        graph: &MultiGraph,
        basis: &[EdgeId],
        tree: &[EdgeId],
    ) -> Result<Self, GraphError> {
        let tree_set: BTreeSet<EdgeId> = tree.iter().copied().collect();
        if tree_set.len() != tree.len() {
            return Err(GraphError::NotSpanningTree("repeated edge".into()));
        }
        for &e in tree {
            let edge = graph.edge(e).ok_or(GraphError::UnknownEdge(e))?;
            if edge.is_loop() {
                return Err(GraphError::NotSpanningTree(format!("edge {e} is a loop")));
            }
        }
        if tree.len() + 1 != graph.num_vertices() {
            return Err(GraphError::NotSpanningTree(format!(
                "{} edges for {} vertices",
                tree.len(),
                graph.num_vertices()
            )));
        }
        let basis_set: BTreeSet<EdgeId> = basis.iter().copied().collect();
        let complement: BTreeSet<EdgeId> =
            graph.edge_ids().filter(|e| !tree_set.contains(e)).collect();
        if basis_set != complement || basis.len() != basis_set.len() {
            return Err(GraphError::Mismatch(
                "basis edges must be exactly the non-tree edges".into(),
            ));
        }

        let mut adjacency: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
        for &e in tree {
            let edge = graph.edge(e).expect("checked above");
            adjacency.entry(edge.tail).or_default().push((e, edge.head));
            adjacency.entry(edge.head).or_default().push((e, edge.tail));
        }
        let mut cycles = Vec::with_capacity(basis.len());
        for &e in basis {
            let edge = graph.edge(e).expect("basis edge exists");
            let mut cycle = BTreeMap::from([(e, 1)]);
            if !edge.is_loop() {
                let path = tree_path(&adjacency, edge.head, edge.tail).ok_or_else(|| {
                    GraphError::NotSpanningTree("tree does not connect the graph".into())
                })?;
                for (te, from) in path {
                    let t = graph.edge(te).expect("tree edge exists");
                    cycle.insert(te, if t.tail == from { 1 } else { -1 });
                }
            }
            cycles.push(cycle);
        }

        let g = basis.len();
        let mut q = Matrix::zeros(g, g);
        for e in graph.edge_ids() {
            let x = IntPolynomial::var(e);
            let signs: Vec<i64> = cycles.iter().map(|c| c.get(&e).copied().unwrap_or(0)).collect();
            for i in 0..g {
                for j in 0..g {
                    let s = signs[i] * signs[j];
                    if s != 0 {
                        q[(i, j)] += &x.scale(&BigInt::from(s));
                    }
                }
            }
        }
        Ok(CycleBasisContext {
            graph: graph.clone(),
            basis: basis.to_vec(),
            tree: tree.to_vec(),
            cycles,
            q,
        })
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn genus(&self) -> usize {
        self.basis.len()
    }

    /// The non-tree edges `e_1, …, e_g` in order.
    pub fn basis_edges(&self) -> &[EdgeId] {
        &self.basis
    }

    pub fn tree_edges(&self) -> &[EdgeId] {
        &self.tree
    }

    /// `e_1, …, e_n`: basis edges followed by tree edges.
    pub fn ordering(&self) -> Vec<EdgeId> {
        self.basis.iter().chain(&self.tree).copied().collect()
    }

    pub fn is_tree_edge(&self, e: EdgeId) -> bool {
        self.tree.contains(&e)
    }

    /// Signed incidence of `e` in the fundamental cycle `γ_j` (0-based `j`).
    pub fn incidence(&self, j: usize, e: EdgeId) -> i64 {
        self.cycles[j].get(&e).copied().unwrap_or(0)
    }

    /// Oriented fundamental cycle `γ_j` as signed edge incidences.
    pub fn cycle(&self, j: usize) -> &BTreeMap<EdgeId, i64> {
        &self.cycles[j]
    }

    /// Coordinates of `[ℓ_e]` in the basis `β_1, …, β_g`.
    pub fn beta_class(&self, e: EdgeId) -> Vec<i64> {
        (0..self.genus()).map(|j| self.incidence(j, e)).collect()
    }

    /// The universal polarization `Q_G` over `ℤ[x_e]`.
    pub fn q(&self) -> &PolyMatrix {
        &self.q
    }

    /// Context of `G/f` for a tree edge `f`, keeping the basis order.
    pub fn contract_tree_edge(&self, f: EdgeId) -> Result<CycleBasisContext, GraphError> {
        if !self.is_tree_edge(f) {
            return Err(GraphError::NotSpanningTree(format!(
                "edge {f} is not in the spanning tree"
            )));
        }
        let contracted = self.graph.contract_edge(f)?;
        let tree: Vec<EdgeId> = self.tree.iter().copied().filter(|&e| e != f).collect();
        CycleBasisContext::with_order(&contracted, &self.basis, &tree)
    }

    /// Context of the graph with `f` subdivided. `f` keeps its role and the
    /// new half-edge joins the spanning tree. Returns the new edge id too.
    pub fn subdivide(&self, f: EdgeId) -> Result<(CycleBasisContext, EdgeId), GraphError> {
        let (graph, _, fresh) = self.graph.subdivide_edge(f)?;
        let mut tree = self.tree.clone();
        tree.push(fresh);
        Ok((CycleBasisContext::with_order(&graph, &self.basis, &tree)?, fresh))
    }
}

fn tree_path(
    adjacency: &BTreeMap<VertexId, Vec<(EdgeId, VertexId)>>,
    from: VertexId,
    to: VertexId,
) -> Option<Vec<(EdgeId, VertexId)>> {
    let mut parent: BTreeMap<VertexId, (EdgeId, VertexId)> = BTreeMap::new();
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &(e, w) in adjacency.get(&v).into_iter().flatten() {
            if seen.insert(w) {
                parent.insert(w, (e, v));
                queue.push_back(w);
            }
        }
    }
    if !seen.contains(&to) {
        return None;
    }
    // Each step is (edge, vertex the step leaves from), ordered from `from`.
    let mut path = Vec::new();
    let mut v = to;
    while v != from {
        let (e, p) = parent[&v];
        path.push((e, p));
        v = p;
    }
    path.reverse();
    Some(path)
}

/// `Q_Γ`: the polarization evaluated at the curve's edge lengths.
pub fn specialize_q(
    ctx: &CycleBasisContext,
    curve: &TropicalCurve,
) -> Result<IntMatrix, GraphError> {
    if curve.graph() != ctx.graph() {
        return Err(GraphError::Mismatch(
            "curve is not supported on the context's graph".into(),
        ));
    }
    ctx.q().try_map(|p| {
        p.eval(|e| curve.length(e).map(BigInt::from))
            .map_err(|err| match err {
                crate::polyring::PolyError::MissingVariable(e) => GraphError::MissingLength(e),
                other => GraphError::Mismatch(other.to_string()),
            })
    })
}
