//! The pinned labelings of `K4` and `L3` on which the shipped cocycles are
//! valid.
//!
//! `K4` has centre vertex 1 with spokes `e4, e5, e6` as spanning tree and rim
//! `e1: 3→4, e2: 4→2, e3: 2→3`. `L3` has vertices 1, 2, 3 with spanning tree
//! `{e5, e6}`.

use crate::graph::{build_cycle_context, CycleBasisContext, MultiGraph};
use crate::ids::EdgeId;

pub fn k4() -> MultiGraph {
    MultiGraph::from_edges(&[(1, 3, 4), (2, 4, 2), (3, 2, 3), (4, 1, 2), (5, 1, 3), (6, 1, 4)])
        .expect("fixture is connected")
}

pub const K4_TREE: [EdgeId; 3] = [EdgeId(4), EdgeId(5), EdgeId(6)];

pub fn k4_context() -> CycleBasisContext {
    build_cycle_context(&k4(), Some(&K4_TREE)).expect("fixture tree spans")
}

pub fn l3() -> MultiGraph {
    MultiGraph::from_edges(&[(1, 2, 1), (2, 1, 3), (3, 2, 3), (4, 2, 3), (5, 3, 1), (6, 1, 2)])
        .expect("fixture is connected")
}

pub const L3_TREE: [EdgeId; 2] = [EdgeId(5), EdgeId(6)];

pub fn l3_context() -> CycleBasisContext {
    build_cycle_context(&l3(), Some(&L3_TREE)).expect("fixture tree spans")
}
