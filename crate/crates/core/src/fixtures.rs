//! Bundled instances.
//!
//! `hamilton8` is an 8-vertex graph recovered from its 2-path listing over
//! the cover {1..5}: every 2-path `v_l v_i v_j` certifies the edges `v_l v_i`
//! and `v_i v_j`, and since the centres form a vertex cover, these are all the
//! edges. `g12` is a 12-vertex maximal planar graph (30 = 3n - 6 edges).

use crate::encoders::ColorCandidateTable;
use crate::graph::{InputGraph, Vertex};

/// 2-paths `(centre, l, j)` over the cover {1, 2, 3, 4, 5}, as listed.
pub const HAMILTON8_TWO_PATHS: [(Vertex, Vertex, Vertex); 17] = [
    (1, 7, 4),
    (1, 7, 8),
    (1, 7, 6),
    (1, 4, 8),
    (1, 4, 6),
    (1, 8, 6),
    (2, 6, 8),
    (3, 5, 8),
    (4, 5, 8),
    (4, 5, 1),
    (4, 5, 7),
    (4, 8, 1),
    (4, 8, 7),
    (4, 1, 7),
    (5, 3, 4),
    (5, 3, 7),
    (5, 4, 7),
];

/// Rebuilds a graph from 2-paths whose centres cover every edge.
pub fn graph_from_two_paths(n: usize, paths: &[(Vertex, Vertex, Vertex)]) -> InputGraph {
    let edges = paths.iter().flat_map(|&(i, l, j)| [(l, i), (i, j)]);
    InputGraph::new(n, edges).expect("2-path vertices are in range")
}

pub fn hamilton8() -> InputGraph {
    graph_from_two_paths(8, &HAMILTON8_TWO_PATHS)
}

pub const G12_EDGES: [(Vertex, Vertex); 30] = [
    (1, 2),
    (1, 3),
    (1, 7),
    (1, 8),
    (1, 9),
    (1, 10),
    (2, 3),
    (2, 4),
    (2, 6),
    (2, 7),
    (3, 4),
    (3, 10),
    (3, 11),
    (4, 6),
    (4, 11),
    (4, 12),
    (5, 7),
    (5, 8),
    (5, 9),
    (5, 10),
    (5, 12),
    (6, 7),
    (6, 12),
    (7, 8),
    (7, 12),
    (8, 9),
    (9, 10),
    (10, 11),
    (10, 12),
    (11, 12),
];

pub fn g12() -> InputGraph {
    InputGraph::new(12, G12_EDGES).expect("G12 edges are in range")
}

/// Candidate colours of `g12` with four colours (r, y, b, g = 0..4) after
/// fixing {1..5}.
pub fn g12_candidates() -> ColorCandidateTable {
    const ROWS: [&str; 12] = [
        "r", "y", "b", "g", "r", "rb", "bg", "ybg", "ybg", "yg", "ry", "yb",
    ];
    let candidates = ROWS
        .iter()
        .map(|row| {
            row.chars()
                .map(|c| "rybg".find(c).expect("colour letter") as u32)
                .collect()
        })
        .collect();
    ColorCandidateTable::new(4, candidates)
}

/// A named bundled graph.
pub fn by_name(name: &str) -> Option<InputGraph> {
    match name {
        "hamilton8" => Some(hamilton8()),
        "g12" => Some(g12()),
        _ => None,
    }
}

pub const NAMES: [&str; 2] = ["hamilton8", "g12"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamilton8_shape() {
        let g = hamilton8();
        assert_eq!(g.edge_count(), 12);
        let expected = [
            (1, 4), (1, 6), (1, 7), (1, 8), (2, 6), (2, 8),
            (3, 5), (3, 8), (4, 5), (4, 7), (4, 8), (5, 7),
        ];
        assert_eq!(g.edges().collect::<Vec<_>>(), expected);
        assert!(g.is_connected());
    }

    #[test]
    fn g12_is_maximal_planar_sized() {
        let g = g12();
        assert_eq!(g.edge_count(), 3 * 12 - 6);
        assert!(g.is_connected());
        assert_eq!(g12_candidates().fiber_count(), 21);
    }
}
