use serde::Serialize;

use crate::graph::{InputGraph, Vertex};

/// Largest graph solved exactly; bigger graphs get a greedy cover.
pub const EXACT_COVER_LIMIT: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexCover {
    pub vertices: Vec<Vertex>,
    /// Set when the graph exceeded the exact limit and the cover is only a
    /// 2-approximation.
    pub approximate: bool,
}

pub fn is_vertex_cover(g: &InputGraph, cover: &[Vertex]) -> bool {
    g.edges().all(|(u, v)| cover.contains(&u) || cover.contains(&v))
}

pub fn min_vertex_cover(g: &InputGraph) -> VertexCover {
    min_vertex_cover_with_limit(g, EXACT_COVER_LIMIT)
}

/// A minimum vertex cover, lexicographically smallest among the optima.
/// Graphs above `limit` vertices fall back to the matching-based
/// 2-approximation.
pub fn min_vertex_cover_with_limit(g: &InputGraph, limit: usize) -> VertexCover {
    if g.n() > limit.min(63) {
        return greedy_cover(g);
    }
    let n = g.n();
    // Bit v-1 stands for vertex v.
    let adj: Vec<u64> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << (w - 1)))
        .collect();
    let best = cover_size(&adj, 0, 0).expect("the full vertex set is a cover");
    let (mut inside, mut outside) = (0u64, 0u64);
    for v in 0..n {
        let bit = 1u64 << v;
        if cover_size(&adj, inside | bit, outside) == Some(best) {
            inside |= bit;
        } else {
            outside |= bit;
        }
    }
    VertexCover {
        vertices: (0..n).filter(|v| inside >> v & 1 == 1).map(|v| v as Vertex + 1).collect(),
        approximate: false,
    }
}

/// Size of a smallest cover containing `inside` and avoiding `outside`.
fn cover_size(adj: &[u64], inside: u64, outside: u64) -> Option<u32> {
    let n = adj.len();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut forced = inside;
    for (v, &nbrs) in adj.iter().enumerate() {
        if outside >> v & 1 == 1 {
            if nbrs & outside != 0 {
                return None;
            }
            forced |= nbrs;
        }
    }
    if forced & outside != 0 {
        return None;
    }
    let alive = all & !forced & !outside;
    let mut best = n as u32 + 1;
    branch(adj, alive, forced.count_ones(), &mut best);
    (best <= n as u32).then_some(best)
}

/// Branch on the highest-degree undecided vertex: take it, or take all of
/// its undecided neighbours.
fn branch(adj: &[u64], alive: u64, size: u32, best: &mut u32) {
    let mut top = None;
    let mut edges = 0u32;
    let mut max_deg = 0u32;
    let mut rest = alive;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (adj[v] & alive).count_ones();
        edges += d;
        if d > max_deg {
            max_deg = d;
            top = Some(v);
        }
    }
    let Some(v) = top else {
        *best = (*best).min(size);
        return;
    };
    let edges = edges / 2;
    if size + edges.div_ceil(max_deg) >= *best {
        return;
    }
    let bit = 1u64 << v;
    branch(adj, alive & !bit, size + 1, best);
    let ns = adj[v] & alive;
    branch(adj, alive & !bit & !ns, size + ns.count_ones(), best);
}

/// Both endpoints of a maximal matching, scanned in edge order.
fn greedy_cover(g: &InputGraph) -> VertexCover {
    let mut taken = vec![false; g.n() + 1];
    for (u, v) in g.edges() {
        if !taken[u as usize] && !taken[v as usize] {
            taken[u as usize] = true;
            taken[v as usize] = true;
        }
    }
    VertexCover {
        vertices: g.vertices().filter(|&v| taken[v as usize]).collect(),
        approximate: true,
    }
}
