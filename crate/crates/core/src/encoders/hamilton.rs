//! Hamilton cycles as cycles of 2-paths.
//!
//! A datum is a 2-path `v_l v_i v_j` centred on a cover vertex, with one
//! fiber per endpoint. Probes join two 2-paths that can sit next to each
//! other on a Hamilton cycle, so a cycle-shaped aggregation spells out a
//! cycle of the graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::cover::{is_vertex_cover, min_vertex_cover, VertexCover};
use super::{DecodeError, EncodeError};
use crate::aggregation::Aggregation;
use crate::detector::ProbeOperationGraph;
use crate::graph::{InputGraph, Vertex};
use crate::model::{BodyId, Copies, DataLibrary, DataType, FiberType, ProbeKind, ProbeLibrary, ProbeType};
use crate::oracles::CanonicalCycle;

pub const MIN_HAMILTON_VERTICES: usize = 5;

/// The 2-path `v_l v_i v_j`, stored with `l < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TwoPath {
    pub center: Vertex,
    pub l: Vertex,
    pub j: Vertex,
}

impl TwoPath {
    pub fn new(center: Vertex, a: Vertex, b: Vertex) -> Self {
        Self {
            center,
            l: a.min(b),
            j: a.max(b),
        }
    }

    pub fn ends(&self) -> [Vertex; 2] {
        [self.l, self.j]
    }

    pub fn edges(&self) -> [(Vertex, Vertex); 2] {
        let e = |u: Vertex, v: Vertex| (u.min(v), u.max(v));
        [e(self.l, self.center), e(self.center, self.j)]
    }

    pub fn name(&self) -> String {
        if self.center < 10 && self.j < 10 {
            format!("x_{}{}{}", self.center, self.l, self.j)
        } else {
            format!("x_{}.{}.{}", self.center, self.l, self.j)
        }
    }
}

#[derive(Clone, Debug)]
pub struct HamiltonEncoding {
    pub graph: InputGraph,
    pub cover: VertexCover,
    /// 2-path of body `b` at index `b - 1`.
    pub paths: Vec<TwoPath>,
    pub data: DataLibrary,
    pub probes: ProbeLibrary,
    pub target: ProbeOperationGraph,
}

impl HamiltonEncoding {
    pub fn path_of(&self, body: BodyId) -> Option<TwoPath> {
        self.paths.get((body as usize).checked_sub(1)?).copied()
    }

    pub fn body_of(&self, path: TwoPath) -> Option<BodyId> {
        self.paths.iter().position(|&p| p == path).map(|k| k as BodyId + 1)
    }

    /// Probes joining data centred on `i` and on `t`.
    pub fn probes_between_centers(&self, i: Vertex, t: Vertex) -> Vec<ProbeType> {
        self.probes
            .probes()
            .iter()
            .copied()
            .filter(|p| {
                let (x, y) = p.owners();
                let cx = self.paths[x as usize - 1].center;
                let cy = self.paths[y as usize - 1].center;
                (cx, cy) == (i, t) || (cx, cy) == (t, i)
            })
            .collect()
    }
}

/// The fibers a probe between `x` and `y` would join, named by endpoint
/// vertex, or `None` when the two 2-paths cannot be neighbours.
fn probe_fibers(g: &InputGraph, x: TwoPath, y: TwoPath) -> Option<(Vertex, Vertex)> {
    let a: BTreeSet<Vertex> = [x.center, x.l, x.j].into();
    let b: BTreeSet<Vertex> = [y.center, y.l, y.j].into();
    let xe: BTreeSet<Vertex> = x.ends().into();
    let ye: BTreeSet<Vertex> = y.ends().into();
    let shared_ends: Vec<Vertex> = xe.intersection(&ye).copied().collect();
    // The two paths continue each other through one common endpoint.
    if a.intersection(&b).count() == 1 && shared_ends.len() == 1 {
        let s = shared_ends[0];
        return Some((s, s));
    }
    // Adjacent centres, each path ending at the other's centre.
    if g.has_edge(x.center, y.center)
        && xe.contains(&y.center)
        && ye.contains(&x.center)
        && shared_ends.is_empty()
    {
        return Some((y.center, x.center));
    }
    None
}

/// Builds the 2-path library over a vertex cover (the lexicographically
/// smallest minimum cover unless one is given), its connective probes, and
/// cycle targets of every order a cover-centred tiling of a Hamilton cycle
/// can have.
pub fn encode_hamilton(g: &InputGraph, cover: Option<&[Vertex]>) -> Result<HamiltonEncoding, EncodeError> {
    let n = g.n();
    if n < MIN_HAMILTON_VERTICES {
        return Err(EncodeError::GraphTooSmall {
            n,
            min: MIN_HAMILTON_VERTICES,
        });
    }
    let cover = match cover {
        Some(given) => {
            let mut vertices: Vec<Vertex> = given.to_vec();
            vertices.sort_unstable();
            vertices.dedup();
            if let Some((u, v)) = g
                .edges()
                .find(|&(u, v)| !vertices.contains(&u) && !vertices.contains(&v))
            {
                return Err(EncodeError::NotACover(u, v));
            }
            debug_assert!(is_vertex_cover(g, &vertices));
            VertexCover {
                vertices,
                approximate: false,
            }
        }
        None => min_vertex_cover(g),
    };
    if let Some(&v) = cover.vertices.iter().find(|&&v| g.degree(v) < 2) {
        return Err(EncodeError::NoTwoPaths(v));
    }
    let needed = n.div_ceil(2);
    if cover.vertices.len() < needed {
        return Err(EncodeError::CoverTooSmall {
            cover: cover.vertices.len(),
            needed,
        });
    }

    let mut paths = Vec::new();
    for &i in &cover.vertices {
        let ns: Vec<Vertex> = g.neighbors(i).iter().copied().collect();
        for (k, &l) in ns.iter().enumerate() {
            for &j in &ns[k + 1..] {
                paths.push(TwoPath::new(i, l, j));
            }
        }
    }
    let types = paths
        .iter()
        .enumerate()
        .map(|(k, p)| {
            DataType::new(k as BodyId + 1, p.ends().map(|v| v.to_string())).with_name(p.name())
        })
        .collect();
    let data = DataLibrary::new(types);

    let fiber = |body: usize, path: TwoPath, end: Vertex| {
        FiberType::new(body as BodyId + 1, if end == path.l { 1 } else { 2 })
    };
    let mut probes = ProbeLibrary::new(ProbeKind::Connective);
    for (bx, &x) in paths.iter().enumerate() {
        for (by, &y) in paths.iter().enumerate().skip(bx + 1) {
            if x.center == y.center {
                continue;
            }
            if let Some((fx, fy)) = probe_fibers(g, x, y) {
                probes.insert(
                    ProbeType::connective(fiber(bx, x, fx), fiber(by, y, fy)),
                    Copies::Unbounded,
                );
            }
        }
    }
    let target = ProbeOperationGraph::cycles(needed..=cover.vertices.len())
        .expect("cycle orders are at least 3");
    Ok(HamiltonEncoding {
        graph: g.clone(),
        cover,
        paths,
        data,
        probes,
        target,
    })
}

/// Reads the cycle spelled by an aggregation: the union of every datum's two
/// edges, which must be a Hamilton cycle of the graph.
pub fn decode_hamilton(m: &Aggregation, enc: &HamiltonEncoding) -> Result<CanonicalCycle, DecodeError> {
    let g = &enc.graph;
    let mut edges = BTreeSet::new();
    for member in m.members() {
        let path = enc
            .path_of(member.body)
            .ok_or(DecodeError::UnknownDatum(member.body))?;
        edges.extend(path.edges());
    }
    if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| !g.has_edge(u, v)) {
        return Err(DecodeError::EdgeNotInGraph(u, v));
    }
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &(u, v) in &edges {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    if adj.len() != g.n() {
        return Err(DecodeError::NotSpanning {
            covered: adj.len(),
            n: g.n(),
        });
    }
    if adj.values().any(|ns| ns.len() != 2) {
        return Err(DecodeError::NotACycle);
    }
    let start = *adj.keys().next().expect("n >= 1");
    let mut sequence = vec![start];
    let (mut prev, mut cur) = (start, adj[&start][0]);
    while cur != start {
        sequence.push(cur);
        let ns = &adj[&cur];
        let next = if ns[0] == prev { ns[1] } else { ns[0] };
        prev = cur;
        cur = next;
    }
    if sequence.len() != g.n() {
        return Err(DecodeError::NotACycle);
    }
    Ok(CanonicalCycle::new(&sequence))
}
