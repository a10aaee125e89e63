//! Graph coloring: one datum per vertex with a fiber per candidate colour;
//! probes join differently coloured fibers across each edge. A datum commits
//! to one fiber, so an aggregation shaped like the graph is a proper coloring.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{DecodeError, EncodeError};
use crate::aggregation::Aggregation;
use crate::detector::{LabelMode, ProbeOperationGraph, TargetGraph};
use crate::graph::{InputGraph, Vertex};
use crate::model::{
    BodyId, Copies, DataLibrary, DataType, FiberDiscipline, FiberType, ProbeKind, ProbeLibrary,
    ProbeType,
};
use crate::oracles::{Coloring, SizeLimitExceeded};

/// Largest graph for which fixed classes are computed.
pub const FIXED_CLASS_LIMIT: usize = 20;
/// Colorings visited while computing fixed classes before giving up.
const PARTITION_BUDGET: u64 = 20_000_000;

const NAMES: [&str; 4] = ["r", "y", "b", "g"];

pub fn color_name(c: u32) -> String {
    NAMES
        .get(c as usize)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("c{c}"))
}

/// Vertices whose colour class is the same in every proper coloring, up to
/// renaming colours, with a canonical colour for each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedClasses {
    pub k: u32,
    pub colors: BTreeMap<Vertex, u32>,
}

impl FixedClasses {
    pub fn vertices(&self) -> Vec<Vertex> {
        self.colors.keys().copied().collect()
    }
}

/// Computes the fixed part of every `k`-coloring.
///
/// Two vertices are related when "same colour" is constant across all
/// colorings (always equal or always different). The fixed vertices are the
/// common part of all maximum cliques of that relation. Colours are numbered
/// by first occurrence in vertex order.
pub fn fixed_classes(g: &InputGraph, k: u32) -> Result<FixedClasses, EncodeError> {
    let n = g.n();
    if n > FIXED_CLASS_LIMIT {
        return Err(SizeLimitExceeded {
            what: "vertex count",
            got: n.to_string(),
            limit: FIXED_CLASS_LIMIT.to_string(),
        }
        .into());
    }
    // seen[u][v] bit 0: seen equal, bit 1: seen different.
    let mut seen = vec![vec![0u8; n]; n];
    let mut first: Option<Vec<u32>> = None;
    let mut colors = vec![u32::MAX; n];
    let mut visited = 0u64;
    let complete = partitions(g, k, 0, 0, &mut colors, &mut visited, &mut |c| {
        for u in 0..n {
            for v in u + 1..n {
                seen[u][v] |= if c[u] == c[v] { 1 } else { 2 };
            }
        }
        if first.is_none() {
            first = Some(c.to_vec());
        }
    });
    if !complete {
        return Err(SizeLimitExceeded {
            what: "partition count",
            got: format!("more than {PARTITION_BUDGET}"),
            limit: PARTITION_BUDGET.to_string(),
        }
        .into());
    }
    let Some(first) = first else {
        return Err(EncodeError::Uncolorable { k });
    };
    let mut adj = vec![0u32; n];
    for u in 0..n {
        for v in u + 1..n {
            if seen[u][v] != 3 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
    }
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best = (0u32, 0u32);
    bron_kerbosch(&adj, 0, all, 0, &mut best);
    let common = best.1;
    let mut renumber: BTreeMap<u32, u32> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for (v, &color) in first.iter().enumerate().take(n) {
        if common >> v & 1 == 1 {
            let next = renumber.len() as u32;
            let c = *renumber.entry(color).or_insert(next);
            out.insert(v as Vertex + 1, c);
        }
    }
    Ok(FixedClasses { k, colors: out })
}

/// Proper colorings with colours introduced in increasing order (one per
/// partition into at most `k` classes). Returns false when the budget ran out.
fn partitions<F: FnMut(&[u32])>(
    g: &InputGraph,
    k: u32,
    v: usize,
    used: u32,
    colors: &mut Vec<u32>,
    visited: &mut u64,
    visit: &mut F,
) -> bool {
    if v == colors.len() {
        *visited += 1;
        visit(colors);
        return *visited < PARTITION_BUDGET;
    }
    let limit = (used + 1).min(k);
    for c in 0..limit {
        let clash = g
            .neighbors(v as Vertex + 1)
            .iter()
            .any(|&u| (u as usize) <= v && colors[u as usize - 1] == c);
        if clash {
            continue;
        }
        colors[v] = c;
        let ok = partitions(g, k, v + 1, used.max(c + 1), colors, visited, visit);
        colors[v] = u32::MAX;
        if !ok {
            return false;
        }
    }
    true
}

/// Tracks the size of a maximum clique and the intersection of all maximum
/// cliques in `best = (size, intersection)`.
fn bron_kerbosch(adj: &[u32], r: u32, mut p: u32, mut x: u32, best: &mut (u32, u32)) {
    if p == 0 && x == 0 {
        let size = r.count_ones();
        if size > best.0 {
            *best = (size, r);
        } else if size == best.0 {
            best.1 &= r;
        }
        return;
    }
    if r.count_ones() + p.count_ones() < best.0 {
        return;
    }
    let pivot = (p | x).trailing_zeros() as usize;
    let mut candidates = p & !adj[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        let bit = 1u32 << v;
        bron_kerbosch(adj, r | bit, p & adj[v], x & adj[v], best);
        p &= !bit;
        x |= bit;
    }
}

/// Allowed colours per vertex (index `v - 1`, ascending).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColorCandidateTable {
    pub k: u32,
    pub candidates: Vec<Vec<u32>>,
}

impl ColorCandidateTable {
    pub fn new(k: u32, mut candidates: Vec<Vec<u32>>) -> Self {
        for c in &mut candidates {
            c.sort_unstable();
            c.dedup();
        }
        Self { k, candidates }
    }

    /// Every colour for every vertex.
    pub fn full(g: &InputGraph, k: u32) -> Self {
        Self::new(k, vec![(0..k).collect(); g.n()])
    }

    /// Fixed vertices get their canonical colour; every other vertex gets
    /// the colours not used by a fixed neighbour.
    pub fn from_fixed(g: &InputGraph, fixed: &FixedClasses) -> Self {
        let candidates = g
            .vertices()
            .map(|v| match fixed.colors.get(&v) {
                Some(&c) => vec![c],
                None => (0..fixed.k)
                    .filter(|&c| {
                        g.neighbors(v)
                            .iter()
                            .all(|u| fixed.colors.get(u) != Some(&c))
                    })
                    .collect(),
            })
            .collect();
        Self::new(fixed.k, candidates)
    }

    /// Vertices with a single candidate.
    pub fn fixed(&self) -> BTreeMap<Vertex, u32> {
        self.candidates
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() == 1)
            .map(|(v, c)| (v as Vertex + 1, c[0]))
            .collect()
    }

    pub fn fiber_count(&self) -> usize {
        self.candidates.iter().map(Vec::len).sum()
    }

    fn check(&self, g: &InputGraph) -> Result<(), EncodeError> {
        if self.candidates.len() != g.n() {
            return Err(EncodeError::TableMismatch(format!(
                "{} rows for {} vertices",
                self.candidates.len(),
                g.n()
            )));
        }
        for (v, c) in self.candidates.iter().enumerate() {
            if c.is_empty() {
                return Err(EncodeError::EmptyCandidateSet(v as Vertex + 1));
            }
            if let Some(bad) = c.iter().find(|&&x| x >= self.k) {
                return Err(EncodeError::TableMismatch(format!(
                    "colour {bad} at vertex {} is not below k = {}",
                    v + 1,
                    self.k
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ColoringEncoding {
    pub graph: InputGraph,
    pub table: ColorCandidateTable,
    pub data: DataLibrary,
    pub probes: ProbeLibrary,
    pub target: ProbeOperationGraph,
}

impl ColoringEncoding {
    pub fn color_of(&self, fiber: FiberType) -> Option<u32> {
        self.table
            .candidates
            .get((fiber.owner as usize).checked_sub(1)?)?
            .get((fiber.index as usize).checked_sub(1)?)
            .copied()
    }
}

/// Data type `v` per vertex with fibers named by colour, a connective probe
/// for every differently coloured candidate pair across each edge, and the
/// graph itself as a body-labelled target.
pub fn encode_coloring(g: &InputGraph, table: &ColorCandidateTable) -> Result<ColoringEncoding, EncodeError> {
    table.check(g)?;
    if g.n() < 2 || !g.is_connected() {
        return Err(EncodeError::Disconnected);
    }
    let types = g
        .vertices()
        .map(|v| {
            let tags = table.candidates[v as usize - 1].iter().map(|&c| color_name(c));
            DataType::new(v as BodyId, tags).with_name(format!("x_{v}"))
        })
        .collect();
    let data = DataLibrary::new(types).with_discipline(FiberDiscipline::Committed);
    let mut probes = ProbeLibrary::new(ProbeKind::Connective);
    for (u, v) in g.edges() {
        let cu = &table.candidates[u as usize - 1];
        let cv = &table.candidates[v as usize - 1];
        for (iu, &a) in cu.iter().enumerate() {
            for (iv, &b) in cv.iter().enumerate() {
                if a != b {
                    probes.insert(
                        ProbeType::connective(
                            FiberType::new(u, iu as u32 + 1),
                            FiberType::new(v, iv as u32 + 1),
                        ),
                        Copies::Unbounded,
                    );
                }
            }
        }
    }
    let shape = TargetGraph::new(
        g.n(),
        g.edges().map(|(u, v)| (u as usize - 1, v as usize - 1)),
    )
    .with_labels(g.vertices().collect());
    let target = ProbeOperationGraph::new(vec![shape], LabelMode::BodyLabeled)
        .expect("a connected graph is a valid target");
    Ok(ColoringEncoding {
        graph: g.clone(),
        table: table.clone(),
        data,
        probes,
        target,
    })
}

/// Reads each vertex's colour from the fiber its bonds go through and
/// checks the result is proper.
pub fn decode_coloring(m: &Aggregation, enc: &ColoringEncoding) -> Result<Coloring, DecodeError> {
    let g = &enc.graph;
    let mut colors = vec![u32::MAX; g.n()];
    for member in m.members() {
        let v = member.body;
        if v == 0 || v as usize > g.n() {
            return Err(DecodeError::UnknownDatum(v));
        }
        let fibers = m.fibers_used(member.instance);
        let candidates = &enc.table.candidates[v as usize - 1];
        let color = match fibers.first() {
            Some(&f) if fibers.iter().all(|&x| x == f) => enc.color_of(f),
            Some(_) => None,
            None if candidates.len() == 1 => Some(candidates[0]),
            None => None,
        };
        colors[v as usize - 1] = color.ok_or(DecodeError::AmbiguousColor(v))?;
    }
    if let Some(v) = colors.iter().position(|&c| c == u32::MAX) {
        return Err(DecodeError::MissingVertex(v as Vertex + 1));
    }
    for (u, v) in g.edges() {
        if colors[u as usize - 1] == colors[v as usize - 1] {
            return Err(DecodeError::ImproperColoring(u, v));
        }
    }
    Ok(colors)
}
