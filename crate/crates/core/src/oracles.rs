//! Brute-force ground truth: Hamilton cycles, proper colorings and the full
//! space of legal aggregations of a small library.
//!
//! Nothing here calls into the engine or the encoders.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::aggregation::{Aggregation, Bond, CanonicalForm, Endpoint, Member};
use crate::graph::{InputGraph, Vertex};
use crate::model::{BodyId, DataLibrary, FiberDiscipline, FiberType, ProbeLibrary, ProbeType};

pub const HAMILTON_LIMIT: usize = 14;
pub const COLORING_SEARCH_LIMIT: f64 = 1e8;
pub const AGGREGATION_TYPE_LIMIT: usize = 6;
pub const AGGREGATION_PROBE_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{what} is {got}, above the oracle limit {limit}")]
pub struct SizeLimitExceeded {
    pub what: &'static str,
    pub got: String,
    pub limit: String,
}

/// A cycle as a vertex sequence starting at its smallest vertex and
/// continuing towards the smaller of that vertex's two cycle neighbours.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CanonicalCycle(Vec<Vertex>);

impl CanonicalCycle {
    /// Normalizes any rotation or reflection of a cycle.
    pub fn new(sequence: &[Vertex]) -> Self {
        let k = sequence.len();
        if k < 3 {
            return Self(sequence.to_vec());
        }
        let start = (0..k).min_by_key(|&i| sequence[i]).expect("non-empty");
        let next = sequence[(start + 1) % k];
        let prev = sequence[(start + k - 1) % k];
        let out = if next <= prev {
            (0..k).map(|d| sequence[(start + d) % k]).collect()
        } else {
            (0..k).map(|d| sequence[(start + k - d) % k]).collect()
        };
        Self(out)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    /// Cycle edges as `(min, max)` pairs.
    pub fn edges(&self) -> BTreeSet<(Vertex, Vertex)> {
        let k = self.0.len();
        (0..k)
            .map(|i| {
                let (u, v) = (self.0[i], self.0[(i + 1) % k]);
                (u.min(v), u.max(v))
            })
            .collect()
    }
}

impl fmt::Display for CanonicalCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("-"))
    }
}

/// Every Hamilton cycle of `g`, each once.
pub fn brute_hamilton(g: &InputGraph) -> Result<BTreeSet<CanonicalCycle>, SizeLimitExceeded> {
    let n = g.n();
    if n > HAMILTON_LIMIT {
        return Err(SizeLimitExceeded {
            what: "vertex count",
            got: n.to_string(),
            limit: HAMILTON_LIMIT.to_string(),
        });
    }
    let mut out = BTreeSet::new();
    if n < 3 {
        return Ok(out);
    }
    let mut path = vec![1];
    let mut used = vec![false; n + 1];
    used[1] = true;
    extend_path(g, &mut path, &mut used, &mut out);
    Ok(out)
}

fn extend_path(
    g: &InputGraph,
    path: &mut Vec<Vertex>,
    used: &mut [bool],
    out: &mut BTreeSet<CanonicalCycle>,
) {
    let n = g.n();
    let last = *path.last().expect("path starts at 1");
    if path.len() == n {
        // Keep one orientation: second vertex below the last.
        if g.has_edge(last, 1) && path[1] < last {
            out.insert(CanonicalCycle(path.clone()));
        }
        return;
    }
    for v in 1..=n as Vertex {
        if !used[v as usize] && g.has_edge(last, v) {
            used[v as usize] = true;
            path.push(v);
            extend_path(g, path, used, out);
            path.pop();
            used[v as usize] = false;
        }
    }
}

/// A colour per vertex, indexed by `vertex - 1`.
pub type Coloring = Vec<u32>;

/// Calls `visit` on every proper `k`-coloring extending `fixed`, in
/// lexicographic order.
pub fn for_each_coloring<F: FnMut(&[u32])>(
    g: &InputGraph,
    k: u32,
    fixed: &BTreeMap<Vertex, u32>,
    mut visit: F,
) -> Result<(), SizeLimitExceeded> {
    let free = g.vertices().filter(|v| !fixed.contains_key(v)).count();
    let space = (k as f64).powi(free as i32);
    if space > COLORING_SEARCH_LIMIT {
        return Err(SizeLimitExceeded {
            what: "coloring search space",
            got: format!("{space:e}"),
            limit: format!("{COLORING_SEARCH_LIMIT:e}"),
        });
    }
    let mut colors = vec![u32::MAX; g.n()];
    color_from(g, k, fixed, 1, &mut colors, &mut visit);
    Ok(())
}

fn color_from<F: FnMut(&[u32])>(
    g: &InputGraph,
    k: u32,
    fixed: &BTreeMap<Vertex, u32>,
    v: Vertex,
    colors: &mut Vec<u32>,
    visit: &mut F,
) {
    if v as usize > g.n() {
        visit(colors);
        return;
    }
    let options: Vec<u32> = match fixed.get(&v) {
        Some(&c) => vec![c],
        None => (0..k).collect(),
    };
    for c in options {
        let clash = g
            .neighbors(v)
            .iter()
            .any(|&u| u < v && colors[u as usize - 1] == c);
        if c < k && !clash {
            colors[v as usize - 1] = c;
            color_from(g, k, fixed, v + 1, colors, visit);
            colors[v as usize - 1] = u32::MAX;
        }
    }
}

/// Every proper `k`-coloring of `g` extending `fixed`.
pub fn brute_coloring(
    g: &InputGraph,
    k: u32,
    fixed: &BTreeMap<Vertex, u32>,
) -> Result<BTreeSet<Coloring>, SizeLimitExceeded> {
    let mut out = BTreeSet::new();
    for_each_coloring(g, k, fixed, |c| {
        out.insert(c.to_vec());
    })?;
    Ok(out)
}

/// Every aggregation that can exist under the order threshold, one datum per
/// type, one bond per pair and the library's fiber discipline, found by
/// trying every subset of probe types. Instance ids are positions in the
/// sorted member bodies.
pub fn brute_aggregations(
    data: &DataLibrary,
    probes: &ProbeLibrary,
    max_order: usize,
) -> Result<Vec<Aggregation>, SizeLimitExceeded> {
    if data.types.len() > AGGREGATION_TYPE_LIMIT {
        return Err(SizeLimitExceeded {
            what: "data type count",
            got: data.types.len().to_string(),
            limit: AGGREGATION_TYPE_LIMIT.to_string(),
        });
    }
    if probes.len() > AGGREGATION_PROBE_LIMIT {
        return Err(SizeLimitExceeded {
            what: "probe type count",
            got: probes.len().to_string(),
            limit: AGGREGATION_PROBE_LIMIT.to_string(),
        });
    }
    let mut found: BTreeMap<CanonicalForm, Aggregation> = BTreeMap::new();
    if max_order >= 1 {
        for body in data.bodies() {
            let single = Aggregation::single(Member { instance: 0, body });
            found.insert(single.canonical_form(), single);
        }
    }
    let usable: Vec<ProbeType> = probes
        .probes()
        .iter()
        .copied()
        .filter(|p| data.contains_fiber(p.a()) && data.contains_fiber(p.b()))
        .collect();
    for mask in 1u32..1 << usable.len() {
        let chosen: Vec<ProbeType> = (0..usable.len())
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| usable[k])
            .collect();
        if let Some(agg) = assemble(&chosen, data.discipline, max_order) {
            found.insert(agg.canonical_form(), agg);
        }
    }
    Ok(found.into_values().collect())
}

fn assemble(chosen: &[ProbeType], discipline: FiberDiscipline, max_order: usize) -> Option<Aggregation> {
    let mut pairs = BTreeSet::new();
    let mut bodies = BTreeSet::new();
    let mut fiber_use: BTreeMap<FiberType, usize> = BTreeMap::new();
    for p in chosen {
        let (x, y) = p.owners();
        if !pairs.insert((x.min(y), x.max(y))) {
            return None;
        }
        bodies.insert(x);
        bodies.insert(y);
        *fiber_use.entry(p.a()).or_default() += 1;
        *fiber_use.entry(p.b()).or_default() += 1;
    }
    if bodies.len() > max_order {
        return None;
    }
    match discipline {
        FiberDiscipline::Exclusive => {
            if fiber_use.values().any(|&c| c > 1) {
                return None;
            }
        }
        FiberDiscipline::Committed => {
            let mut owners = BTreeSet::new();
            for f in fiber_use.keys() {
                if !owners.insert(f.owner) {
                    return None;
                }
            }
        }
    }
    let bodies: Vec<BodyId> = bodies.into_iter().collect();
    let id = |b: BodyId| bodies.iter().position(|&x| x == b).expect("member") as u64;
    // Connectivity by union-find over member positions.
    let mut parent: Vec<usize> = (0..bodies.len()).collect();
    fn root(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for p in chosen {
        let (x, y) = p.owners();
        let (rx, ry) = (root(&mut parent, id(x) as usize), root(&mut parent, id(y) as usize));
        parent[rx] = ry;
    }
    let r0 = root(&mut parent, 0);
    if (0..bodies.len()).any(|v| root(&mut parent, v) != r0) {
        return None;
    }
    let members = bodies
        .iter()
        .map(|&body| Member {
            instance: id(body),
            body,
        })
        .collect();
    let bonds = chosen
        .iter()
        .map(|&probe| Bond {
            probe,
            a: Endpoint {
                instance: id(probe.a().owner),
                fiber: probe.a(),
            },
            b: Endpoint {
                instance: id(probe.b().owner),
                fiber: probe.b(),
            },
        })
        .collect();
    Some(Aggregation::new(members, bonds))
}
