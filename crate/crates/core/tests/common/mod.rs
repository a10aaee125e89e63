//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use probe_machine::detector::{LabelMode, ProbeOperationGraph, TargetGraph};
use probe_machine::graph::{InputGraph, Vertex};
use probe_machine::model::{Copies, DataLibrary, DataType, FiberDiscipline, ProbeKind, ProbeLibrary, ProbeType};
use rand::seq::SliceRandom;
use rand::Rng;

/// G(n, p) with vertices 1..=n.
pub fn gnp<R: Rng>(rng: &mut R, n: usize, p: f64) -> InputGraph {
    let mut edges = Vec::new();
    for u in 1..=n as Vertex {
        for v in u + 1..=n as Vertex {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    InputGraph::new(n, edges).expect("vertices in range")
}

/// G(n, p) conditioned on being connected, by rejection.
pub fn connected_gnp<R: Rng>(rng: &mut R, n: usize, p: f64) -> InputGraph {
    loop {
        let g = gnp(rng, n, p);
        if g.is_connected() {
            return g;
        }
    }
}

/// Data types `1..=n` with 1..=max_fibers fibers tagged `f1, f2, ..`.
pub fn random_data<R: Rng>(rng: &mut R, n: usize, max_fibers: usize) -> DataLibrary {
    let types = (1..=n as u32)
        .map(|body| {
            let k = rng.gen_range(1..=max_fibers);
            DataType::new(body, (1..=k).map(|i| format!("f{i}")))
        })
        .collect();
    let discipline = if rng.gen_bool(0.5) {
        FiberDiscipline::Exclusive
    } else {
        FiberDiscipline::Committed
    };
    DataLibrary::new(types).with_discipline(discipline)
}

/// Every probe the library admits: unordered inter-owner pairs for
/// connective probes, ordered ones for transitive probes.
pub fn all_probes(data: &DataLibrary, kind: ProbeKind) -> Vec<ProbeType> {
    let fibers: Vec<_> = data.types.iter().flat_map(|t| t.fibers.iter().map(|f| f.ty)).collect();
    let mut out = Vec::new();
    for (i, &a) in fibers.iter().enumerate() {
        for (j, &b) in fibers.iter().enumerate() {
            if a.owner == b.owner {
                continue;
            }
            match kind {
                ProbeKind::Connective if i < j => out.push(ProbeType::connective(a, b)),
                ProbeKind::Transitive => out.push(ProbeType::transitive(a, b)),
                _ => {}
            }
        }
    }
    out
}

/// A random subset of at most `max` admissible probes.
pub fn random_probes<R: Rng>(rng: &mut R, data: &DataLibrary, kind: ProbeKind, max: usize) -> ProbeLibrary {
    let mut pool = all_probes(data, kind);
    pool.shuffle(rng);
    let take = rng.gen_range(0..=max.min(pool.len()));
    let mut lib = ProbeLibrary::new(kind);
    for p in pool.into_iter().take(take) {
        lib.insert(p, Copies::Unbounded);
    }
    lib
}

/// A random connected target on 2..=max_order vertices: a path, a cycle, a
/// star or a connected G(n, 1/2); sometimes several targets at once, and
/// sometimes body-labeled.
pub fn random_target<R: Rng>(rng: &mut R, data: &DataLibrary, max_order: usize) -> ProbeOperationGraph {
    let n_types = data.types.len();
    let max_order = max_order.min(n_types).max(2);
    let shape = |rng: &mut R, k: usize| -> TargetGraph {
        match rng.gen_range(0..4) {
            0 => TargetGraph::new(k, (0..k - 1).map(|i| (i, i + 1))),
            1 if k >= 3 => TargetGraph::cycle(k),
            2 => TargetGraph::new(k, (1..k).map(|i| (0, i))),
            _ => {
                let g = connected_gnp(rng, k, 0.5);
                TargetGraph::new(k, g.edges().map(|(u, v)| (u as usize - 1, v as usize - 1)))
            }
        }
    };
    if n_types >= 2 && rng.gen_bool(0.2) {
        let k = rng.gen_range(2..=max_order);
        let mut bodies: Vec<u32> = data.bodies().collect();
        bodies.shuffle(rng);
        bodies.truncate(k);
        let target = shape(rng, k).with_labels(bodies);
        return ProbeOperationGraph::new(vec![target], LabelMode::BodyLabeled).expect("valid target");
    }
    let count = rng.gen_range(1..=2);
    let targets = (0..count)
        .map(|_| {
            let k = rng.gen_range(2..=max_order);
            shape(rng, k)
        })
        .collect();
    ProbeOperationGraph::new(targets, LabelMode::Unlabeled).expect("valid target")
}
