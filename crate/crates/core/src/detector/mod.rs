//! The detector: classifies the platform's output into the true-solution
//! store `Q` and the residue collector `C`, and recycles residues.
//!
//! The count comparison is only a prefilter; isomorphism to one of the
//! acceptance targets decides truth.

pub mod isomorphism;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::aggregation::Aggregation;
use crate::model::{BodyId, Copies, DataLibrary};
use isomorphism::{is_isomorphic, SimpleGraph};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    #[default]
    Unlabeled,
    /// Target vertices carry body ids; instance `x_i` must map to slot `i`.
    BodyLabeled,
}

/// One acceptance topology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetGraph {
    graph: SimpleGraph,
    labels: Option<Vec<BodyId>>,
}

impl TargetGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self {
            graph: SimpleGraph::new(n, edges),
            labels: None,
        }
    }

    pub fn cycle(k: usize) -> Self {
        Self::new(k, (0..k).map(|v| (v, (v + 1) % k)))
    }

    pub fn with_labels(mut self, labels: Vec<BodyId>) -> Self {
        assert_eq!(labels.len(), self.graph.n(), "one label per target vertex");
        self.labels = Some(labels);
        self
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn labels(&self) -> Option<&[BodyId]> {
        self.labels.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.n()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TargetError {
    #[error("acceptance set is empty")]
    Empty,
    #[error("target {0} is not connected")]
    Disconnected(usize),
    #[error("target {0} has no vertices")]
    NoVertices(usize),
    #[error("target {0} lacks body labels required by labeled mode")]
    MissingLabels(usize),
}

/// `G^(X',Y')`: the set of topologies a true solution may take.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeOperationGraph {
    targets: Vec<TargetGraph>,
    mode: LabelMode,
}

impl ProbeOperationGraph {
    pub fn new(targets: Vec<TargetGraph>, mode: LabelMode) -> Result<Self, TargetError> {
        if targets.is_empty() {
            return Err(TargetError::Empty);
        }
        for (k, t) in targets.iter().enumerate() {
            if t.vertex_count() == 0 {
                return Err(TargetError::NoVertices(k));
            }
            if !t.graph.is_connected() {
                return Err(TargetError::Disconnected(k));
            }
            if mode == LabelMode::BodyLabeled && t.labels.is_none() {
                return Err(TargetError::MissingLabels(k));
            }
        }
        Ok(Self { targets, mode })
    }

    pub fn single(target: TargetGraph) -> Result<Self, TargetError> {
        let mode = if target.labels.is_some() {
            LabelMode::BodyLabeled
        } else {
            LabelMode::Unlabeled
        };
        Self::new(vec![target], mode)
    }

    /// Unlabeled cycles of every order in `orders`.
    pub fn cycles(orders: impl IntoIterator<Item = usize>) -> Result<Self, TargetError> {
        Self::new(
            orders.into_iter().map(TargetGraph::cycle).collect(),
            LabelMode::Unlabeled,
        )
    }

    pub fn targets(&self) -> &[TargetGraph] {
        &self.targets
    }

    pub fn mode(&self) -> LabelMode {
        self.mode
    }

    /// Platform threshold: the largest target order.
    pub fn threshold(&self) -> usize {
        self.targets
            .iter()
            .map(TargetGraph::vertex_count)
            .max()
            .unwrap_or(1)
    }
}

/// Count check: passes iff some target has the aggregation's order and bond
/// count.
pub fn prefilter(m: &Aggregation, target: &ProbeOperationGraph) -> bool {
    target
        .targets
        .iter()
        .any(|t| t.vertex_count() == m.order() && t.edge_count() == m.bond_count())
}

pub fn is_true_solution(m: &Aggregation, target: &ProbeOperationGraph) -> bool {
    let host = SimpleGraph::from_adjacency(m.adjacency());
    let host_labels: Vec<BodyId> = m.members().iter().map(|x| x.body).collect();
    target.targets.iter().any(|t| {
        if t.vertex_count() != m.order() || t.edge_count() != host.edge_count() {
            return false;
        }
        match (target.mode, t.labels()) {
            (LabelMode::BodyLabeled, Some(labels)) => {
                is_isomorphic(&t.graph, &host, Some((labels, &host_labels)))
            }
            _ => is_isomorphic(&t.graph, &host, None),
        }
    })
}

/// `Q` and `C`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolutionStore {
    pub accepted: Vec<Aggregation>,
    pub residues: Vec<Aggregation>,
}

impl SolutionStore {
    pub fn len(&self) -> usize {
        self.accepted.len() + self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Moves accepted aggregations failing `keep` into the residue collector,
    /// returning how many were moved.
    pub fn demote<F: FnMut(&Aggregation) -> bool>(&mut self, mut keep: F) -> usize {
        let (kept, dropped): (Vec<_>, Vec<_>) =
            std::mem::take(&mut self.accepted).into_iter().partition(|m| keep(m));
        let moved = dropped.len();
        self.accepted = kept;
        self.residues.extend(dropped);
        moved
    }

    pub fn accepted_json(&self, data: &DataLibrary) -> serde_json::Value {
        serde_json::Value::Array(self.accepted.iter().map(|m| m.to_json(data)).collect())
    }

    pub fn accepted_dot(&self, data: &DataLibrary) -> String {
        self.accepted
            .iter()
            .enumerate()
            .map(|(k, m)| m.to_dot(data, &format!("Q{k}")))
            .collect()
    }
}

pub fn separate(theta: Vec<Aggregation>, target: &ProbeOperationGraph) -> SolutionStore {
    let mut store = SolutionStore::default();
    for m in theta {
        if prefilter(&m, target) && is_true_solution(&m, target) {
            store.accepted.push(m);
        } else {
            store.residues.push(m);
        }
    }
    store
}

/// Data returned to the pools by the residue collector. Probe copies held in
/// residue bonds are consumed, not refunded.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RefundReport {
    pub data: BTreeMap<BodyId, u64>,
    pub probes_discarded: u64,
}

impl RefundReport {
    pub fn total_data(&self) -> u64 {
        self.data.values().sum()
    }

    /// Adds the refunds to finite pool sizes of `lib`.
    pub fn apply(&self, lib: &mut DataLibrary) {
        for (&body, &count) in &self.data {
            let current = lib.copies(body);
            lib.set_copies(body, current.plus(Copies::Finite(count)));
        }
    }
}

pub fn recycle(store: &SolutionStore) -> RefundReport {
    let mut report = RefundReport::default();
    for residue in &store.residues {
        for m in residue.members() {
            *report.data.entry(m.body).or_default() += 1;
        }
        report.probes_discarded += residue.bond_count() as u64;
    }
    report
}
