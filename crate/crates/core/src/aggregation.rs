//! Aggregations: connected assemblies of data instances joined by bonds.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::model::{BodyId, DataLibrary, FiberDiscipline, FiberType, ProbeKind, ProbeType};

pub type InstanceId = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Member {
    pub instance: InstanceId,
    pub body: BodyId,
}

/// One side of a bond: a fiber on a specific data instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Endpoint {
    pub instance: InstanceId,
    pub fiber: FiberType,
}

/// An applied probe. For transitive probes `a` is the source endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Bond {
    pub probe: ProbeType,
    pub a: Endpoint,
    pub b: Endpoint,
}

/// Identity of an aggregation up to instance ids: member bodies plus the
/// lexicographically sorted `(body, fiber, body, fiber)` bond tuples.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CanonicalForm {
    pub bodies: Vec<BodyId>,
    pub bonds: Vec<(BodyId, u32, BodyId, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InvariantViolation {
    #[error("bond references instance {0} which is not a member")]
    DanglingBond(InstanceId),
    #[error("aggregation is not connected")]
    Disconnected,
    #[error("data type {0} appears more than once")]
    DuplicateType(BodyId),
    #[error("instances {0} and {1} are joined by more than one bond")]
    DuplicatePairBond(InstanceId, InstanceId),
    #[error("fiber {fiber} of instance {instance} is used by more than one bond")]
    FiberOverused {
        instance: InstanceId,
        fiber: FiberType,
    },
    #[error("instance {0} bonds through more than one fiber")]
    MixedFibers(InstanceId),
    #[error("order {order} exceeds threshold {threshold}")]
    OverThreshold { order: usize, threshold: usize },
    #[error("bond fiber does not match its probe")]
    FiberMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Aggregation {
    members: Vec<Member>,
    bonds: Vec<Bond>,
}

impl Aggregation {
    pub fn new(mut members: Vec<Member>, mut bonds: Vec<Bond>) -> Self {
        members.sort();
        bonds.sort();
        Self { members, bonds }
    }

    pub fn single(member: Member) -> Self {
        Self {
            members: vec![member],
            bonds: Vec::new(),
        }
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    /// `|M|`, the number of data instances.
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn body_of(&self, instance: InstanceId) -> Option<BodyId> {
        self.members
            .iter()
            .find(|m| m.instance == instance)
            .map(|m| m.body)
    }

    pub fn bodies(&self) -> Vec<BodyId> {
        let mut out: Vec<_> = self.members.iter().map(|m| m.body).collect();
        out.sort_unstable();
        out
    }

    pub fn member_index(&self, instance: InstanceId) -> Option<usize> {
        self.members.iter().position(|m| m.instance == instance)
    }

    /// Underlying simple graph over member indices (bond directions dropped).
    pub fn adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.members.len()];
        for bond in &self.bonds {
            if let (Some(x), Some(y)) = (
                self.member_index(bond.a.instance),
                self.member_index(bond.b.instance),
            ) {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        adj
    }

    /// Fibers through which `instance` is bonded, with multiplicity.
    pub fn fibers_used(&self, instance: InstanceId) -> Vec<FiberType> {
        self.bonds
            .iter()
            .flat_map(|b| [b.a, b.b])
            .filter(|e| e.instance == instance)
            .map(|e| e.fiber)
            .collect()
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        let mut bonds: Vec<_> = self
            .bonds
            .iter()
            .map(|b| {
                let x = (b.a.fiber.owner, b.a.fiber.index);
                let y = (b.b.fiber.owner, b.b.fiber.index);
                let (x, y) = match b.probe.kind() {
                    ProbeKind::Connective if y < x => (y, x),
                    _ => (x, y),
                };
                (x.0, x.1, y.0, y.1)
            })
            .collect();
        bonds.sort_unstable();
        CanonicalForm {
            bodies: self.bodies(),
            bonds,
        }
    }

    /// Checks the structural rules every platform aggregation obeys:
    /// connectivity, one datum per type, one bond per pair, probe/fiber
    /// consistency and the fiber discipline.
    pub fn check(&self, discipline: FiberDiscipline) -> Result<(), InvariantViolation> {
        let mut types = BTreeSet::new();
        for m in &self.members {
            if !types.insert(m.body) {
                return Err(InvariantViolation::DuplicateType(m.body));
            }
        }
        let mut pairs = BTreeSet::new();
        let mut usage: BTreeMap<InstanceId, BTreeMap<FiberType, usize>> = BTreeMap::new();
        for bond in &self.bonds {
            for e in [bond.a, bond.b] {
                match self.body_of(e.instance) {
                    None => return Err(InvariantViolation::DanglingBond(e.instance)),
                    Some(body) if body != e.fiber.owner => {
                        return Err(InvariantViolation::FiberMismatch)
                    }
                    Some(_) => {}
                }
                *usage.entry(e.instance).or_default().entry(e.fiber).or_default() += 1;
            }
            let matches = match bond.probe.kind() {
                ProbeKind::Connective => {
                    ProbeType::connective(bond.a.fiber, bond.b.fiber) == bond.probe
                }
                ProbeKind::Transitive => {
                    bond.probe.a() == bond.a.fiber && bond.probe.b() == bond.b.fiber
                }
            };
            if !matches {
                return Err(InvariantViolation::FiberMismatch);
            }
            let pair = (
                bond.a.instance.min(bond.b.instance),
                bond.a.instance.max(bond.b.instance),
            );
            if !pairs.insert(pair) {
                return Err(InvariantViolation::DuplicatePairBond(pair.0, pair.1));
            }
        }
        for (&instance, fibers) in &usage {
            match discipline {
                FiberDiscipline::Exclusive => {
                    if let Some((&fiber, _)) = fibers.iter().find(|(_, &c)| c > 1) {
                        return Err(InvariantViolation::FiberOverused { instance, fiber });
                    }
                }
                FiberDiscipline::Committed => {
                    if fibers.len() > 1 {
                        return Err(InvariantViolation::MixedFibers(instance));
                    }
                }
            }
        }
        if !self.is_connected() {
            return Err(InvariantViolation::Disconnected);
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        if self.members.is_empty() {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; adj.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// JSON export: `{members: [{body, instance}], bonds: [[body, fiber, body, fiber]]}`
    /// with fibers written as their library tags.
    pub fn to_json(&self, data: &DataLibrary) -> serde_json::Value {
        let tag = |f: FiberType| {
            data.fiber_tag(f)
                .map(str::to_owned)
                .unwrap_or_else(|| f.index.to_string())
        };
        serde_json::json!({
            "members": self.members.iter().map(|m| serde_json::json!({
                "body": m.body,
                "instance": m.instance,
            })).collect::<Vec<_>>(),
            "bonds": self.bonds.iter().map(|b| serde_json::json!([
                b.a.fiber.owner, tag(b.a.fiber), b.b.fiber.owner, tag(b.b.fiber)
            ])).collect::<Vec<_>>(),
        })
    }

    /// Graphviz rendering with data bodies as node labels.
    pub fn to_dot(&self, data: &DataLibrary, name: &str) -> String {
        let directed = self
            .bonds
            .first()
            .is_some_and(|b| b.probe.kind() == ProbeKind::Transitive);
        let (keyword, arrow) = if directed { ("digraph", "->") } else { ("graph", "--") };
        let mut out = format!("{keyword} {name} {{\n");
        for m in &self.members {
            let label = data
                .get(m.body)
                .map(|t| t.display_name())
                .unwrap_or_else(|| format!("x_{}", m.body));
            out.push_str(&format!("  i{} [label=\"{}\"];\n", m.instance, label));
        }
        for b in &self.bonds {
            let label = format!(
                "{}/{}",
                data.fiber_tag(b.a.fiber).unwrap_or("?"),
                data.fiber_tag(b.b.fiber).unwrap_or("?")
            );
            out.push_str(&format!(
                "  i{} {arrow} i{} [label=\"{}\"];\n",
                b.a.instance, b.b.instance, label
            ));
        }
        out.push_str("}\n");
        out
    }
}
