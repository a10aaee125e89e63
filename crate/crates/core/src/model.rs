//! Data libraries, probe libraries and their validity rules.
//!
//! A datum `x_i = (i; F_i)` is a body id plus an ordered set of fibers. Fibers
//! carry free-form tags (an endpoint vertex, a colour name) that map
//! bijectively onto `(owner, index)` with `index ∈ 1..=p_i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type BodyId = u32;

/// A typed attachment point `x_i^ℓ`: owner body plus a 1-based fiber index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiberType {
    pub owner: BodyId,
    pub index: u32,
}

impl FiberType {
    pub fn new(owner: BodyId, index: u32) -> Self {
        Self { owner, index }
    }
}

impl fmt::Display for FiberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}^{}", self.owner, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fiber {
    pub ty: FiberType,
    pub tag: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataType {
    pub body: BodyId,
    /// Display name, e.g. `x_147` for the 2-path 4-1-7.
    pub name: Option<String>,
    pub fibers: Vec<Fiber>,
}

impl DataType {
    /// Builds a data type whose fibers are numbered `1..=tags.len()` in order.
    pub fn new<S: Into<String>>(body: BodyId, tags: impl IntoIterator<Item = S>) -> Self {
        let fibers = tags
            .into_iter()
            .enumerate()
            .map(|(k, tag)| Fiber {
                ty: FiberType::new(body, k as u32 + 1),
                tag: tag.into(),
            })
            .collect();
        Self {
            body,
            name: None,
            fibers,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn fiber_count(&self) -> usize {
        self.fibers.len()
    }

    pub fn fiber_by_tag(&self, tag: &str) -> Option<FiberType> {
        self.fibers.iter().find(|f| f.tag == tag).map(|f| f.ty)
    }

    pub fn tag(&self, index: u32) -> Option<&str> {
        self.fibers
            .iter()
            .find(|f| f.ty.index == index)
            .map(|f| f.tag.as_str())
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("x_{}", self.body))
    }
}

/// Pool size for a data or probe type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Copies {
    Finite(u64),
    #[default]
    Unbounded,
}

impl Copies {
    pub fn covers(self, requested: u64) -> bool {
        match self {
            Copies::Finite(n) => n >= requested,
            Copies::Unbounded => true,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Copies::Finite(n) => Some(n),
            Copies::Unbounded => None,
        }
    }

    pub fn plus(self, extra: Copies) -> Copies {
        match (self, extra) {
            (Copies::Finite(a), Copies::Finite(b)) => Copies::Finite(a.saturating_add(b)),
            _ => Copies::Unbounded,
        }
    }
}

impl fmt::Display for Copies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Copies::Finite(n) => write!(f, "{n}"),
            Copies::Unbounded => f.write_str("unbounded"),
        }
    }
}

// Serialized as a number or the string "unbounded".
impl Serialize for Copies {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Copies::Finite(n) => s.serialize_u64(*n),
            Copies::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Copies {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Ok(Copies::Finite(n)),
            Raw::Word(w) if w == "unbounded" => Ok(Copies::Unbounded),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "expected a copy count or \"unbounded\", got {w:?}"
            ))),
        }
    }
}

/// How bonds may share the fibers of one data instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberDiscipline {
    /// Each fiber of an instance hosts at most one bond.
    #[default]
    Exclusive,
    /// All bonds of an instance go through a single fiber, which may host any
    /// number of them.
    Committed,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DataLibrary {
    pub types: Vec<DataType>,
    pub inventory: BTreeMap<BodyId, Copies>,
    pub discipline: FiberDiscipline,
}

impl DataLibrary {
    pub fn new(types: Vec<DataType>) -> Self {
        Self {
            types,
            ..Self::default()
        }
    }

    pub fn with_discipline(mut self, discipline: FiberDiscipline) -> Self {
        self.discipline = discipline;
        self
    }

    pub fn get(&self, body: BodyId) -> Option<&DataType> {
        self.types.iter().find(|t| t.body == body)
    }

    /// Pool size for `body`; types without an inventory entry are unbounded.
    pub fn copies(&self, body: BodyId) -> Copies {
        self.inventory.get(&body).copied().unwrap_or_default()
    }

    pub fn set_copies(&mut self, body: BodyId, copies: Copies) {
        self.inventory.insert(body, copies);
    }

    pub fn bodies(&self) -> impl Iterator<Item = BodyId> + '_ {
        self.types.iter().map(|t| t.body)
    }

    /// Total fiber-type count `p = Σ p_i`.
    pub fn total_fibers(&self) -> usize {
        self.types.iter().map(DataType::fiber_count).sum()
    }

    pub fn contains_fiber(&self, fiber: FiberType) -> bool {
        self.get(fiber.owner)
            .is_some_and(|t| t.fibers.iter().any(|f| f.ty == fiber))
    }

    pub fn fiber_tag(&self, fiber: FiberType) -> Option<&str> {
        self.get(fiber.owner).and_then(|t| t.tag(fiber.index))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// Unordered: joins two fibers.
    Connective,
    /// Ordered: transmits from a source fiber to a destination fiber.
    Transitive,
}

/// A probe `τ^{x_i^ℓ x_t^m}`. Connective probes are stored with their
/// endpoints sorted, so equality and hashing are swap-invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProbeType {
    kind: ProbeKind,
    a: FiberType,
    b: FiberType,
}

impl ProbeType {
    pub fn connective(a: FiberType, b: FiberType) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Self {
            kind: ProbeKind::Connective,
            a,
            b,
        }
    }

    pub fn transitive(source: FiberType, destination: FiberType) -> Self {
        Self {
            kind: ProbeKind::Transitive,
            a: source,
            b: destination,
        }
    }

    pub fn new(kind: ProbeKind, a: FiberType, b: FiberType) -> Self {
        match kind {
            ProbeKind::Connective => Self::connective(a, b),
            ProbeKind::Transitive => Self::transitive(a, b),
        }
    }

    pub fn kind(&self) -> ProbeKind {
        self.kind
    }

    /// First fiber (the source for transitive probes).
    pub fn a(&self) -> FiberType {
        self.a
    }

    /// Second fiber (the destination for transitive probes).
    pub fn b(&self) -> FiberType {
        self.b
    }

    pub fn owners(&self) -> (BodyId, BodyId) {
        (self.a.owner, self.b.owner)
    }

    /// The fiber this probe binds on `owner`, if it touches `owner`.
    pub fn fiber_on(&self, owner: BodyId) -> Option<FiberType> {
        if self.a.owner == owner {
            Some(self.a)
        } else if self.b.owner == owner {
            Some(self.b)
        } else {
            None
        }
    }

    pub fn touches(&self, x: BodyId, y: BodyId) -> bool {
        (self.a.owner == x && self.b.owner == y) || (self.a.owner == y && self.b.owner == x)
    }
}

impl<'de> Deserialize<'de> for ProbeType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            kind: ProbeKind,
            a: FiberType,
            b: FiberType,
        }
        let raw = Raw::deserialize(d)?;
        Ok(ProbeType::new(raw.kind, raw.a, raw.b))
    }
}

impl fmt::Display for ProbeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ProbeKind::Connective => write!(f, "{}--{}", self.a, self.b),
            ProbeKind::Transitive => write!(f, "{}->{}", self.a, self.b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeLibrary {
    pub kind: ProbeKind,
    probes: Vec<ProbeType>,
    index: BTreeSet<ProbeType>,
    pub inventory: BTreeMap<ProbeType, Copies>,
}

impl ProbeLibrary {
    pub fn new(kind: ProbeKind) -> Self {
        Self {
            kind,
            probes: Vec::new(),
            index: BTreeSet::new(),
            inventory: BTreeMap::new(),
        }
    }

    /// Adds a probe type. Re-inserting an existing type leaves the type set
    /// unchanged and accumulates the copy count.
    pub fn insert(&mut self, probe: ProbeType, copies: Copies) {
        if self.index.insert(probe) {
            self.probes.push(probe);
            self.inventory.insert(probe, copies);
        } else {
            let entry = self.inventory.entry(probe).or_insert(Copies::Finite(0));
            *entry = entry.plus(copies);
        }
    }

    pub fn probes(&self) -> &[ProbeType] {
        &self.probes
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    pub fn contains(&self, probe: &ProbeType) -> bool {
        self.index.contains(probe)
    }

    pub fn copies(&self, probe: &ProbeType) -> Copies {
        self.inventory.get(probe).copied().unwrap_or_default()
    }

    /// Number of non-empty sub-libraries `Y_it`.
    pub fn sublibrary_count(&self) -> usize {
        let keys: BTreeSet<(BodyId, BodyId)> = self
            .probes
            .iter()
            .map(|p| match self.kind {
                ProbeKind::Connective => {
                    let (x, y) = p.owners();
                    (x.min(y), x.max(y))
                }
                ProbeKind::Transitive => p.owners(),
            })
            .collect();
        keys.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate data body {0}")]
    DuplicateBody(BodyId),
    #[error("data type {0} has no fibers")]
    EmptyFiberSet(BodyId),
    #[error("fiber {fiber} listed under data type {body}")]
    ForeignFiber { body: BodyId, fiber: FiberType },
    #[error("data type {body}: fiber indices must be 1..={count} in order, found {fiber}")]
    BadFiberIndex {
        body: BodyId,
        fiber: FiberType,
        count: usize,
    },
    #[error("data type {body}: duplicate fiber tag {tag:?}")]
    DuplicateTag { body: BodyId, tag: String },
    #[error("probe {0} joins two fibers of the same datum")]
    IntraDataProbe(ProbeType),
    #[error("probe {probe} references unknown fiber {fiber}")]
    UnknownFiber { probe: ProbeType, fiber: FiberType },
    #[error("probe {probe} is {found:?} but the library is {expected:?}")]
    KindMismatch {
        probe: ProbeType,
        expected: ProbeKind,
        found: ProbeKind,
    },
    #[error("{count} probe types exceed the bound {bound}")]
    BoundExceeded { count: usize, bound: u64 },
    #[error("sub-library requested for a single body {0}")]
    SameBody(BodyId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DataLibraryReport {
    /// Number of data types.
    pub n: usize,
    /// Number of fiber types.
    pub p: usize,
    /// `(body, p_i)` in library order.
    pub fiber_counts: Vec<(BodyId, usize)>,
    /// Matrix view: column `i` lists the fibers of the i-th data type.
    pub matrix: Vec<Vec<FiberType>>,
}

impl DataLibraryReport {
    pub fn column_heights(&self) -> Vec<usize> {
        self.fiber_counts.iter().map(|&(_, c)| c).collect()
    }
}

pub fn validate_data_library(lib: &DataLibrary) -> Result<DataLibraryReport, ModelError> {
    let mut seen = BTreeSet::new();
    for ty in &lib.types {
        if !seen.insert(ty.body) {
            return Err(ModelError::DuplicateBody(ty.body));
        }
        if ty.fibers.is_empty() {
            return Err(ModelError::EmptyFiberSet(ty.body));
        }
        let mut tags = BTreeSet::new();
        for (k, fiber) in ty.fibers.iter().enumerate() {
            if fiber.ty.owner != ty.body {
                return Err(ModelError::ForeignFiber {
                    body: ty.body,
                    fiber: fiber.ty,
                });
            }
            if fiber.ty.index != k as u32 + 1 {
                return Err(ModelError::BadFiberIndex {
                    body: ty.body,
                    fiber: fiber.ty,
                    count: ty.fibers.len(),
                });
            }
            if !tags.insert(fiber.tag.as_str()) {
                return Err(ModelError::DuplicateTag {
                    body: ty.body,
                    tag: fiber.tag.clone(),
                });
            }
        }
    }
    Ok(DataLibraryReport {
        n: lib.types.len(),
        p: lib.total_fibers(),
        fiber_counts: lib
            .types
            .iter()
            .map(|t| (t.body, t.fiber_count()))
            .collect(),
        matrix: lib
            .types
            .iter()
            .map(|t| t.fibers.iter().map(|f| f.ty).collect())
            .collect(),
    })
}

/// Upper bound on the number of probe types: the edge count of the complete
/// multipartite graph `K_{p_1..p_n}` (connective) or its arc count
/// (transitive).
pub fn max_probe_count(lib: &DataLibrary, kind: ProbeKind) -> u64 {
    let p = lib.total_fibers() as u64;
    let squares: u64 = lib
        .types
        .iter()
        .map(|t| (t.fiber_count() as u64).pow(2))
        .sum();
    let arcs = p * p - squares;
    match kind {
        ProbeKind::Connective => arcs / 2,
        ProbeKind::Transitive => arcs,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeLibraryReport {
    pub kind: ProbeKind,
    pub probe_types: usize,
    pub bound: u64,
    pub sublibraries: usize,
}

pub fn validate_probe_library(
    data: &DataLibrary,
    probes: &ProbeLibrary,
) -> Result<ProbeLibraryReport, ModelError> {
    for probe in probes.probes() {
        if probe.kind() != probes.kind {
            return Err(ModelError::KindMismatch {
                probe: *probe,
                expected: probes.kind,
                found: probe.kind(),
            });
        }
        if probe.a().owner == probe.b().owner {
            return Err(ModelError::IntraDataProbe(*probe));
        }
        for fiber in [probe.a(), probe.b()] {
            if !data.contains_fiber(fiber) {
                return Err(ModelError::UnknownFiber {
                    probe: *probe,
                    fiber,
                });
            }
        }
    }
    let bound = max_probe_count(data, probes.kind);
    if probes.len() as u64 > bound {
        return Err(ModelError::BoundExceeded {
            count: probes.len(),
            bound,
        });
    }
    Ok(ProbeLibraryReport {
        kind: probes.kind,
        probe_types: probes.len(),
        bound,
        sublibraries: probes.sublibrary_count(),
    })
}

/// The `(i, t)` sub-library `Y_it`. Connective sub-libraries are symmetric;
/// transitive ones hold the probes whose source lies on `i` and destination on
/// `t`.
pub fn sublibrary(
    probes: &ProbeLibrary,
    i: BodyId,
    t: BodyId,
) -> Result<Vec<ProbeType>, ModelError> {
    if i == t {
        return Err(ModelError::SameBody(i));
    }
    Ok(probes
        .probes()
        .iter()
        .filter(|p| match probes.kind {
            ProbeKind::Connective => p.touches(i, t),
            ProbeKind::Transitive => p.owners() == (i, t),
        })
        .copied()
        .collect())
}
