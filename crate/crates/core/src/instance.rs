//! The instance file: a data library and a probe library as JSON.
//!
//! ```json
//! {
//!   "fiber_discipline": "exclusive",
//!   "data_types": [{"body": 1, "name": "x_1", "fibers": ["r", "y"], "copies": 10}],
//!   "probes": [{"kind": "connective", "a": [1, "r"], "b": [2, "y"], "copies": "unbounded"}]
//! }
//! ```
//!
//! Fibers are referenced by tag. `copies` is a count or `"unbounded"`
//! (the default when omitted).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_data_library, validate_probe_library, BodyId, Copies, DataLibrary, DataType,
    FiberDiscipline, FiberType, ModelError, ProbeKind, ProbeLibrary, ProbeType,
};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("probe references fiber {tag:?} of data type {body}, which does not exist")]
    UnknownTag { body: BodyId, tag: String },
    #[error("probe library mixes connective and transitive probes")]
    MixedKinds,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Serialize, Deserialize)]
struct Doc {
    #[serde(default)]
    fiber_discipline: FiberDiscipline,
    data_types: Vec<DataDoc>,
    #[serde(default)]
    probes: Vec<ProbeDoc>,
}

#[derive(Serialize, Deserialize)]
struct DataDoc {
    body: BodyId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    fibers: Vec<String>,
    #[serde(default)]
    copies: Copies,
}

#[derive(Serialize, Deserialize)]
struct ProbeDoc {
    kind: ProbeKind,
    a: (BodyId, String),
    b: (BodyId, String),
    #[serde(default)]
    copies: Copies,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub data: DataLibrary,
    pub probes: ProbeLibrary,
}

impl Instance {
    pub fn new(data: DataLibrary, probes: ProbeLibrary) -> Self {
        Self { data, probes }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let tag = |f: FiberType| self.data.fiber_tag(f).unwrap_or_default().to_owned();
        let doc = Doc {
            fiber_discipline: self.data.discipline,
            data_types: self
                .data
                .types
                .iter()
                .map(|t| DataDoc {
                    body: t.body,
                    name: t.name.clone(),
                    fibers: t.fibers.iter().map(|f| f.tag.clone()).collect(),
                    copies: self.data.copies(t.body),
                })
                .collect(),
            probes: self
                .probes
                .probes()
                .iter()
                .map(|p| ProbeDoc {
                    kind: p.kind(),
                    a: (p.a().owner, tag(p.a())),
                    b: (p.b().owner, tag(p.b())),
                    copies: self.probes.copies(p),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("instance documents serialize")
    }

    /// Parses and validates an instance document.
    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let doc: Doc = serde_json::from_str(text)?;
        let mut data = DataLibrary::new(
            doc.data_types
                .iter()
                .map(|d| {
                    let t = DataType::new(d.body, d.fibers.iter().cloned());
                    match &d.name {
                        Some(name) => t.with_name(name.clone()),
                        None => t,
                    }
                })
                .collect(),
        )
        .with_discipline(doc.fiber_discipline);
        for d in &doc.data_types {
            data.set_copies(d.body, d.copies);
        }
        validate_data_library(&data)?;
        let kind = doc.probes.first().map_or(ProbeKind::Connective, |p| p.kind);
        let mut probes = ProbeLibrary::new(kind);
        let resolve = |(body, tag): &(BodyId, String)| {
            data.get(*body)
                .and_then(|t| t.fiber_by_tag(tag))
                .ok_or_else(|| InstanceError::UnknownTag {
                    body: *body,
                    tag: tag.clone(),
                })
        };
        for p in &doc.probes {
            if p.kind != kind {
                return Err(InstanceError::MixedKinds);
            }
            let (a, b) = (resolve(&p.a)?, resolve(&p.b)?);
            probes.insert(ProbeType::new(p.kind, a, b), p.copies);
        }
        validate_probe_library(&data, &probes)?;
        Ok(Self { data, probes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_example() {
        let text = r#"{
            "fiber_discipline": "exclusive",
            "data_types": [
                {"body": 1, "name": "x_1", "fibers": ["r", "y"], "copies": 10},
                {"body": 2, "fibers": ["y"]}
            ],
            "probes": [{"kind": "connective", "a": [1, "r"], "b": [2, "y"], "copies": "unbounded"}]
        }"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.data.copies(1), Copies::Finite(10));
        assert_eq!(inst.data.copies(2), Copies::Unbounded);
        assert_eq!(inst.probes.len(), 1);
        let back = Instance::from_json(&inst.to_json().to_string()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn rejects_bad_references() {
        let unknown = r#"{"data_types": [{"body": 1, "fibers": ["a"]}, {"body": 2, "fibers": ["b"]}],
            "probes": [{"kind": "connective", "a": [1, "a"], "b": [2, "zz"]}]}"#;
        assert!(matches!(
            Instance::from_json(unknown),
            Err(InstanceError::UnknownTag { body: 2, .. })
        ));
        let intra = r#"{"data_types": [{"body": 1, "fibers": ["a", "b"]}],
            "probes": [{"kind": "transitive", "a": [1, "a"], "b": [1, "b"]}]}"#;
        assert!(matches!(
            Instance::from_json(intra),
            Err(InstanceError::Model(ModelError::IntraDataProbe(_)))
        ));
        let dup = r#"{"data_types": [{"body": 1, "fibers": ["a"]}, {"body": 1, "fibers": ["b"]}]}"#;
        assert!(matches!(
            Instance::from_json(dup),
            Err(InstanceError::Model(ModelError::DuplicateBody(1)))
        ));
    }
}
