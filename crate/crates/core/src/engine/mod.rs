//! The computing platform: aggregation formation by basic probe operations
//! under high cohesiveness, the order threshold and per-aggregation
//! uniqueness.
//!
//! Two modes share these rules. [`enumerate_exhaustive`] is the idealized
//! unlimited-copy platform and returns every distinct aggregation shaped like
//! an acceptance target. [`PlatformState`] is a finite, seeded simulation.

mod exhaustive;
mod platform;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregation::{Endpoint, InstanceId};
use crate::model::{BodyId, ProbeType};

pub use exhaustive::enumerate_exhaustive;
pub use platform::{AuditReport, LoadRequest, PlatformState, StepRecord};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Exhaustive,
    Stochastic,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "stochastic" => Ok(Mode::Stochastic),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub mode: Mode,
    pub seed: u64,
    pub max_steps: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Exhaustive,
            seed: 0,
            max_steps: u64::MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("pool for {what} holds {available}, requested {requested}")]
    InsufficientInventory {
        what: String,
        requested: u64,
        available: u64,
    },
    #[error("{0} is not in the loaded libraries")]
    UnknownType(String),
    #[error("merging orders {left} and {right} exceeds threshold {threshold}")]
    ThresholdViolation {
        left: usize,
        right: usize,
        threshold: usize,
    },
    #[error("operation would duplicate data type {0} or a bonded pair")]
    UniquenessViolation(BodyId),
    #[error("endpoint {endpoint:?} does not match probe {probe}")]
    FiberMismatch {
        probe: ProbeType,
        endpoint: Endpoint,
    },
    #[error("fiber {0:?} is not available")]
    FiberOccupied(Endpoint),
    #[error("no free copy of probe {0}")]
    NoFreeProbe(ProbeType),
    #[error("no legal target for probe {0}")]
    NoLegalTarget(ProbeType),
    #[error("unknown data instance {0}")]
    UnknownInstance(InstanceId),
}
