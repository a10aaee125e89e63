//! Executable probe machine: data and probe libraries, an aggregation
//! platform, an isomorphism-based detector, and encoders that turn
//! Hamilton-cycle and graph-coloring instances into probe-machine runs.

pub mod aggregation;
pub mod detector;
pub mod encoders;
pub mod engine;
pub mod fixtures;
pub mod graph;
pub mod instance;
pub mod model;
pub mod oracles;
pub mod solve;

pub use aggregation::{Aggregation, CanonicalForm};
pub use detector::{LabelMode, ProbeOperationGraph, SolutionStore, TargetGraph};
pub use engine::{enumerate_exhaustive, EngineConfig, Mode, PlatformState};
pub use graph::InputGraph;
pub use model::{DataLibrary, DataType, FiberDiscipline, FiberType, ProbeKind, ProbeLibrary, ProbeType};
