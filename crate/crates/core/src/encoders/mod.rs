//! Compilers from graph problems to probe-machine instances, and decoders
//! that map accepted aggregations back to cycles and colorings.

mod coloring;
mod cover;
mod hamilton;

use thiserror::Error;

use crate::graph::Vertex;
use crate::model::BodyId;
use crate::oracles::SizeLimitExceeded;

pub use coloring::{
    color_name, decode_coloring, encode_coloring, fixed_classes, ColorCandidateTable,
    ColoringEncoding, FixedClasses, FIXED_CLASS_LIMIT,
};
pub use cover::{is_vertex_cover, min_vertex_cover, min_vertex_cover_with_limit, VertexCover, EXACT_COVER_LIMIT};
pub use hamilton::{decode_hamilton, encode_hamilton, HamiltonEncoding, TwoPath, MIN_HAMILTON_VERTICES};

/// Reasons an instance cannot be compiled. All of them mean the instance is
/// infeasible or malformed rather than that the machine failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("graph has {n} vertices; the encoding needs at least {min}")]
    GraphTooSmall { n: usize, min: usize },
    #[error("cover vertex {0} has fewer than two neighbours")]
    NoTwoPaths(Vertex),
    #[error("edge ({0}, {1}) is not covered")]
    NotACover(Vertex, Vertex),
    #[error("cover has {cover} vertices but a Hamilton cycle needs at least {needed}")]
    CoverTooSmall { cover: usize, needed: usize },
    #[error("vertex {0} has no candidate colour")]
    EmptyCandidateSet(Vertex),
    #[error("candidate table does not match the graph: {0}")]
    TableMismatch(String),
    #[error("graph has no proper {k}-coloring")]
    Uncolorable { k: u32 },
    #[error("coloring graph must be connected with at least two vertices")]
    Disconnected,
    #[error(transparent)]
    SizeLimitExceeded(#[from] SizeLimitExceeded),
}

/// Reasons an aggregation does not decode to a valid answer. On an
/// aggregation accepted by the detector these point at a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("data type {0} is not part of this encoding")]
    UnknownDatum(BodyId),
    #[error("edge ({0}, {1}) is not in the graph")]
    EdgeNotInGraph(Vertex, Vertex),
    #[error("covers {covered} of {n} vertices")]
    NotSpanning { covered: usize, n: usize },
    #[error("edge union is not a single cycle")]
    NotACycle,
    #[error("adjacent vertices {0} and {1} share a colour")]
    ImproperColoring(Vertex, Vertex),
    #[error("colour of vertex {0} is not determined by its bonds")]
    AmbiguousColor(Vertex),
    #[error("vertex {0} has no datum in the aggregation")]
    MissingVertex(Vertex),
}
