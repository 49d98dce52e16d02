use thiserror::Error;

use crate::graph::{EdgeId, VertexId, Violation};
use crate::orientation::Infeasible;

/// Errors raised by graph, matrix and analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(VertexId),
    #[error("unknown edge `{0}`")]
    UnknownEdge(EdgeId),
    #[error("expected {expected} anchors, got {got}")]
    WrongAnchorCount { expected: usize, got: usize },
    #[error("anchor `{0}` is not usable as a pinned anchor")]
    BadAnchor(VertexId),
    #[error("orientation does not match graph: {0}")]
    OrientationMismatch(String),
    #[error("orientations are over different graphs: {0}")]
    GraphMismatch(String),
    #[error("orientations are not equivalent (out-degrees differ at `{0}`)")]
    NotEquivalent(VertexId),
    #[error("instance too large for exhaustive search: {size} > cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },
    #[error("orientation is not d-directed at `{0}`")]
    NotDDirected(VertexId),
    #[error("configuration has no coordinates for `{0}`")]
    MissingCoordinates(VertexId),
    #[error("coordinates of `{vertex}` have length {got}, expected {expected}")]
    CoordinateDimension {
        vertex: VertexId,
        expected: usize,
        got: usize,
    },
    #[error("decomposition does not match graph: {0}")]
    DecompositionMismatch(String),
    #[error("operation requires dimension {expected}, graph has dimension {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("necessary subgraph counts fail ({0} violations)")]
    CountsFailed(usize),
    #[error("graph is not pinned isostatic")]
    NotIsostatic,
    #[error("singular configuration: {0}")]
    SingularConfiguration(String),
    #[error("driver edge `{0}` is not in a bottom component")]
    NotBottomComponent(EdgeId),
    #[error("graph failed validation: {0:?}")]
    ValidationFailed(Vec<Violation>),
    #[error(transparent)]
    Infeasible(#[from] Infeasible),
    #[error("unknown corpus instance `{0}`")]
    UnknownInstance(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// Two routes that must agree did not. Always an implementation bug.
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
