//! Assur decomposition of pinned bar-and-joint frameworks.
//!
//! A pinned graph is split into its Assur components three ways: strongly
//! connected components of a d-directed orientation, diagonal blocks of the
//! pinned rigidity matrix, and minimal pinned isostatic subgraphs. On top of
//! the decomposition sit the necessary counts, strong Assur and driver
//! classification, and drive-velocity propagation.

pub mod assur;
pub mod corpus;
pub mod counts;
pub mod decomposition;
pub mod error;
pub mod field;
pub mod generate;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod orientation;
pub mod report;
pub mod rigidity;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, Orientation, PinnedGraph, VertexId};
