//! Discrete complex analysis on embedded bipartite quad-graphs.

pub mod backlund;
pub mod calculus;
pub mod error;
pub mod global;
pub mod holomorphy;
pub mod linalg;
pub mod mesh;
pub mod render;

pub use error::{Error, Result};
pub use mesh::{Quad, QuadMesh, Vertex, VertexClass, VertexId};
