use thiserror::Error;

use crate::mesh::VertexId;

/// Failures raised by mesh construction and the numerical operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    BadParams(String),

    #[error("degenerate quad {quad}: {reason}")]
    DegenerateQuad { quad: usize, reason: &'static str },

    #[error("function support does not cover the requested carrier: {0}")]
    SupportMismatch(String),

    #[error("path is broken between {from:?} and {to:?}")]
    BrokenPath { from: VertexId, to: VertexId },

    #[error("Morera equation violated on quad {quad} (residual {residual:.3e})")]
    MoreraViolation { quad: usize, residual: f64 },

    #[error("function is not linear holomorphic (residual {residual:.3e})")]
    NotHolomorphic { residual: f64 },

    #[error("function is not harmonic: conjugate is path dependent (residual {residual:.3e})")]
    NotHarmonic { residual: f64 },

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("Laplacian weight on quad {quad} is not real positive: {rho}")]
    NonPositiveWeights { quad: usize, rho: num_complex::Complex64 },

    #[error("mesh is not critical (max edge length deviation {deviation:.3e})")]
    NotCritical { deviation: f64 },

    #[error("exponential has a pole on edge {from:?} -> {to:?}")]
    PoleAtEdge { from: VertexId, to: VertexId },

    #[error("spectral parameter coincides with edge {from:?} -> {to:?}")]
    LambdaOnEdge { from: VertexId, to: VertexId },

    #[error("degenerate fractional step on edge {from:?} -> {to:?}")]
    DegenerateStep { from: VertexId, to: VertexId },

    #[error("propagation is not closed (residual {residual:.3e})")]
    InconsistentPropagation { residual: f64 },

    #[error("numerical rank {found} differs from expected {expected}; singular values {singular_values:?}")]
    RankDeficiency {
        expected: usize,
        found: usize,
        singular_values: Vec<f64>,
    },

    #[error("contour is not closed")]
    ContourNotClosed,

    #[error("source vertex {0:?} lies on the contour")]
    SourceOnContour(VertexId),

    #[error("iterative solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
