use num_complex::Complex64;
use serde::Serialize;

use super::{QuadMesh, VertexClass, VertexId};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Violation {
    RepeatedCorner { quad: usize },
    ClassMismatch { quad: usize, vertex: VertexId, expected: VertexClass },
    NonManifoldEdge { edge: usize, quads: usize },
    InconsistentOrientation { edge: usize },
    OpenEdgeOnClosedMesh { edge: usize },
    DegenerateQuad { quad: usize },
    NonPositiveArea { quad: usize, area: f64 },
    NonDirectRho { quad: usize, rho: [f64; 2] },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the structural and geometric invariants of a mesh.
pub fn validate(mesh: &QuadMesh) -> ValidationReport {
    let mut out = Vec::new();
    let expected = [
        VertexClass::Gamma,
        VertexClass::GammaStar,
        VertexClass::Gamma,
        VertexClass::GammaStar,
    ];
    for (qi, q) in mesh.quads().iter().enumerate() {
        let c = q.corners();
        let repeated = (0..4).any(|a| (a + 1..4).any(|b| c[a] == c[b]));
        if repeated && !mesh.is_periodic() {
            out.push(Violation::RepeatedCorner { quad: qi });
        } else if repeated {
            // on a torus a vertex may appear twice only as distinct lifts
            let lifts_distinct = (0..4).all(|a| {
                (a + 1..4).all(|b| c[a] != c[b] || mesh.corner_shift(qi, a) != mesh.corner_shift(qi, b))
            });
            if !lifts_distinct {
                out.push(Violation::RepeatedCorner { quad: qi });
            }
        }
        for k in 0..4 {
            if mesh.class(c[k]) != expected[k] {
                out.push(Violation::ClassMismatch { quad: qi, vertex: c[k], expected: expected[k] });
            }
        }
        let z = mesh.quad_z(qi);
        if z[2] == z[0] || z[3] == z[1] {
            out.push(Violation::DegenerateQuad { quad: qi });
            continue;
        }
        let area = mesh.signed_area(qi);
        if !(area > 0.0) {
            out.push(Violation::NonPositiveArea { quad: qi, area });
        }
        if let Ok(rho) = mesh.rho(qi) {
            if !(rho.re > 0.0) {
                out.push(Violation::NonDirectRho { quad: qi, rho: [rho.re, rho.im] });
            }
        }
    }
    for e in 0..mesh.edges().len() {
        let inc = mesh.edge_quads(e);
        if inc.len() > 2 {
            out.push(Violation::NonManifoldEdge { edge: e, quads: inc.len() });
        } else if inc.len() == 2 {
            let f0 = mesh.quad_sides(inc[0].0)[inc[0].1].1;
            let f1 = mesh.quad_sides(inc[1].0)[inc[1].1].1;
            if f0 == f1 {
                out.push(Violation::InconsistentOrientation { edge: e });
            }
        } else if mesh.is_periodic() {
            out.push(Violation::OpenEdgeOnClosedMesh { edge: e });
        }
    }
    ValidationReport { violations: out }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Criticality {
    pub delta: f64,
    pub tolerance: f64,
    pub is_critical: bool,
    pub max_deviation: f64,
}

/// Compares every ◇ edge length with their mean. The tolerance is absolute;
/// `None` selects `1e-9 · delta`.
pub fn check_critical(mesh: &QuadMesh, tolerance: Option<f64>) -> Criticality {
    let delta = mesh.mean_edge_length();
    let tolerance = tolerance.unwrap_or(1e-9 * delta);
    let max_deviation = (0..mesh.edges().len())
        .map(|e| (mesh.edge_vector(e).norm() - delta).abs())
        .fold(0.0, f64::max);
    Criticality {
        delta,
        tolerance,
        is_critical: !mesh.edges().is_empty() && max_deviation <= tolerance,
        max_deviation,
    }
}

pub(crate) fn rho_is_real_positive(rho: Complex64, tol: f64) -> bool {
    rho.re > 0.0 && rho.im.abs() <= tol * rho.re.max(1.0)
}
