//! Holomorphicity constraints, integrators and constructors.

use num_complex::Complex64;
use serde::Serialize;

use crate::calculus::{corner_values, diagonal_deltas, Function0};
use crate::error::{Error, Result};
use crate::mesh::{cross_ratio, Quad, QuadMesh};

mod elliptic;
mod integrate;

pub use elliptic::{harmonic_conjugate, solve_dirichlet};
pub(crate) use elliptic::{check_weights, solve_on_domain};
pub use integrate::{
    default_base_point, discrete_exponential, exponential_axis_formula, hirota_exponential,
    hirota_integrate, integrate_holomorphic, multiplicative_morera_residual, pseudo_power,
    BasePoint, Propagation,
};
pub(crate) use integrate::propagate;

/// Summary of a per-quad residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub max_residual: f64,
    #[serde(skip)]
    pub worst_index: Option<usize>,
    pub worst_quad: Option<Quad>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_quad: Option<Vec<f64>>,
}

impl ConstraintReport {
    pub fn from_residuals(mesh: &QuadMesh, residuals: Vec<f64>) -> Self {
        let mut worst: Option<usize> = None;
        let mut max = 0.0;
        for (q, &r) in residuals.iter().enumerate() {
            let r = if r.is_nan() { f64::INFINITY } else { r };
            if worst.is_none() || r > max {
                worst = Some(q);
                max = r;
            }
        }
        ConstraintReport {
            max_residual: max,
            worst_index: worst,
            worst_quad: worst.map(|w| mesh.quad(w)),
            per_quad: Some(residuals),
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }

    pub fn without_detail(mut self) -> Self {
        self.per_quad = None;
        self
    }
}

fn local_scale(mesh: &QuadMesh, f: &Function0, q: usize) -> f64 {
    corner_values(mesh, f, q).iter().map(|v| v.norm()).fold(1.0, f64::max)
}

/// `|Δ_y f − iρ·Δ_x f| / (|Z(x') − Z(x)|·max(1, |f|_local))` per quad.
pub fn check_linear_holomorphic(mesh: &QuadMesh, f: &Function0) -> Result<ConstraintReport> {
    f.require_all()?;
    let mut res = Vec::with_capacity(mesh.n_quads());
    for q in 0..mesh.n_quads() {
        let rho = mesh.rho(q)?;
        let z = mesh.quad_z(q);
        let (a, b) = diagonal_deltas(mesh, f, q);
        res.push((b - Complex64::i() * rho * a).norm() / ((z[2] - z[0]).norm() * local_scale(mesh, f, q)));
    }
    Ok(ConstraintReport::from_residuals(mesh, res))
}

/// Unnormalized residual `|Δ_y f − iρ·Δ_x f|` per quad.
pub fn linear_residual_raw(mesh: &QuadMesh, f: &Function0) -> Result<Vec<f64>> {
    f.require_all()?;
    (0..mesh.n_quads())
        .map(|q| {
            let (a, b) = diagonal_deltas(mesh, f, q);
            Ok((b - Complex64::i() * mesh.rho(q)? * a).norm())
        })
        .collect()
}

/// `|cr(f) − q| / max(1, |q|)` per quad.
pub fn check_cross_ratio(mesh: &QuadMesh, f: &Function0) -> Result<ConstraintReport> {
    f.require_all()?;
    let mut res = Vec::with_capacity(mesh.n_quads());
    for q in 0..mesh.n_quads() {
        let qz = mesh.cross_ratio_q(q)?;
        let v = corner_values(mesh, f, q);
        let distinct = (0..4).all(|a| (a + 1..4).all(|b| v[a] != v[b]));
        let cr = cross_ratio(v[0], v[1], v[2], v[3]).filter(|_| distinct).ok_or(Error::DegenerateQuad {
            quad: q,
            reason: "function repeats a value on the quad",
        })?;
        res.push((cr - qz).norm() / qz.norm().max(1.0));
    }
    Ok(ConstraintReport::from_residuals(mesh, res))
}

/// Diagonal-ratio residual of `g` measured with `f_ref` as the reference map.
pub fn check_log_derivative_link(mesh: &QuadMesh, f_ref: &Function0, g: &Function0) -> Result<ConstraintReport> {
    f_ref.require_all()?;
    g.require_all()?;
    let mut res = Vec::with_capacity(mesh.n_quads());
    for q in 0..mesh.n_quads() {
        let (fa, fb) = diagonal_deltas(mesh, f_ref, q);
        if fa.norm() == 0.0 {
            return Err(Error::DegenerateQuad { quad: q, reason: "reference map collapses the primal diagonal" });
        }
        let (ga, gb) = diagonal_deltas(mesh, g, q);
        res.push((gb - fb / fa * ga).norm() / (fa.norm() * local_scale(mesh, g, q)));
    }
    Ok(ConstraintReport::from_residuals(mesh, res))
}
