use num_complex::Complex64;
use serde::Serialize;

use super::{d0_diagonal, diagonal_deltas, hodge_star, l2_norm_sq, FaceForm, Function0};
use crate::error::{Error, Result};
use crate::mesh::QuadMesh;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub dirichlet: f64,
    pub area: f64,
    pub conformal: f64,
}

/// Dirichlet energy, oriented image area and conformal energy of `f`.
/// The conformal energy is computed as `½‖df − i*df‖²`, independently of
/// the other two.
pub fn energies(mesh: &QuadMesh, f: &Function0) -> Result<EnergyReport> {
    f.require_all()?;
    let mut dirichlet = 0.0;
    let mut area = 0.0;
    for q in 0..mesh.n_quads() {
        let rho = mesh.rho(q)?;
        let (a, b) = diagonal_deltas(mesh, f, q);
        dirichlet += 0.5 * (rho.re * a.norm_sqr() + rho.inv().re * b.norm_sqr());
        area += 0.5 * (b * a.conj()).im;
    }
    let df = d0_diagonal(mesh, f)?;
    let sdf = hodge_star(mesh, &df)?;
    let defect = &df - &(Complex64::i() * &sdf);
    let conformal = 0.5 * l2_norm_sq(mesh, &defect)?;
    Ok(EnergyReport { dirichlet, area, conformal })
}

fn del_pair(mesh: &QuadMesh, f: &Function0, q: usize) -> Result<(Complex64, Complex64)> {
    let z = mesh.quad_z(q);
    let (dx, dy) = (z[2] - z[0], z[3] - z[1]);
    let den = dx * dy.conj() - dx.conj() * dy;
    if den.norm() == 0.0 {
        return Err(Error::DegenerateQuad { quad: q, reason: "parallel diagonals" });
    }
    let (a, b) = diagonal_deltas(mesh, f, q);
    Ok(((a * dy.conj() - dx.conj() * b) / den, (dx * b - a * dy) / den))
}

fn del_both(mesh: &QuadMesh, f: &Function0) -> Result<Vec<(Complex64, Complex64)>> {
    f.require_all()?;
    (0..mesh.n_quads()).map(|q| del_pair(mesh, f, q)).collect()
}

/// Per-quad derivative with respect to `Z`: the unique `∂f` with
/// `df = ∂f·dZ + ∂̄f·dZ̄` on both diagonals.
pub fn del(mesh: &QuadMesh, f: &Function0) -> Result<FaceForm> {
    Ok(FaceForm { values: del_both(mesh, f)?.into_iter().map(|p| p.0).collect() })
}

pub fn delbar(mesh: &QuadMesh, f: &Function0) -> Result<FaceForm> {
    Ok(FaceForm { values: del_both(mesh, f)?.into_iter().map(|p| p.1).collect() })
}

/// `|∂f|² − |∂̄f|²` per quad.
pub fn jacobian(mesh: &QuadMesh, f: &Function0) -> Result<Vec<f64>> {
    Ok(del_both(mesh, f)?
        .into_iter()
        .map(|(d, db)| d.norm_sqr() - db.norm_sqr())
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Dilatation {
    /// `(|∂f| + |∂̄f|)/(|∂f| − |∂̄f|)`, or `+∞` when `|∂f| ≤ |∂̄f|`.
    pub d: f64,
    /// `∂̄f/∂f`, absent when `∂f = 0`.
    pub mu: Option<Complex64>,
}

pub fn dilatation(mesh: &QuadMesh, f: &Function0) -> Result<Vec<Dilatation>> {
    Ok(del_both(mesh, f)?
        .into_iter()
        .map(|(d, db)| {
            let (a, b) = (d.norm(), db.norm());
            let d_f = if a - b <= 1e-14 * a.max(b) || a <= b {
                f64::INFINITY
            } else {
                (a + b) / (a - b)
            };
            let mu = if a == 0.0 { None } else { Some(db / d) };
            Dilatation { d: d_f, mu }
        })
        .collect())
}
