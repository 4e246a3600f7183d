use num_complex::Complex64;

use super::{corner_values, EdgeForm, Function0};
use crate::error::{Error, Result};
use crate::mesh::{QuadMesh, VertexId};

fn steps(mesh: &QuadMesh, path: &[VertexId]) -> Result<Vec<(VertexId, VertexId, Complex64)>> {
    path.windows(2)
        .map(|w| {
            let (e, fw) = mesh
                .find_edge(w[0], w[1])
                .ok_or(Error::BrokenPath { from: w[0], to: w[1] })?;
            let dz = mesh.edge_vector(e);
            Ok((w[0], w[1], if fw { dz } else { -dz }))
        })
        .collect()
}

/// `Σ (f(a) + f(b))/2 · (Z(b) − Z(a))` along a vertex path of ◇ edges.
pub fn integrate_additive(mesh: &QuadMesh, f: &Function0, path: &[VertexId]) -> Result<Complex64> {
    f.require_all()?;
    Ok(steps(mesh, path)?
        .into_iter()
        .map(|(a, b, dz)| 0.5 * (f.get(a) + f.get(b)) * dz)
        .sum())
}

/// `Σ f(a)·f(b)·(Z(b) − Z(a))` along a vertex path of ◇ edges.
pub fn integrate_multiplicative(mesh: &QuadMesh, f: &Function0, path: &[VertexId]) -> Result<Complex64> {
    f.require_all()?;
    Ok(steps(mesh, path)?
        .into_iter()
        .map(|(a, b, dz)| f.get(a) * f.get(b) * dz)
        .sum())
}

/// Boundary loop `x, y, x', y', x` of a quad.
pub fn quad_loop(mesh: &QuadMesh, q: usize) -> Vec<VertexId> {
    let c = mesh.quad(q).corners();
    vec![c[0], c[1], c[2], c[3], c[0]]
}

/// Counterclockwise circulation of an edge form around a quad.
pub fn residue_form(mesh: &QuadMesh, alpha: &EdgeForm, q: usize) -> Complex64 {
    mesh.quad_sides(q).iter().map(|&(e, fw)| alpha.oriented(e, fw)).sum()
}

/// `∮_Q f dZ` under the additive coupling.
pub fn residue_additive(mesh: &QuadMesh, f: &Function0, q: usize) -> Result<Complex64> {
    f.require_all()?;
    let z = mesh.quad_z(q);
    let v = corner_values(mesh, f, q);
    Ok((0..4).map(|k| 0.5 * (v[k] + v[(k + 1) % 4]) * (z[(k + 1) % 4] - z[k])).sum())
}

/// `∮_Q f dZ` under the multiplicative coupling.
pub fn residue_multiplicative(mesh: &QuadMesh, f: &Function0, q: usize) -> Result<Complex64> {
    f.require_all()?;
    let z = mesh.quad_z(q);
    let v = corner_values(mesh, f, q);
    Ok((0..4).map(|k| v[k] * v[(k + 1) % 4] * (z[(k + 1) % 4] - z[k])).sum())
}

/// `∮_Q f dg = Σ (f_k + f_{k+1})/2 · (g_{k+1} − g_k)`.
pub fn contour_additive(mesh: &QuadMesh, f: &Function0, g: &Function0, q: usize) -> Result<Complex64> {
    f.require_all()?;
    g.require_all()?;
    let a = corner_values(mesh, f, q);
    let b = corner_values(mesh, g, q);
    Ok((0..4).map(|k| 0.5 * (a[k] + a[(k + 1) % 4]) * (b[(k + 1) % 4] - b[k])).sum())
}
