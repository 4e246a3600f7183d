use num_complex::Complex64;
use serde::Serialize;

use crate::calculus::{hodge_star, DiagonalForm};
use crate::error::{Error, Result};
use crate::holomorphy::check_weights;
use crate::linalg::{solve_spd_complex, SolverConfig, SparseMatrix};
use crate::mesh::{QuadMesh, VertexClass, VertexId};

#[derive(Clone, Debug, Serialize)]
pub struct HodgeSplit {
    pub exact: DiagonalForm,
    pub coexact: DiagonalForm,
    pub harmonic: DiagonalForm,
}

/// Connected components of one dual graph, as a component id per vertex
/// (`usize::MAX` off the graph).
fn components(mesh: &QuadMesh, class: VertexClass) -> Result<Vec<usize>> {
    let mut comp = vec![usize::MAX; mesh.n_vertices()];
    let mut next = 0;
    for v in mesh.class_vertices(class) {
        if comp[v.0] != usize::MAX {
            continue;
        }
        comp[v.0] = next;
        let mut stack = vec![v];
        while let Some(a) = stack.pop() {
            for (_, n, _, _) in mesh.diagonal_neighbours(a)? {
                if comp[n.0] == usize::MAX {
                    comp[n.0] = next;
                    stack.push(n);
                }
            }
        }
        next += 1;
    }
    Ok(comp)
}

/// Solves `Δu = b` on one dual graph of a closed mesh, pinning the first
/// vertex of each component to zero. `b` must sum to zero per component.
pub(crate) fn solve_closed_laplacian(
    mesh: &QuadMesh,
    class: VertexClass,
    b: &[Complex64],
    config: &SolverConfig,
) -> Result<Vec<Complex64>> {
    check_weights(mesh)?;
    let comp = components(mesh, class)?;
    let mut pinned = vec![false; mesh.n_vertices()];
    let mut seen = Vec::new();
    for v in mesh.class_vertices(class) {
        if !seen.contains(&comp[v.0]) {
            seen.push(comp[v.0]);
            pinned[v.0] = true;
        }
    }
    let mut index = vec![usize::MAX; mesh.n_vertices()];
    let ids: Vec<VertexId> = mesh.class_vertices(class).into_iter().filter(|v| !pinned[v.0]).collect();
    for (i, v) in ids.iter().enumerate() {
        index[v.0] = i;
    }
    let mut a = SparseMatrix::new(ids.len());
    let mut rhs = vec![Complex64::new(0.0, 0.0); ids.len()];
    for (row, &v) in ids.iter().enumerate() {
        rhs[row] = b[v.0];
        for (_, n, w, _) in mesh.diagonal_neighbours(v)? {
            a.add(row, row, w.re);
            if index[n.0] != usize::MAX {
                a.add(row, index[n.0], -w.re);
            }
        }
    }
    let x = solve_spd_complex(&a, &rhs, config)?;
    let mut out = vec![Complex64::new(0.0, 0.0); mesh.n_vertices()];
    for (row, &v) in ids.iter().enumerate() {
        out[v.0] = x[row];
    }
    Ok(out)
}

/// Weighted divergence `dᵀWα` of the `class` part of a Λ form, per vertex.
pub(crate) fn divergence(mesh: &QuadMesh, alpha: &[Complex64], class: VertexClass) -> Result<Vec<Complex64>> {
    let mut div = vec![Complex64::new(0.0, 0.0); mesh.n_vertices()];
    for q in 0..mesh.n_quads() {
        let quad = mesh.quad(q);
        let rho = mesh.rho(q)?;
        let (from, to, w) = match class {
            VertexClass::Gamma => (quad.x, quad.xp, rho.re),
            VertexClass::GammaStar => (quad.y, quad.yp, rho.inv().re),
        };
        div[from.0] -= w * alpha[q];
        div[to.0] += w * alpha[q];
    }
    Ok(div)
}

/// `d u` restricted to one diagonal class.
pub(crate) fn gradient(mesh: &QuadMesh, u: &[Complex64], class: VertexClass) -> Vec<Complex64> {
    (0..mesh.n_quads())
        .map(|q| {
            let quad = mesh.quad(q);
            match class {
                VertexClass::Gamma => u[quad.xp.0] - u[quad.x.0],
                VertexClass::GammaStar => u[quad.yp.0] - u[quad.y.0],
            }
        })
        .collect()
}

/// L² projection of `α` onto exact forms `du`, computed per diagonal class.
fn exact_part(mesh: &QuadMesh, alpha: &DiagonalForm, config: &SolverConfig) -> Result<DiagonalForm> {
    let mut parts = Vec::with_capacity(2);
    for (class, data) in [(VertexClass::Gamma, &alpha.gamma), (VertexClass::GammaStar, &alpha.gamma_star)] {
        let b = divergence(mesh, data, class)?;
        let u = solve_closed_laplacian(mesh, class, &b, config)?;
        parts.push(gradient(mesh, &u, class));
    }
    let gamma_star = parts.pop().unwrap();
    let gamma = parts.pop().unwrap();
    Ok(DiagonalForm { gamma, gamma_star })
}

/// Splits a Λ form on a closed mesh into exact, coexact and harmonic parts.
/// The coexact part is `*` of the exact part of `−*α`.
pub fn hodge_decompose(mesh: &QuadMesh, alpha: &DiagonalForm, config: &SolverConfig) -> Result<HodgeSplit> {
    if !mesh.is_closed() {
        return Err(Error::BadParams("Hodge decomposition needs a closed mesh".into()));
    }
    let exact = exact_part(mesh, alpha, config)?;
    let beta = -&hodge_star(mesh, alpha)?;
    let coexact = hodge_star(mesh, &exact_part(mesh, &beta, config)?)?;
    let harmonic = &(alpha - &exact) - &coexact;
    Ok(HodgeSplit { exact, coexact, harmonic })
}
