use std::collections::VecDeque;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::calculus::DiagonalForm;
use crate::error::{Error, Result};
use crate::mesh::{QuadMesh, Shift, VertexClass};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_GAP: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct PeriodData {
    /// `[ω₊, ω₋]` with A-periods `(1, 1)` and `(1, −1)` on `(Γ, Γ*)`.
    pub holo_basis: Vec<DiagonalForm>,
    pub tau_gamma: Complex64,
    pub tau_gamma_star: Complex64,
    pub gap: f64,
    /// Ratio of the lattice translations, the continuum modulus.
    pub tau_continuum: Complex64,
    pub singular_values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankCertificate {
    pub harmonic_rank: usize,
    pub holomorphic_rank: usize,
    pub harmonic_singular_values: Vec<f64>,
    pub holomorphic_singular_values: Vec<f64>,
}

fn require_torus(mesh: &QuadMesh) -> Result<()> {
    if !mesh.is_periodic() || !mesh.is_closed() {
        return Err(Error::BadParams("periods need a periodic closed mesh".into()));
    }
    Ok(())
}

/// Closedness rows of `d1` acting on a Λ form; columns are `[γ | γ*]`.
fn closedness_rows(mesh: &QuadMesh) -> Vec<Vec<(usize, Complex64)>> {
    let nq = mesh.n_quads();
    mesh.vertex_ids()
        .map(|v| {
            mesh.fan(v)
                .corners
                .iter()
                .map(|&(q, k)| match k {
                    0 => (nq + q, Complex64::new(1.0, 0.0)),
                    1 => (q, Complex64::new(-1.0, 0.0)),
                    2 => (nq + q, Complex64::new(-1.0, 0.0)),
                    _ => (q, Complex64::new(1.0, 0.0)),
                })
                .collect()
        })
        .collect()
}

/// Singular values (descending) and an orthonormal kernel basis, padding
/// with zero rows so that the SVD exposes every right singular vector.
fn kernel(a: DMatrix<Complex64>) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let (r, c) = a.shape();
    let a = if r < c { a.resize_vertically(c, Complex64::new(0.0, 0.0)) } else { a };
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let cutoff = RANK_GAP * sv.first().copied().unwrap_or(0.0);
    let basis = order
        .iter()
        .filter(|&&i| svd.singular_values[i] <= cutoff)
        .map(|&i| v_t.row(i).iter().map(|z| z.conj()).collect())
        .collect();
    (sv, basis)
}

fn dense(rows: &[Vec<(usize, Complex64)>], cols: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(rows.len(), cols, Complex64::new(0.0, 0.0));
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            m[(i, j)] += v;
        }
    }
    m
}

/// Kernel dimensions of closed-and-coclosed Λ forms and of those that are
/// additionally in the `−i` eigenspace of `*`. Fails unless they are 4 and 2.
pub fn harmonic_rank(mesh: &QuadMesh) -> Result<RankCertificate> {
    require_torus(mesh)?;
    let nq = mesh.n_quads();
    let rho: Vec<Complex64> = (0..nq).map(|q| mesh.rho(q)).collect::<Result<_>>()?;
    let closed = closedness_rows(mesh);
    // d1(*α): (*α)_γ* = ρ α_γ and (*α)_γ = −α_γ*/ρ
    let coclosed: Vec<Vec<(usize, Complex64)>> = closed
        .iter()
        .map(|row| {
            row.iter()
                .map(|&(j, v)| if j >= nq { (j - nq, v * rho[j - nq]) } else { (j + nq, -v / rho[j]) })
                .collect()
        })
        .collect();
    let mut rows: Vec<_> = closed.into_iter().chain(coclosed).collect();
    let (hsv, hker) = kernel(dense(&rows, 2 * nq));
    // ω_γ* − iρ·ω_γ = 0
    rows.extend((0..nq).map(|q| vec![(nq + q, Complex64::new(1.0, 0.0)), (q, -Complex64::i() * rho[q])]));
    let (osv, oker) = kernel(dense(&rows, 2 * nq));
    for (found, expected, sv) in [(hker.len(), 4, &hsv), (oker.len(), 2, &osv)] {
        if found != expected {
            return Err(Error::RankDeficiency { expected, found, singular_values: sv.clone() });
        }
    }
    Ok(RankCertificate {
        harmonic_rank: hker.len(),
        holomorphic_rank: oker.len(),
        harmonic_singular_values: hsv,
        holomorphic_singular_values: osv,
    })
}

/// Periods of a closed cochain on one diagonal graph over the two lattice
/// translation classes. Cycles come from a BFS tree: each non-tree edge
/// closes a loop whose class is read off the corner shifts.
pub fn graph_periods(mesh: &QuadMesh, values: &[Complex64], class: VertexClass) -> Result<[Complex64; 2]> {
    require_torus(mesh)?;
    let (c0, c1) = match class {
        VertexClass::Gamma => (0, 2),
        VertexClass::GammaStar => (1, 3),
    };
    let mut adj = vec![Vec::new(); mesh.n_vertices()];
    let mut edges = Vec::with_capacity(mesh.n_quads());
    for q in 0..mesh.n_quads() {
        let c = mesh.quad(q).corners();
        let (s0, s1) = (mesh.corner_shift(q, c0), mesh.corner_shift(q, c1));
        let s: Shift = [s1[0] - s0[0], s1[1] - s0[1]];
        adj[c[c0].0].push((c[c1], values[q], s));
        adj[c[c1].0].push((c[c0], -values[q], [-s[0], -s[1]]));
        edges.push((c[c0], c[c1], values[q], s));
    }
    let root = mesh.class_vertices(class)[0];
    let mut pot: Vec<Option<(Complex64, Shift)>> = vec![None; mesh.n_vertices()];
    pot[root.0] = Some((Complex64::new(0.0, 0.0), [0, 0]));
    let mut queue = VecDeque::from([root]);
    while let Some(a) = queue.pop_front() {
        let (pa, sa) = pot[a.0].unwrap();
        for &(b, w, s) in &adj[a.0] {
            if pot[b.0].is_none() {
                pot[b.0] = Some((pa + w, [sa[0] + s[0], sa[1] + s[1]]));
                queue.push_back(b);
            }
        }
    }
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut loops: Vec<([i32; 2], Complex64)> = Vec::new();
    for &(a, b, w, s) in &edges {
        let (Some((pa, sa)), Some((pb, sb))) = (pot[a.0], pot[b.0]) else {
            return Err(Error::BadParams("diagonal graph is disconnected".into()));
        };
        let h = [sa[0] + s[0] - sb[0], sa[1] + s[1] - sb[1]];
        let integral = pa + w - pb;
        if h == [0, 0] {
            if integral.norm() > 1e-8 * scale * mesh.n_quads() as f64 {
                return Err(Error::NotHarmonic { residual: integral.norm() });
            }
        } else {
            loops.push((h, integral));
        }
    }
    let (h1, p1) = *loops.first().ok_or(Error::BadParams("no noncontractible cycle".into()))?;
    let &(h2, p2) = loops
        .iter()
        .find(|(h, _)| h1[0] * h[1] - h1[1] * h[0] != 0)
        .ok_or(Error::BadParams("cycles span a single class".into()))?;
    let det = (h1[0] * h2[1] - h1[1] * h2[0]) as f64;
    let a = (p1 * h2[1] as f64 - p2 * h1[1] as f64) / det;
    let b = (p2 * h1[0] as f64 - p1 * h2[0] as f64) / det;
    Ok([a, b])
}

/// Holomorphic Λ forms on a torus (closed and `*ω = −iω`), normalized by
/// their A-periods on both graphs, together with the two period ratios.
pub fn holomorphic_basis(mesh: &QuadMesh) -> Result<PeriodData> {
    require_torus(mesh)?;
    let nq = mesh.n_quads();
    let rho: Vec<Complex64> = (0..nq).map(|q| mesh.rho(q)).collect::<Result<_>>()?;
    // unknown h = ω_γ; ω_γ* = iρh
    let rows: Vec<Vec<(usize, Complex64)>> = closedness_rows(mesh)
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|(j, v)| if j >= nq { (j - nq, v * Complex64::i() * rho[j - nq]) } else { (j, v) })
                .collect()
        })
        .collect();
    let (sv, ker) = kernel(dense(&rows, nq));
    if ker.len() != 2 {
        return Err(Error::RankDeficiency { expected: 2, found: ker.len(), singular_values: sv });
    }
    let forms: Vec<DiagonalForm> = ker
        .iter()
        .map(|h| DiagonalForm {
            gamma: h.clone(),
            gamma_star: h.iter().zip(&rho).map(|(x, r)| Complex64::i() * r * x).collect(),
        })
        .collect();
    let pg: Vec<[Complex64; 2]> =
        forms.iter().map(|w| graph_periods(mesh, &w.gamma, VertexClass::Gamma)).collect::<Result<_>>()?;
    let ps: Vec<[Complex64; 2]> =
        forms.iter().map(|w| graph_periods(mesh, &w.gamma_star, VertexClass::GammaStar)).collect::<Result<_>>()?;
    // [pg0 pg1; ps0 ps1]·c = (1, ±1)
    let det = pg[0][0] * ps[1][0] - pg[1][0] * ps[0][0];
    if det.norm() <= 1e-12 * (pg[0][0].norm() + pg[1][0].norm()) * (ps[0][0].norm() + ps[1][0].norm()) {
        return Err(Error::SingularSystem("A-periods do not determine a normalized form".into()));
    }
    let combine = |t: Complex64| {
        let c0 = (ps[1][0] - pg[1][0] * t) / det;
        let c1 = (pg[0][0] * t - ps[0][0]) / det;
        (&forms[0].map(|v| v * c0) + &forms[1].map(|v| v * c1), [c0, c1])
    };
    let (plus, c) = combine(Complex64::new(1.0, 0.0));
    let (minus, _) = combine(Complex64::new(-1.0, 0.0));
    let tau_gamma = c[0] * pg[0][1] + c[1] * pg[1][1];
    let tau_gamma_star = c[0] * ps[0][1] + c[1] * ps[1][1];
    let p = mesh.periodicity().unwrap().periods;
    Ok(PeriodData {
        holo_basis: vec![plus, minus],
        tau_gamma,
        tau_gamma_star,
        gap: (tau_gamma - tau_gamma_star).norm(),
        tau_continuum: p[1] / p[0],
        singular_values: sv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{d1_diagonal, dz_diagonal, hodge_star};
    use crate::mesh::generate;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dz_periods_are_the_lattice_translations() {
        let t = generate::rectangle_torus(6, 4, 0.5, 1.5).unwrap();
        let dz = dz_diagonal(&t);
        let p = t.periodicity().unwrap().periods;
        for (vals, class) in [(&dz.gamma, VertexClass::Gamma), (&dz.gamma_star, VertexClass::GammaStar)] {
            let g = graph_periods(&t, vals, class).unwrap();
            assert!((g[0] - p[0]).norm() < 1e-12 && (g[1] - p[1]).norm() < 1e-12);
        }
    }

    #[test]
    fn square_torus_has_modulus_i() {
        for n in [4, 8] {
            let t = generate::torus(n, n, 1.0).unwrap();
            let d = holomorphic_basis(&t).unwrap();
            assert!((d.tau_gamma - c(0.0, 1.0)).norm() < 1e-8, "{:?}", d.tau_gamma);
            assert!((d.tau_gamma_star - c(0.0, 1.0)).norm() < 1e-8);
            // normalized form is dZ / n
            let dz = dz_diagonal(&t).map(|v| v / n as f64);
            assert!((&d.holo_basis[0] - &dz).max_norm() < 1e-10);
        }
    }

    #[test]
    fn basis_is_closed_and_antiselfdual() {
        let t = generate::rectangle_torus(4, 6, 1.0, 1.7).unwrap();
        let d = holomorphic_basis(&t).unwrap();
        for w in &d.holo_basis {
            assert!(d1_diagonal(&t, w).values.iter().all(|v| v.unwrap().norm() < 1e-10));
            let s = hodge_star(&t, w).unwrap();
            assert!((&s - &w.map(|v| -Complex64::i() * v)).max_norm() < 1e-10);
        }
        let a = graph_periods(&t, &d.holo_basis[1].gamma_star, VertexClass::GammaStar).unwrap();
        assert!((a[0] + 1.0).norm() < 1e-10);
    }

    #[test]
    fn rank_certificate_on_torus() {
        let t = generate::torus(6, 6, 1.0).unwrap();
        let r = harmonic_rank(&t).unwrap();
        assert_eq!((r.harmonic_rank, r.holomorphic_rank), (4, 2));
    }

    #[test]
    fn planar_mesh_is_rejected() {
        let m = generate::square(4, 4, 1.0).unwrap();
        assert!(holomorphic_basis(&m).is_err());
    }
}
