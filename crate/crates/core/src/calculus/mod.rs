//! Discrete exterior calculus on a quad mesh.
//!
//! Two carriers hold 1-forms: the diagonal graph Λ = Γ ∪ Γ* ([`DiagonalForm`],
//! one value per quad and diagonal) and the quad edges ◇₁ ([`EdgeForm`], one
//! value per canonical edge). They are distinct types so that mixing them is
//! a compile error.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{QuadMesh, VertexClass, VertexId};

mod energy;
mod integrate;
mod io;

pub use io::{function_from_json, function_to_json};
pub use energy::{del, delbar, dilatation, energies, jacobian, Dilatation, EnergyReport};
pub use integrate::{
    contour_additive, integrate_additive, integrate_multiplicative, quad_loop, residue_additive,
    residue_form, residue_multiplicative,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    All,
    GammaOnly,
    GammaStarOnly,
}

impl Support {
    pub fn only(class: VertexClass) -> Self {
        match class {
            VertexClass::Gamma => Support::GammaOnly,
            VertexClass::GammaStar => Support::GammaStarOnly,
        }
    }

    pub fn contains(self, class: VertexClass) -> bool {
        match self {
            Support::All => true,
            Support::GammaOnly => class == VertexClass::Gamma,
            Support::GammaStarOnly => class == VertexClass::GammaStar,
        }
    }
}

/// Complex function on the vertices. Values off the support are stored as
/// zero and never read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Function0 {
    pub support: Support,
    pub values: Vec<Complex64>,
}

impl Function0 {
    pub fn new(mesh: &QuadMesh, support: Support, mut values: Vec<Complex64>) -> Result<Self> {
        if values.len() != mesh.n_vertices() {
            return Err(Error::BadParams(format!(
                "function has {} values for {} vertices",
                values.len(),
                mesh.n_vertices()
            )));
        }
        for (v, val) in values.iter_mut().enumerate() {
            if !support.contains(mesh.class(VertexId(v))) {
                *val = Complex64::new(0.0, 0.0);
            }
        }
        Ok(Function0 { support, values })
    }

    pub fn from_vertex_fn(mesh: &QuadMesh, f: impl Fn(VertexId, Complex64) -> Complex64) -> Self {
        let values = mesh.vertex_ids().map(|v| f(v, mesh.z(v))).collect();
        Function0 { support: Support::All, values }
    }

    /// `f ∘ Z` on all vertices.
    pub fn from_fn(mesh: &QuadMesh, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_vertex_fn(mesh, |_, z| f(z))
    }

    pub fn z(mesh: &QuadMesh) -> Self {
        Self::from_fn(mesh, |z| z)
    }

    pub fn constant(mesh: &QuadMesh, c: Complex64) -> Self {
        Self::from_fn(mesh, |_| c)
    }

    pub fn get(&self, v: VertexId) -> Complex64 {
        self.values[v.0]
    }

    pub fn require(&self, class: VertexClass) -> Result<()> {
        if self.support.contains(class) {
            Ok(())
        } else {
            Err(Error::SupportMismatch(format!(
                "{:?} function read on {:?} vertices",
                self.support, class
            )))
        }
    }

    pub fn require_all(&self) -> Result<()> {
        self.require(VertexClass::Gamma)?;
        self.require(VertexClass::GammaStar)
    }

    pub fn restrict(&self, mesh: &QuadMesh, class: VertexClass) -> Result<Self> {
        self.require(class)?;
        Function0::new(mesh, Support::only(class), self.values.clone())
    }

    /// Glues a Γ function and a Γ* function into one function on ◇₀.
    pub fn join(mesh: &QuadMesh, gamma: &Function0, gamma_star: &Function0) -> Result<Self> {
        gamma.require(VertexClass::Gamma)?;
        gamma_star.require(VertexClass::GammaStar)?;
        let values = mesh
            .vertex_ids()
            .map(|v| match mesh.class(v) {
                VertexClass::Gamma => gamma.get(v),
                VertexClass::GammaStar => gamma_star.get(v),
            })
            .collect();
        Ok(Function0 { support: Support::All, values })
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Function0 { support: self.support, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip(&self, other: &Function0, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.support != other.support || self.values.len() != other.values.len() {
            return Err(Error::SupportMismatch("operands have different supports".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Function0 { support: self.support, values })
    }

    /// Largest modulus over the support.
    pub fn max_norm(&self, mesh: &QuadMesh) -> f64 {
        mesh.vertex_ids()
            .filter(|&v| self.support.contains(mesh.class(v)))
            .map(|v| self.get(v).norm())
            .fold(0.0, f64::max)
    }
}

/// A 1-form on Λ: `gamma[q]` is its integral along `x -> x'` and
/// `gamma_star[q]` along `y -> y'` of quad `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalForm {
    pub gamma: Vec<Complex64>,
    pub gamma_star: Vec<Complex64>,
}

impl DiagonalForm {
    pub fn zeros(n_quads: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n_quads];
        DiagonalForm { gamma: z.clone(), gamma_star: z }
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        DiagonalForm {
            gamma: self.gamma.iter().map(|&z| f(z)).collect(),
            gamma_star: self.gamma_star.iter().map(|&z| f(z)).collect(),
        }
    }

    fn zip(&self, o: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        DiagonalForm {
            gamma: self.gamma.iter().zip(&o.gamma).map(|(&a, &b)| f(a, b)).collect(),
            gamma_star: self.gamma_star.iter().zip(&o.gamma_star).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.gamma.iter().chain(&self.gamma_star).map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Add for &DiagonalForm {
    type Output = DiagonalForm;
    fn add(self, o: &DiagonalForm) -> DiagonalForm {
        self.zip(o, |a, b| a + b)
    }
}

impl Sub for &DiagonalForm {
    type Output = DiagonalForm;
    fn sub(self, o: &DiagonalForm) -> DiagonalForm {
        self.zip(o, |a, b| a - b)
    }
}

impl Neg for &DiagonalForm {
    type Output = DiagonalForm;
    fn neg(self) -> DiagonalForm {
        self.map(|z| -z)
    }
}

impl Mul<&DiagonalForm> for Complex64 {
    type Output = DiagonalForm;
    fn mul(self, o: &DiagonalForm) -> DiagonalForm {
        o.map(|z| self * z)
    }
}

/// A 1-form on ◇₁, valued on each canonical edge in its stored orientation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeForm {
    pub values: Vec<Complex64>,
}

impl EdgeForm {
    /// Value along the edge traversed `a -> b` or reversed.
    pub fn oriented(&self, edge: usize, forward: bool) -> Complex64 {
        if forward {
            self.values[edge]
        } else {
            -self.values[edge]
        }
    }
}

/// A 2-form: one value per quad.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceForm {
    pub values: Vec<Complex64>,
}

/// Circulation of a Λ form around the dual faces. The Γ-face around a Γ*
/// vertex collects Γ-diagonals and vice versa; `None` marks boundary
/// vertices whose face is not closed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualFaceForm {
    pub values: Vec<Option<Complex64>>,
}

/// Corner values of `f` on quad `q`.
pub(crate) fn corner_values(mesh: &QuadMesh, f: &Function0, q: usize) -> [Complex64; 4] {
    mesh.quad(q).corners().map(|v| f.get(v))
}

/// `(f(x') − f(x), f(y') − f(y))` on quad `q`.
pub(crate) fn diagonal_deltas(mesh: &QuadMesh, f: &Function0, q: usize) -> (Complex64, Complex64) {
    let c = corner_values(mesh, f, q);
    (c[2] - c[0], c[3] - c[1])
}

/// `f(x') − f(x)` per quad.
pub fn d0_gamma(mesh: &QuadMesh, f: &Function0) -> Result<Vec<Complex64>> {
    f.require(VertexClass::Gamma)?;
    Ok((0..mesh.n_quads()).map(|q| diagonal_deltas(mesh, f, q).0).collect())
}

/// `f(y') − f(y)` per quad.
pub fn d0_gamma_star(mesh: &QuadMesh, f: &Function0) -> Result<Vec<Complex64>> {
    f.require(VertexClass::GammaStar)?;
    Ok((0..mesh.n_quads()).map(|q| diagonal_deltas(mesh, f, q).1).collect())
}

pub fn d0_diagonal(mesh: &QuadMesh, f: &Function0) -> Result<DiagonalForm> {
    Ok(DiagonalForm { gamma: d0_gamma(mesh, f)?, gamma_star: d0_gamma_star(mesh, f)? })
}

pub fn d0_edges(mesh: &QuadMesh, f: &Function0) -> Result<EdgeForm> {
    f.require_all()?;
    let values = mesh.edges().iter().map(|e| f.get(e.b) - f.get(e.a)).collect();
    Ok(EdgeForm { values })
}

/// `dZ` on Λ, using positions on the universal cover.
pub fn dz_diagonal(mesh: &QuadMesh) -> DiagonalForm {
    let (gamma, gamma_star) = (0..mesh.n_quads())
        .map(|q| {
            let z = mesh.quad_z(q);
            (z[2] - z[0], z[3] - z[1])
        })
        .unzip();
    DiagonalForm { gamma, gamma_star }
}

/// `dZ` on ◇₁, using positions on the universal cover.
pub fn dz_edges(mesh: &QuadMesh) -> EdgeForm {
    EdgeForm { values: (0..mesh.edges().len()).map(|e| mesh.edge_vector(e)).collect() }
}

/// Circulation around each quad of an edge form.
pub fn d1_edges(mesh: &QuadMesh, alpha: &EdgeForm) -> FaceForm {
    let values = (0..mesh.n_quads())
        .map(|q| mesh.quad_sides(q).iter().map(|&(e, fw)| alpha.oriented(e, fw)).sum())
        .collect();
    FaceForm { values }
}

/// Counterclockwise circulation of a Λ form around the dual face of every
/// interior vertex.
pub fn d1_diagonal(mesh: &QuadMesh, alpha: &DiagonalForm) -> DualFaceForm {
    let values = mesh
        .vertex_ids()
        .map(|v| {
            let fan = mesh.fan(v);
            if !fan.closed {
                return None;
            }
            Some(
                fan.corners
                    .iter()
                    .map(|&(q, k)| match k {
                        0 => alpha.gamma_star[q],
                        1 => -alpha.gamma[q],
                        2 => -alpha.gamma_star[q],
                        _ => alpha.gamma[q],
                    })
                    .sum(),
            )
        })
        .collect();
    DualFaceForm { values }
}

/// `(*α)(y,y') = ρ·α(x,x')` and `(*α)(x,x') = −α(y,y')/ρ`; hence `** = −1`.
pub fn hodge_star(mesh: &QuadMesh, alpha: &DiagonalForm) -> Result<DiagonalForm> {
    let n = mesh.n_quads();
    let mut out = DiagonalForm::zeros(n);
    for q in 0..n {
        let rho = mesh.rho(q)?;
        out.gamma_star[q] = rho * alpha.gamma[q];
        out.gamma[q] = -alpha.gamma_star[q] / rho;
    }
    Ok(out)
}

/// `(α∧β)(Q) = ½[α(x,x')β(y,y') − α(y,y')β(x,x')]`.
pub fn wedge(alpha: &DiagonalForm, beta: &DiagonalForm) -> FaceForm {
    let values = (0..alpha.gamma.len())
        .map(|q| 0.5 * (alpha.gamma[q] * beta.gamma_star[q] - alpha.gamma_star[q] * beta.gamma[q]))
        .collect();
    FaceForm { values }
}

/// `(α, β) = Σ_Q α ∧ *β̄`.
pub fn l2_inner(mesh: &QuadMesh, alpha: &DiagonalForm, beta: &DiagonalForm) -> Result<Complex64> {
    let sb = hodge_star(mesh, &beta.conj())?;
    Ok(wedge(alpha, &sb).values.iter().sum())
}

pub fn l2_norm_sq(mesh: &QuadMesh, alpha: &DiagonalForm) -> Result<f64> {
    Ok(l2_inner(mesh, alpha, alpha)?.re)
}

/// Weighted Laplacian on one dual graph together with boundary-row flags.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaplacianResult {
    pub values: Function0,
    /// `true` where the vertex's fan is open and only existing neighbours
    /// were summed.
    pub boundary: Vec<bool>,
}

/// `Δf(x) = Σ_k w_k (f(x) − f(x_k))` over the diagonal neighbours in `class`,
/// with `w = ρ` on Γ and `w = 1/ρ` on Γ*.
pub fn laplacian(mesh: &QuadMesh, f: &Function0, class: VertexClass) -> Result<LaplacianResult> {
    f.require(class)?;
    let mut values = vec![Complex64::new(0.0, 0.0); mesh.n_vertices()];
    let mut boundary = vec![false; mesh.n_vertices()];
    for v in mesh.class_vertices(class) {
        let fv = f.get(v);
        values[v.0] = mesh
            .diagonal_neighbours(v)?
            .iter()
            .map(|&(_, n, w, _)| w * (fv - f.get(n)))
            .sum();
        boundary[v.0] = !mesh.is_interior(v);
    }
    Ok(LaplacianResult { values: Function0 { support: Support::only(class), values }, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, Quad, Vertex};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn unit_square() -> QuadMesh {
        let classes = [VertexClass::Gamma, VertexClass::GammaStar];
        let z = [c(0., 0.), c(1., 0.), c(1., 1.), c(0., 1.)];
        let v = (0..4).map(|i| Vertex { class: classes[i % 2], z: z[i] }).collect();
        QuadMesh::new(v, vec![Quad::new(0, 1, 2, 3)]).unwrap()
    }

    #[test]
    fn d0_of_z_on_unit_square() {
        let m = unit_square();
        let d = d0_diagonal(&m, &Function0::z(&m)).unwrap();
        assert_eq!(d.gamma[0], c(1., 1.));
        assert_eq!(d.gamma_star[0], c(-1., 1.));
        let k = d0_diagonal(&m, &Function0::constant(&m, c(3., -2.))).unwrap();
        assert_eq!(k.max_norm(), 0.0);
    }

    #[test]
    fn support_mismatch() {
        let m = unit_square();
        let f = Function0::z(&m).restrict(&m, VertexClass::Gamma).unwrap();
        assert!(d0_gamma(&m, &f).is_ok());
        assert!(matches!(d0_diagonal(&m, &f), Err(Error::SupportMismatch(_))));
        assert!(matches!(d0_edges(&m, &f), Err(Error::SupportMismatch(_))));
        assert!(laplacian(&m, &f, VertexClass::GammaStar).is_err());
    }

    #[test]
    fn single_edge_circulation() {
        let m = generate::square(2, 2, 1.0).unwrap();
        let mut a = EdgeForm { values: vec![c(0., 0.); m.edges().len()] };
        let e = m.edges().iter().position(|_| true).unwrap();
        a.values[e] = c(2., 1.);
        let d = d1_edges(&m, &a);
        let touched: Vec<usize> = m.edge_quads(e).iter().map(|&(q, _)| q).collect();
        for (q, v) in d.values.iter().enumerate() {
            if touched.contains(&q) {
                assert_eq!(v.norm(), c(2., 1.).norm());
            } else {
                assert_eq!(*v, c(0., 0.));
            }
        }
    }

    #[test]
    fn star_of_dz() {
        let m = unit_square();
        let dz = dz_diagonal(&m);
        let s = hodge_star(&m, &dz).unwrap();
        assert_eq!(s.gamma_star[0], c(1., 1.));
        assert_eq!(s.gamma[0], c(1., -1.));
        assert!((&s - &(c(0., -1.) * &dz)).max_norm() < 1e-15);
        let sc = hodge_star(&m, &dz.conj()).unwrap();
        assert!((&sc - &(c(0., 1.) * &dz.conj())).max_norm() < 1e-15);
        let ss = hodge_star(&m, &s).unwrap();
        assert!((&ss + &dz).max_norm() < 1e-15);
    }

    #[test]
    fn wedge_and_inner_product() {
        let m = unit_square();
        let dz = dz_diagonal(&m);
        assert_eq!(wedge(&dz, &dz.conj()).values[0], c(0., -2.));
        assert_eq!(wedge(&dz, &dz).values[0], c(0., 0.));
        assert!((l2_inner(&m, &dz, &dz).unwrap() - 2.0).norm() < 1e-15);
        assert!(l2_inner(&m, &dz, &dz.conj()).unwrap().norm() < 1e-15);
    }

    #[test]
    fn laplacian_examples() {
        let m = generate::square(5, 5, 1.0).unwrap();
        for class in [VertexClass::Gamma, VertexClass::GammaStar] {
            let lz = laplacian(&m, &Function0::z(&m), class).unwrap();
            let lr = laplacian(&m, &Function0::from_fn(&m, |z| c(z.norm_sqr(), 0.)), class).unwrap();
            for v in m.class_vertices(class) {
                if !lz.boundary[v.0] {
                    assert!(lz.values.get(v).norm() < 1e-12);
                    // four diagonal neighbours at squared distance 2
                    assert!((lr.values.get(v) - c(-8., 0.)).norm() < 1e-12);
                }
            }
        }
        for m in [generate::rhombic(5, 5, 1.0, 1.1).unwrap(), generate::tri_hex(5, 1.0).unwrap()] {
            let f = Function0::from_fn(&m, |z| z * z);
            for class in [VertexClass::Gamma, VertexClass::GammaStar] {
                let l = laplacian(&m, &f, class).unwrap();
                for v in m.class_vertices(class).into_iter().filter(|&v| !l.boundary[v.0]) {
                    assert!(l.values.get(v).norm() < 1e-12, "{}", l.values.get(v));
                }
            }
        }
    }

    #[test]
    fn dd_vanishes_on_lambda() {
        let m = generate::tri_hex(4, 1.0).unwrap();
        let f = Function0::from_fn(&m, |z| (z * 0.7).exp() + z.conj() * z);
        let dd = d1_diagonal(&m, &d0_diagonal(&m, &f).unwrap());
        assert!(dd.values.iter().flatten().all(|v| v.norm() < 1e-12));
        assert!(dd.values.iter().any(|v| v.is_some()));
    }
}
