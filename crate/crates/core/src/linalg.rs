//! Small sparse symmetric solver used by the elliptic problems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    ConjugateGradient,
    DirectDense,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: SolverMethod,
    pub rel_tolerance: f64,
    /// Defaults to `10·n` when absent.
    pub max_iterations: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { method: SolverMethod::ConjugateGradient, rel_tolerance: 1e-10, max_iterations: None }
    }
}

impl SolverConfig {
    pub fn dense() -> Self {
        SolverConfig { method: SolverMethod::DirectDense, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rel_tolerance > 0.0 {
            Ok(())
        } else {
            Err(Error::BadParams(format!("rel_tolerance must be positive, got {}", self.rel_tolerance)))
        }
    }
}

/// Systems smaller than this are always factored densely.
pub const DENSE_CUTOFF: usize = 500;

/// Row-major sparse matrix assembled from triplets.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn new(n: usize) -> Self {
        SparseMatrix { n, rows: vec![Vec::new(); n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let row = &mut self.rows[i];
        match row.iter_mut().find(|(c, _)| *c == j) {
            Some(e) => e.1 += v,
            None => row.push((j, v)),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().filter(|e| e.0 == i).map(|e| e.1).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                m[(i, j)] += v;
            }
        }
        m
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn solve_dense(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let m = a.to_dense();
    let rhs = DVector::from_column_slice(b);
    let x = match m.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::SingularSystem(format!("{}x{} system has no unique solution", a.n, a.n)))?,
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem("non-finite solution".into()));
    }
    Ok(x.iter().copied().collect())
}

/// Jacobi-preconditioned conjugate gradient.
fn solve_cg(a: &SparseMatrix, b: &[f64], config: &SolverConfig) -> Result<Vec<f64>> {
    let n = a.n;
    let diag = a.diagonal();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::SingularSystem("non-positive diagonal entry".into()));
    }
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let target = config.rel_tolerance * bnorm;
    let max_it = config.max_iterations.unwrap_or(10 * n.max(1));
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 0..max_it {
        let ap = a.mul_vec(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::SingularSystem(format!("matrix is not positive definite (iteration {it})")));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= target {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence { iterations: max_it, residual: dot(&r, &r).sqrt() / bnorm })
}

/// Solves `A x = b` for a symmetric positive definite `A`.
pub fn solve_spd(a: &SparseMatrix, b: &[f64], config: &SolverConfig) -> Result<Vec<f64>> {
    config.validate()?;
    if a.n == 0 {
        return Ok(Vec::new());
    }
    if config.method == SolverMethod::DirectDense || a.n < DENSE_CUTOFF {
        solve_dense(a, b)
    } else {
        solve_cg(a, b, config)
    }
}

/// Solves a real SPD system with a complex right-hand side, one real solve
/// per component.
pub fn solve_spd_complex(a: &SparseMatrix, b: &[Complex64], config: &SolverConfig) -> Result<Vec<Complex64>> {
    let re: Vec<f64> = b.iter().map(|z| z.re).collect();
    let im: Vec<f64> = b.iter().map(|z| z.im).collect();
    let xr = solve_spd(a, &re, config)?;
    let xi = if im.iter().all(|&v| v == 0.0) { vec![0.0; im.len()] } else { solve_spd(a, &im, config)? };
    Ok(xr.into_iter().zip(xi).map(|(r, i)| Complex64::new(r, i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(n: usize) -> SparseMatrix {
        // 1D Dirichlet Laplacian: tridiagonal (−1, 2, −1)
        let mut a = SparseMatrix::new(n);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
                a.add(i + 1, i, -1.0);
            }
        }
        a
    }

    #[test]
    fn cg_matches_dense() {
        let n = 700;
        let a = path_laplacian(n);
        let b: Vec<f64> = (0..n).map(|i| ((i * 7) % 13) as f64 - 6.0).collect();
        let cfg = SolverConfig { rel_tolerance: 1e-12, ..Default::default() };
        let x = solve_spd(&a, &b, &cfg).unwrap();
        let ax = a.mul_vec(&x);
        let res: f64 = ax.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        assert!(res <= 1e-12 * dot(&b, &b).sqrt() * 1.0001);
        let xd = solve_spd(&a, &b, &SolverConfig::dense()).unwrap();
        let scale = xd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(x.iter().zip(&xd).all(|(p, q)| (p - q).abs() <= 1e-7 * scale));
    }

    #[test]
    fn singular_systems_are_reported() {
        let mut a = SparseMatrix::new(2);
        a.add(0, 0, 1.0);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        a.add(1, 1, 1.0);
        assert!(matches!(solve_spd(&a, &[1.0, 0.0], &SolverConfig::dense()), Err(Error::SingularSystem(_))));
    }

    #[test]
    fn iteration_cap() {
        let a = path_laplacian(600);
        let b = vec![1.0; 600];
        let cfg = SolverConfig { max_iterations: Some(3), ..Default::default() };
        assert!(matches!(solve_spd(&a, &b, &cfg), Err(Error::NoConvergence { iterations: 3, .. })));
        let bad = SolverConfig { rel_tolerance: 0.0, ..Default::default() };
        assert!(solve_spd(&a, &b, &bad).is_err());
    }

    #[test]
    fn complex_rhs() {
        let a = path_laplacian(5);
        let b = vec![Complex64::new(1.0, -2.0); 5];
        let x = solve_spd_complex(&a, &b, &SolverConfig::default()).unwrap();
        let xr: Vec<f64> = x.iter().map(|z| z.re).collect();
        let xi: Vec<f64> = x.iter().map(|z| z.im).collect();
        let (ar, ai) = (a.mul_vec(&xr), a.mul_vec(&xi));
        for i in 0..5 {
            assert!((ar[i] - 1.0).abs() < 1e-12 && (ai[i] + 2.0).abs() < 1e-12);
        }
    }
}
