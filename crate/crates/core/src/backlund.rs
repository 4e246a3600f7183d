//! Bäcklund transforms of linear-holomorphic and cross-ratio preserving
//! functions.
//!
//! Both transforms build `f'` over each ◇ edge `(a, b)` from the vertical
//! quad `(f(a), f(b), f'(b), f'(a))` and then verify closure on the
//! non-tree edges.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::Function0;
use crate::error::{Error, Result};
use crate::holomorphy::{propagate, ConstraintReport};
use crate::mesh::{QuadMesh, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BacklundKind {
    Linear,
    CrossRatio,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BacklundParams {
    pub lambda: Complex64,
    pub mu: Complex64,
    pub origin: VertexId,
}

#[derive(Clone, Debug, Serialize)]
pub struct BacklundResult {
    pub function: Function0,
    pub closure_residual: f64,
    pub params: BacklundParams,
}

fn degenerate(x: Complex64, scale: f64) -> bool {
    x.norm() <= 1e-13 * scale
}

/// Linear step across edge `a -> b` with `e = Z(b) − Z(a)`:
/// `f'(b) = f(a) + (f'(a) − f(b))·(λ + e)/(λ − e)`.
fn linear_step(lambda: Complex64, e: Complex64, fa: Complex64, fb: Complex64, fpa: Complex64) -> Option<Complex64> {
    let den = lambda - e;
    if degenerate(den, lambda.norm().max(e.norm())) {
        return None;
    }
    Some(fa + (fpa - fb) * (lambda + e) / den)
}

/// Cross-ratio step across edge `a -> b`. With `p = f'(a)`, `s = f(a)`,
/// `t = f(b)` and `k = λ²/e²` the vertical-quad equation
/// `(p − s)(t − w) / ((s − t)(w − p)) = k` is linear in the unknown
/// `w = f'(b)`:
/// `(p − s)(t − w) = k(s − t)(w − p)`, so
/// `w·[(p − s) + k(s − t)] = (p − s)t + k(s − t)p`.
fn cross_ratio_step(lambda: Complex64, e: Complex64, s: Complex64, t: Complex64, p: Complex64) -> Option<Complex64> {
    let k = lambda * lambda / (e * e);
    let den = (p - s) + k * (s - t);
    let scale = (p - s).norm() + k.norm() * (s - t).norm();
    if degenerate(p - s, (p.norm() + s.norm()).max(f64::MIN_POSITIVE)) || degenerate(den, scale) {
        return None;
    }
    Some(((p - s) * t + k * (s - t) * p) / den)
}

fn run(mesh: &QuadMesh, f: &Function0, params: &BacklundParams, tol: f64, kind: BacklundKind) -> Result<BacklundResult> {
    f.require_all()?;
    let lambda = params.lambda;
    if kind == BacklundKind::CrossRatio && lambda.norm() == 0.0 {
        return Err(Error::BadParams("spectral parameter must be nonzero".into()));
    }
    let p = propagate(mesh, params.origin, params.mu, |a, b, e, fpa| {
        let (fa, fb) = (f.get(a), f.get(b));
        match kind {
            BacklundKind::Linear => linear_step(lambda, e, fa, fb, fpa).ok_or(Error::LambdaOnEdge { from: a, to: b }),
            BacklundKind::CrossRatio => cross_ratio_step(lambda, e, fa, fb, fpa).ok_or(Error::DegenerateStep { from: a, to: b }),
        }
    })?;
    if p.closure_residual > tol {
        return Err(Error::InconsistentPropagation { residual: p.closure_residual });
    }
    Ok(BacklundResult { function: p.values, closure_residual: p.closure_residual, params: *params })
}

/// Bäcklund transform for the linear constraint, with `f'(O) = μ`.
/// Fails with [`Error::InconsistentPropagation`] when the closure residual on
/// non-tree edges exceeds `tol`.
pub fn backlund_linear(mesh: &QuadMesh, f: &Function0, params: &BacklundParams, tol: f64) -> Result<BacklundResult> {
    run(mesh, f, params, tol, BacklundKind::Linear)
}

/// Bäcklund transform for the cross-ratio constraint, with `f'(O) = μ`.
pub fn backlund_crossratio(mesh: &QuadMesh, f: &Function0, params: &BacklundParams, tol: f64) -> Result<BacklundResult> {
    run(mesh, f, params, tol, BacklundKind::CrossRatio)
}

/// Per-edge residual of the vertical-quad equation for a claimed pair
/// `(f, f')`. Reported per quad as the worst of its four sides.
pub fn consistency_residual(
    mesh: &QuadMesh,
    f: &Function0,
    f_prime: &Function0,
    kind: BacklundKind,
    lambda: Complex64,
) -> Result<ConstraintReport> {
    f.require_all()?;
    f_prime.require_all()?;
    let edge_res: Vec<f64> = mesh
        .edges()
        .iter()
        .enumerate()
        .map(|(i, edge)| {
            let e = mesh.edge_vector(i);
            let (s, t) = (f.get(edge.a), f.get(edge.b));
            let (p, w) = (f_prime.get(edge.a), f_prime.get(edge.b));
            match kind {
                // (f'(a) − f(b))(λ + e) − (f'(b) − f(a))(λ − e)
                BacklundKind::Linear => {
                    let r = (p - t) * (lambda + e) - (w - s) * (lambda - e);
                    r.norm() / (lambda.norm() + e.norm()).max(1.0) / p.norm().max(w.norm()).max(1.0)
                }
                // (p − s)(t − w) − k (s − t)(w − p), normalized
                BacklundKind::CrossRatio => {
                    let k = lambda * lambda / (e * e);
                    let r = (p - s) * (t - w) - k * (s - t) * (w - p);
                    let scale = (p - s).norm() * (t - w).norm() + k.norm() * (s - t).norm() * (w - p).norm();
                    if scale == 0.0 {
                        0.0
                    } else {
                        r.norm() / scale
                    }
                }
            }
        })
        .collect();
    let per_quad = (0..mesh.n_quads())
        .map(|q| mesh.quad_sides(q).iter().map(|&(e, _)| edge_res[e]).fold(0.0, f64::max))
        .collect();
    Ok(ConstraintReport::from_residuals(mesh, per_quad))
}
