use std::collections::VecDeque;

use num_complex::Complex64;
use serde::Serialize;

use super::ConstraintReport;
use crate::calculus::{corner_values, residue_additive, Function0, Support};
use crate::error::{Error, Result};
use crate::mesh::{check_critical, QuadMesh, VertexId};

/// Result of propagating values along a breadth-first spanning tree of ◇.
#[derive(Clone, Debug, Serialize)]
pub struct Propagation {
    pub values: Function0,
    /// Largest mismatch `|step(a→b) − value(b)| / max(1, |value(b)|)` over
    /// the non-tree edges.
    pub closure_residual: f64,
    pub worst_edge: Option<usize>,
}

/// Breadth-first propagation from `origin`. Neighbours are visited in
/// increasing id order. `step(a, b, Z(b) − Z(a), value(a))` returns the value
/// at `b`; each non-tree edge is then re-evaluated to certify closure.
pub(crate) fn propagate(
    mesh: &QuadMesh,
    origin: VertexId,
    value0: Complex64,
    mut step: impl FnMut(VertexId, VertexId, Complex64, Complex64) -> Result<Complex64>,
) -> Result<Propagation> {
    if mesh.is_periodic() {
        return Err(Error::BadParams("propagation needs a simply connected planar mesh".into()));
    }
    if origin.0 >= mesh.n_vertices() {
        return Err(Error::BadParams(format!("origin {} is not a vertex", origin.0)));
    }
    let adj = mesh.adjacency();
    let mut values: Vec<Option<Complex64>> = vec![None; mesh.n_vertices()];
    let mut tree = vec![false; mesh.edges().len()];
    values[origin.0] = Some(value0);
    let mut queue = VecDeque::from([origin]);
    while let Some(a) = queue.pop_front() {
        let va = values[a.0].unwrap();
        for &(e, b, dz) in &adj[a.0] {
            if values[b.0].is_none() {
                values[b.0] = Some(step(a, b, dz, va)?);
                tree[e] = true;
                queue.push_back(b);
            }
        }
    }
    let values: Vec<Complex64> = values
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::BadParams("mesh is disconnected".into())))
        .collect::<Result<_>>()?;
    let mut closure_residual = 0.0;
    let mut worst_edge = None;
    for e in (0..mesh.edges().len()).filter(|&e| !tree[e]) {
        let edge = mesh.edges()[e];
        let pred = step(edge.a, edge.b, mesh.edge_vector(e), values[edge.a.0])?;
        let actual = values[edge.b.0];
        let r = (pred - actual).norm() / actual.norm().max(1.0);
        if r > closure_residual || r.is_nan() {
            closure_residual = if r.is_nan() { f64::INFINITY } else { r };
            worst_edge = Some(e);
        }
    }
    Ok(Propagation { values: Function0 { support: Support::All, values }, closure_residual, worst_edge })
}

fn report_or_violation(report: ConstraintReport, tol: f64) -> Result<()> {
    if report.passes(tol) {
        Ok(())
    } else {
        Err(Error::MoreraViolation { quad: report.worst_index.unwrap_or(0), residual: report.max_residual })
    }
}

/// `|∮_Q f dZ|` under the multiplicative coupling, relative to the sum of
/// the absolute terms.
pub fn multiplicative_morera_residual(mesh: &QuadMesh, f: &Function0) -> Result<ConstraintReport> {
    f.require_all()?;
    let res = (0..mesh.n_quads())
        .map(|q| {
            let z = mesh.quad_z(q);
            let v = corner_values(mesh, f, q);
            let terms: Vec<Complex64> =
                (0..4).map(|k| v[k] * v[(k + 1) % 4] * (z[(k + 1) % 4] - z[k])).collect();
            let scale: f64 = terms.iter().map(|t| t.norm()).sum();
            let sum: Complex64 = terms.iter().sum();
            if scale == 0.0 {
                0.0
            } else {
                sum.norm() / scale
            }
        })
        .collect();
    Ok(ConstraintReport::from_residuals(mesh, res))
}

fn additive_morera_residual(mesh: &QuadMesh, f: &Function0) -> Result<ConstraintReport> {
    let res = (0..mesh.n_quads())
        .map(|q| {
            let z = mesh.quad_z(q);
            let v = corner_values(mesh, f, q);
            let scale: f64 = (0..4).map(|k| 0.5 * (v[k] + v[(k + 1) % 4]).norm() * (z[(k + 1) % 4] - z[k]).norm()).sum();
            let r = residue_additive(mesh, f, q)?.norm();
            Ok(if scale == 0.0 { 0.0 } else { r / scale })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ConstraintReport::from_residuals(mesh, res))
}

/// Integrates the Hirota system `F(y) − F(x) = f(x)f(y)(Z(y) − Z(x))`.
/// The relative multiplicative Morera residual of `f` must not exceed
/// `morera_tol` on any quad.
pub fn hirota_integrate(
    mesh: &QuadMesh,
    f: &Function0,
    origin: VertexId,
    f0: Complex64,
    morera_tol: f64,
) -> Result<Propagation> {
    report_or_violation(multiplicative_morera_residual(mesh, f)?, morera_tol)?;
    propagate(mesh, origin, f0, |a, b, dz, fa| Ok(fa + f.get(a) * f.get(b) * dz))
}

/// `F(p) = F0 + ∫_origin^p f dZ` under the additive coupling.
pub fn integrate_holomorphic(
    mesh: &QuadMesh,
    f: &Function0,
    origin: VertexId,
    f0: Complex64,
    morera_tol: f64,
) -> Result<Propagation> {
    f.require_all()?;
    report_or_violation(additive_morera_residual(mesh, f)?, morera_tol)?;
    propagate(mesh, origin, f0, |a, b, dz, fa| Ok(fa + 0.5 * (f.get(a) + f.get(b)) * dz))
}

/// `Z^{:0:} = 1` and `Z^{:k+1:} = (k+1)·∫_origin Z^{:k:} dZ`.
pub fn pseudo_power(mesh: &QuadMesh, k: u32, origin: VertexId, morera_tol: f64) -> Result<Function0> {
    let mut f = Function0::constant(mesh, Complex64::new(1.0, 0.0));
    for j in 0..k {
        let p = integrate_holomorphic(mesh, &f, origin, Complex64::new(0.0, 0.0), morera_tol)?;
        f = p.values.map(|v| v * (j + 1) as f64);
    }
    Ok(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BasePoint {
    pub vertex: VertexId,
    /// `"zero"` when `Z(vertex) = 0`, otherwise `"centroid"`.
    pub rule: &'static str,
}

/// A vertex with `Z = 0` if there is one, else the vertex nearest the
/// centroid of all positions (lowest id on ties).
pub fn default_base_point(mesh: &QuadMesh) -> BasePoint {
    let scale = 1e-12 * mesh.mean_edge_length().max(f64::MIN_POSITIVE);
    if let Some(v) = mesh.vertex_ids().find(|&v| mesh.z(v).norm() <= scale) {
        return BasePoint { vertex: v, rule: "zero" };
    }
    let n = mesh.n_vertices().max(1) as f64;
    let centroid: Complex64 = mesh.vertices().iter().map(|v| v.z).sum::<Complex64>() / n;
    let mut best = VertexId(0);
    for v in mesh.vertex_ids() {
        if (mesh.z(v) - centroid).norm() < (mesh.z(best) - centroid).norm() {
            best = v;
        }
    }
    BasePoint { vertex: best, rule: "centroid" }
}

fn require_critical(mesh: &QuadMesh) -> Result<()> {
    let c = check_critical(mesh, None);
    if c.is_critical {
        Ok(())
    } else {
        Err(Error::NotCritical { deviation: c.max_deviation })
    }
}

/// Exponential with edge factor `(2 + λ·dZ)/(2 − λ·dZ)`, normalized to
/// `value0` at `origin`.
pub fn discrete_exponential(
    mesh: &QuadMesh,
    lambda: Complex64,
    origin: VertexId,
    value0: Complex64,
) -> Result<Propagation> {
    require_critical(mesh)?;
    for (e, edge) in mesh.edges().iter().enumerate() {
        let w = lambda * mesh.edge_vector(e);
        if (Complex64::new(2.0, 0.0) - w).norm() <= 1e-12 {
            return Err(Error::PoleAtEdge { from: edge.a, to: edge.b });
        }
        if (Complex64::new(2.0, 0.0) + w).norm() <= 1e-12 {
            return Err(Error::PoleAtEdge { from: edge.b, to: edge.a });
        }
    }
    propagate(mesh, origin, value0, |_, _, dz, fa| Ok(fa * (2.0 + lambda * dz) / (2.0 - lambda * dz)))
}

/// Closed form of the exponential at lattice point `(n, m)` of the square
/// lattice with spacing `delta`, normalized to 1 at the origin.
pub fn exponential_axis_formula(lambda: Complex64, delta: f64, n: i32, m: i32) -> Complex64 {
    let i = Complex64::i();
    let a = (2.0 + lambda * delta) / (2.0 - lambda * delta);
    let b = (2.0 + i * lambda * delta) / (2.0 - i * lambda * delta);
    a.powi(n) * b.powi(m)
}

/// Exponential compatible with the Hirota system: edge factor
/// `r(dZ) = λ·dZ + √(1 + λ²dZ²)`, so that `r(−dZ) = 1/r(dZ)` and
/// `r − 1/r = 2λ·dZ`. It satisfies the multiplicative Morera equation on
/// every parallelogram and tends to `exp(λZ)`.
pub fn hirota_exponential(
    mesh: &QuadMesh,
    lambda: Complex64,
    origin: VertexId,
    value0: Complex64,
) -> Result<Propagation> {
    require_critical(mesh)?;
    propagate(mesh, origin, value0, |_, _, dz, fa| {
        let w = lambda * dz;
        Ok(fa * (w + (1.0 + w * w).sqrt()))
    })
}
