use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use serde::Serialize;

use crate::calculus::Function0;
use crate::error::{Error, Result};
use crate::holomorphy::check_weights;
use crate::linalg::SolverConfig;
use crate::mesh::{QuadMesh, VertexClass, VertexId};

use super::green::green_function;

#[derive(Clone, Debug, Serialize)]
pub struct CauchyResult {
    pub value: Complex64,
    /// `(f(x) + f(y))/2`.
    pub expected: Complex64,
    pub error: f64,
    pub contour_length: usize,
}

/// Boundary cycle of the quads whose centroid lies in the open square window
/// `max(|Re|, |Im|) < half_width` around `Z(center)`. The cycle runs
/// counterclockwise and starts and ends at the same Γ vertex.
pub fn window_contour(mesh: &QuadMesh, center: VertexId, half_width: f64) -> Result<Vec<VertexId>> {
    let c = mesh.z(center);
    let selected: Vec<usize> = (0..mesh.n_quads())
        .filter(|&q| {
            let d = mesh.quad_z(q).iter().sum::<Complex64>() / 4.0 - c;
            d.re.abs().max(d.im.abs()) < half_width
        })
        .collect();
    quad_region_boundary(mesh, &selected)
}

/// Oriented boundary cycle of a set of quads.
pub fn quad_region_boundary(mesh: &QuadMesh, quads: &[usize]) -> Result<Vec<VertexId>> {
    let mut directed = HashSet::new();
    for &q in quads {
        let c = mesh.quad(q).corners();
        for k in 0..4 {
            directed.insert((c[k], c[(k + 1) % 4]));
        }
    }
    let mut next: HashMap<VertexId, VertexId> = HashMap::new();
    for &(a, b) in &directed {
        if !directed.contains(&(b, a)) && next.insert(a, b).is_some() {
            return Err(Error::ContourNotClosed);
        }
    }
    let start = next
        .keys()
        .filter(|v| mesh.class(**v) == VertexClass::Gamma)
        .min()
        .copied()
        .ok_or(Error::ContourNotClosed)?;
    let mut seq = vec![start];
    loop {
        let &b = next.get(seq.last().unwrap()).ok_or(Error::ContourNotClosed)?;
        seq.push(b);
        if b == start {
            break;
        }
        if seq.len() > next.len() + 1 {
            return Err(Error::ContourNotClosed);
        }
    }
    if seq.len() != next.len() + 1 {
        return Err(Error::ContourNotClosed);
    }
    Ok(seq)
}

/// Sum over the quads around `v`, counterclockwise from the one containing
/// the side `(v, a)` as `v → corner k+1` up to the one whose side `(corner
/// k−1, v)` ends at `b`. Each quad contributes the Γ* increment of the
/// conjugate of `g` (when `v` is on Γ) or the Γ increment (when on Γ*).
fn fan_increment(mesh: &QuadMesh, v: VertexId, a: VertexId, b: VertexId, g: &Function0) -> Result<f64> {
    let fan = mesh.fan(v);
    if !fan.closed {
        return Err(Error::ContourNotClosed);
    }
    let n = fan.corners.len();
    let start = fan
        .corners
        .iter()
        .position(|&(q, k)| mesh.quad(q).corners()[(k + 1) % 4] == a)
        .ok_or(Error::ContourNotClosed)?;
    let mut total = 0.0;
    for i in 0..n {
        let (q, k) = fan.corners[(start + i) % n];
        let c = mesh.quad(q).corners();
        let rho = mesh.rho(q)?.re;
        total += if mesh.class(v) == VertexClass::Gamma {
            let s = if k == 0 { 1.0 } else { -1.0 };
            s * rho * (g.get(c[2]) - g.get(c[0])).re
        } else {
            let s = if k == 1 { 1.0 } else { -1.0 };
            s * (g.get(c[3]) - g.get(c[1])).re / rho
        };
        if c[(k + 3) % 4] == b {
            return Ok(total);
        }
    }
    Err(Error::ContourNotClosed)
}

/// Evaluates `i·∮ f dL` along a closed ◇ contour, where `L = G_x + i·G̃_y`
/// on Γ and `i·G̃_x + G_y` on Γ*, with `G_x`, `G_y` the Dirichlet Green
/// functions of radius `green_radius` at `x ∈ Γ` and `y ∈ Γ*` and `G̃` their
/// conjugates continued along the contour. For `f` holomorphic inside the
/// contour the result is `(f(x) + f(y))/2`, and zero when neither source is
/// enclosed.
pub fn cauchy_integral(
    mesh: &QuadMesh,
    f: &Function0,
    x: VertexId,
    y: VertexId,
    contour: &[VertexId],
    green_radius: f64,
    config: &SolverConfig,
) -> Result<CauchyResult> {
    f.require_all()?;
    if mesh.class(x) != VertexClass::Gamma || mesh.class(y) != VertexClass::GammaStar {
        return Err(Error::BadParams("x must lie on Γ and y on Γ*".into()));
    }
    check_weights(mesh)?;
    if contour.len() < 5 || contour.first() != contour.last() {
        return Err(Error::ContourNotClosed);
    }
    for w in contour.windows(2) {
        if mesh.find_edge(w[0], w[1]).is_none() {
            return Err(Error::ContourNotClosed);
        }
    }
    for &s in &[x, y] {
        if contour.contains(&s) {
            return Err(Error::SourceOnContour(s));
        }
    }
    let gx = green_function(mesh, x, green_radius, config)?;
    let gy = green_function(mesh, y, green_radius, config)?;
    for &v in contour {
        let dom = if mesh.class(v) == VertexClass::Gamma { &gx.domain } else { &gy.domain };
        if !dom[v.0] {
            return Err(Error::BadParams(format!("Green radius {green_radius} does not cover the contour")));
        }
    }
    // The cycle must start on Γ; rotate if needed.
    let body = &contour[..contour.len() - 1];
    let first = body.iter().position(|&v| mesh.class(v) == VertexClass::Gamma).ok_or(Error::ContourNotClosed)?;
    let mut seq: Vec<VertexId> = body[first..].iter().chain(&body[..first]).copied().collect();
    seq.push(seq[0]);

    let (mut gt, mut gst) = (0.0, 0.0);
    let mut l = Vec::with_capacity(seq.len());
    for k in 0..seq.len() {
        let v = seq[k];
        if k >= 2 {
            if mesh.class(v) == VertexClass::GammaStar {
                gt += fan_increment(mesh, seq[k - 1], seq[k - 2], v, &gx.values)?;
            } else {
                gst += fan_increment(mesh, seq[k - 1], seq[k - 2], v, &gy.values)?;
            }
        }
        l.push(match mesh.class(v) {
            VertexClass::Gamma => Complex64::new(gx.values.get(v).re, gst),
            VertexClass::GammaStar => Complex64::new(gy.values.get(v).re, gt),
        });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..seq.len() - 1 {
        sum += (f.get(seq[k]) + f.get(seq[k + 1])) / 2.0 * (l[k + 1] - l[k]);
    }
    let value = Complex64::i() * sum;
    let expected = (f.get(x) + f.get(y)) / 2.0;
    Ok(CauchyResult { value, expected, error: (value - expected).norm(), contour_length: seq.len() - 1 })
}
