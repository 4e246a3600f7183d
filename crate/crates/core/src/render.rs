//! Polygonal-pattern pictures of discrete maps and their SVG output.
//!
//! Every vertex `v` of ◇ becomes a polygon centred at `f(v)`, with one corner
//! per ◇ neighbour `n`, placed at `f(v) + a_v·(Z(n) − Z(v))/2`. The
//! coefficient `a_v` is the least-squares similarity fit of
//! `f(n) − f(v) ≈ a_v·(Z(n) − Z(v))`. For `f = Z` this is the reference
//! pattern shrunk by one half, in which the polygons of `v` and `n` touch at
//! the midpoint of their edge.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::calculus::Function0;
use crate::error::Result;
use crate::mesh::{QuadMesh, VertexClass, VertexId};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polygon {
    pub vertex: VertexId,
    pub center: Complex64,
    /// Similarity coefficient `a_v`.
    pub scale: Complex64,
    pub vertices: Vec<Complex64>,
    pub stroke: String,
    pub fill: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ViewBox {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternScene {
    pub polygons: Vec<Polygon>,
    pub viewbox: ViewBox,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MismatchReport {
    /// Largest gap between the two corners that should touch on a ◇ edge with
    /// two interior endpoints.
    pub max: f64,
    /// Same, divided by `|Z(n) − Z(v)|·|a_v|` for the Γ endpoint `v`.
    pub max_relative: f64,
    /// Relative gap on edges touching a vertex with an open fan, where the
    /// similarity fit only sees one side.
    pub boundary_max_relative: f64,
}

/// ◇ neighbours of `v` in counterclockwise fan order.
fn ring(mesh: &QuadMesh, v: VertexId) -> Vec<VertexId> {
    let fan = mesh.fan(v);
    let mut out: Vec<VertexId> = fan.corners.iter().map(|&(q, k)| mesh.quad(q).corners()[(k + 1) % 4]).collect();
    if !fan.closed {
        if let Some(&(q, k)) = fan.corners.last() {
            out.push(mesh.quad(q).corners()[(k + 3) % 4]);
        }
    }
    out
}

fn similarity(mesh: &QuadMesh, f: &Function0, v: VertexId, ring: &[VertexId]) -> Complex64 {
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for &n in ring {
        let dz = mesh.z(n) - mesh.z(v);
        num += dz.conj() * (f.get(n) - f.get(v));
        den += dz.norm_sqr();
    }
    if den == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        num / den
    }
}

fn corner(mesh: &QuadMesh, f: &Function0, v: VertexId, a: Complex64, n: VertexId) -> Complex64 {
    f.get(v) + a * (mesh.z(n) - mesh.z(v)) / 2.0
}

/// Builds the pattern of `f`. Vertices with fewer than three ◇ neighbours
/// are skipped.
pub fn render_pattern(mesh: &QuadMesh, f: &Function0) -> Result<PatternScene> {
    f.require_all()?;
    let mut polygons = Vec::new();
    for v in mesh.vertex_ids() {
        let r = ring(mesh, v);
        if r.len() < 3 {
            continue;
        }
        let a = similarity(mesh, f, v, &r);
        let (stroke, fill) = match mesh.class(v) {
            VertexClass::Gamma => ("#1f3a93", "#aec6f0"),
            VertexClass::GammaStar => ("#93401f", "#f0c8ae"),
        };
        polygons.push(Polygon {
            vertex: v,
            center: f.get(v),
            scale: a,
            vertices: r.iter().map(|&n| corner(mesh, f, v, a, n)).collect(),
            stroke: stroke.into(),
            fill: fill.into(),
        });
    }
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for z in polygons.iter().flat_map(|p| &p.vertices) {
        min = [min[0].min(z.re), min[1].min(z.im)];
        max = [max[0].max(z.re), max[1].max(z.im)];
    }
    if polygons.is_empty() {
        (min, max) = ([0.0; 2], [1.0; 2]);
    }
    Ok(PatternScene { polygons, viewbox: ViewBox { min, max } })
}

/// Measures how far the two polygons on each ◇ edge are from touching.
pub fn shared_vertex_mismatch(mesh: &QuadMesh, f: &Function0) -> Result<MismatchReport> {
    f.require_all()?;
    let coeff: Vec<Complex64> = mesh.vertex_ids().map(|v| similarity(mesh, f, v, &ring(mesh, v))).collect();
    let mut report = MismatchReport { max: 0.0, max_relative: 0.0, boundary_max_relative: 0.0 };
    for e in mesh.edges() {
        let (mut x, mut y) = (e.a, e.b);
        if mesh.class(x) != VertexClass::Gamma {
            std::mem::swap(&mut x, &mut y);
        }
        let gap = (corner(mesh, f, x, coeff[x.0], y) - corner(mesh, f, y, coeff[y.0], x)).norm();
        let scale = (mesh.z(y) - mesh.z(x)).norm() * coeff[x.0].norm();
        let rel = if scale > 0.0 { gap / scale } else { f64::INFINITY };
        if mesh.is_interior(x) && mesh.is_interior(y) {
            report.max = report.max.max(gap);
            report.max_relative = report.max_relative.max(rel);
        } else {
            report.boundary_max_relative = report.boundary_max_relative.max(rel);
        }
    }
    Ok(report)
}

/// Decimal rendering with six significant digits and no exponent.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    let decimals = (5 - e).max(0) as usize;
    let step = 10f64.powi(e - 5);
    let rounded = if e > 5 { (x / step).round() * step } else { x };
    let mut s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Standalone SVG 1.1 document. The imaginary axis points up.
pub fn svg_string(scene: &PatternScene) -> String {
    let ViewBox { min, max } = scene.viewbox;
    let (w, h) = ((max[0] - min[0]).max(1e-12), (max[1] - min[1]).max(1e-12));
    let pad = 0.02 * w.max(h);
    let stroke_width = 0.002 * w.max(h);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">",
        format_sig6(min[0] - pad),
        format_sig6(-max[1] - pad),
        format_sig6(w + 2.0 * pad),
        format_sig6(h + 2.0 * pad)
    );
    let _ = writeln!(out, "<g stroke-width=\"{}\" stroke-linejoin=\"round\">", format_sig6(stroke_width));
    for p in &scene.polygons {
        let pts: Vec<String> =
            p.vertices.iter().map(|z| format!("{},{}", format_sig6(z.re), format_sig6(-z.im))).collect();
        let _ = writeln!(out, "<polygon points=\"{}\" stroke=\"{}\" fill=\"{}\"/>", pts.join(" "), p.stroke, p.fill);
    }
    out.push_str("</g>\n</svg>\n");
    out
}

pub fn emit_svg(scene: &PatternScene, path: &Path) -> Result<()> {
    std::fs::write(path, svg_string(scene))?;
    Ok(())
}
