//! Mesh generators: planar lattice patches and flat tori.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Quad, QuadMesh, Shift, Vertex, VertexClass};
use crate::error::{Error, Result};

fn class_of(parity: usize) -> VertexClass {
    if parity % 2 == 0 {
        VertexClass::Gamma
    } else {
        VertexClass::GammaStar
    }
}

fn check_common(n: usize, m: usize, delta: f64) -> Result<()> {
    if n < 2 || m < 2 {
        return Err(Error::BadParams(format!("lattice size {n}x{m} must be at least 2x2")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::BadParams(format!("delta must be positive, got {delta}")));
    }
    Ok(())
}

/// Corners of cell `(i, j)` in the order `(x, y, x', y')` as lattice indices.
fn cell_corners(i: usize, j: usize) -> [(usize, usize); 4] {
    if (i + j) % 2 == 0 {
        [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
    } else {
        [(i + 1, j), (i + 1, j + 1), (i, j + 1), (i, j)]
    }
}

fn lattice_patch(n: usize, m: usize, u: Complex64, v: Complex64) -> Result<QuadMesh> {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (m + 1));
    for j in 0..=m {
        for i in 0..=n {
            vertices.push(Vertex {
                class: class_of(i + j),
                z: u * i as f64 + v * j as f64,
            });
        }
    }
    let mut quads = Vec::with_capacity(n * m);
    for j in 0..m {
        for i in 0..n {
            let c = cell_corners(i, j).map(|(a, b)| id(a, b));
            quads.push(Quad::new(c[0], c[1], c[2], c[3]));
        }
    }
    QuadMesh::new(vertices, quads)
}

/// `n × m` patch of the square lattice with spacing `delta`.
pub fn square(n: usize, m: usize, delta: f64) -> Result<QuadMesh> {
    check_common(n, m, delta)?;
    lattice_patch(n, m, Complex64::new(delta, 0.0), Complex64::new(0.0, delta))
}

/// `n × m` patch of rhombi with side `delta` and interior angle `angle`.
pub fn rhombic(n: usize, m: usize, delta: f64, angle: f64) -> Result<QuadMesh> {
    check_common(n, m, delta)?;
    if !(angle > 0.0 && angle < PI) {
        return Err(Error::BadParams(format!("angle must lie in (0, pi), got {angle}")));
    }
    lattice_patch(
        n,
        m,
        Complex64::new(delta, 0.0),
        Complex64::from_polar(delta, angle),
    )
}

/// Quad-graph of the triangular lattice (Γ) and its dual hexagonal lattice
/// (Γ*), over an `n × n` parallelogram of triangle pairs. Every quad is a
/// rhombus with side `delta` and angles 60°/120°.
pub fn tri_hex(n: usize, delta: f64) -> Result<QuadMesh> {
    check_common(n, n, delta)?;
    let a = delta * 3f64.sqrt();
    let omega = Complex64::from_polar(1.0, PI / 3.0);
    let p = |i: usize, j: usize| (Complex64::new(i as f64, 0.0) + omega * j as f64) * a;
    let pid = |i: usize, j: usize| j * (n + 1) + i;
    let n_points = (n + 1) * (n + 1);

    let mut centres: Vec<Complex64> = Vec::new();
    // lattice edge (lo, hi) -> triangle centres containing it
    let mut edge_tris: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut add_tri = |tri: [(usize, usize); 3], centres: &mut Vec<Complex64>| {
        let c = (p(tri[0].0, tri[0].1) + p(tri[1].0, tri[1].1) + p(tri[2].0, tri[2].1)) / 3.0;
        let t = centres.len();
        centres.push(c);
        for k in 0..3 {
            let s = pid(tri[k].0, tri[k].1);
            let e = pid(tri[(k + 1) % 3].0, tri[(k + 1) % 3].1);
            edge_tris.entry((s.min(e), s.max(e))).or_default().push(t);
        }
    };
    for j in 0..n {
        for i in 0..n {
            add_tri([(i, j), (i + 1, j), (i, j + 1)], &mut centres);
            add_tri([(i + 1, j), (i + 1, j + 1), (i, j + 1)], &mut centres);
        }
    }
    let point_z: Vec<Complex64> = (0..n_points).map(|k| p(k % (n + 1), k / (n + 1))).collect();

    // (p, c_right, p', c_left) per interior lattice edge
    let mut raw = Vec::new();
    for (&(s, e), tris) in &edge_tris {
        if tris.len() != 2 {
            continue;
        }
        let d = point_z[e] - point_z[s];
        let side = |t: usize| (d.conj() * (centres[t] - point_z[s])).im;
        let (l, r) = if side(tris[0]) > 0.0 {
            (tris[0], tris[1])
        } else {
            (tris[1], tris[0])
        };
        raw.push((s, r, e, l));
    }

    // keep only used vertices, lattice points first
    let mut point_map = vec![usize::MAX; n_points];
    let mut centre_map = vec![usize::MAX; centres.len()];
    for &(s, _, e, _) in &raw {
        point_map[s] = 0;
        point_map[e] = 0;
    }
    for &(_, r, _, l) in &raw {
        centre_map[r] = 0;
        centre_map[l] = 0;
    }
    let mut vertices = Vec::new();
    for (k, slot) in point_map.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = vertices.len();
            vertices.push(Vertex { class: VertexClass::Gamma, z: point_z[k] });
        }
    }
    for (k, slot) in centre_map.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = vertices.len();
            vertices.push(Vertex { class: VertexClass::GammaStar, z: centres[k] });
        }
    }
    let quads = raw
        .iter()
        .map(|&(s, r, e, l)| Quad::new(point_map[s], centre_map[r], point_map[e], centre_map[l]))
        .collect();
    QuadMesh::new(vertices, quads)
}

fn periodic_lattice(n: usize, m: usize, u: Complex64, v: Complex64) -> Result<QuadMesh> {
    if n % 2 != 0 || m % 2 != 0 {
        return Err(Error::BadParams(format!(
            "torus dimensions must be even for a bipartite gluing, got {n}x{m}"
        )));
    }
    let id = |i: usize, j: usize| j * n + i;
    let mut vertices = Vec::with_capacity(n * m);
    for j in 0..m {
        for i in 0..n {
            vertices.push(Vertex { class: class_of(i + j), z: u * i as f64 + v * j as f64 });
        }
    }
    let mut quads = Vec::with_capacity(n * m);
    let mut shifts: Vec<[Shift; 4]> = Vec::with_capacity(n * m);
    for j in 0..m {
        for i in 0..n {
            let c = cell_corners(i, j);
            let wrap = |(a, b): (usize, usize)| {
                let s = [(a / n) as i32, (b / m) as i32];
                (id(a % n, b % m), s)
            };
            let w = c.map(wrap);
            quads.push(Quad::new(w[0].0, w[1].0, w[2].0, w[3].0));
            shifts.push([w[0].1, w[1].1, w[2].1, w[3].1]);
        }
    }
    QuadMesh::periodic(vertices, quads, [u * n as f64, v * m as f64], shifts)
}

/// Periodic `n × m` square lattice with periods `nδ` and `i·mδ`.
pub fn torus(n: usize, m: usize, delta: f64) -> Result<QuadMesh> {
    check_common(n, m, delta)?;
    periodic_lattice(n, m, Complex64::new(delta, 0.0), Complex64::new(0.0, delta))
}

/// Periodic lattice of `delta × aspect·delta` rectangles. The mesh is
/// critical only for `aspect = 1`.
pub fn rectangle_torus(n: usize, m: usize, delta: f64, aspect: f64) -> Result<QuadMesh> {
    check_common(n, m, delta)?;
    if !(aspect > 0.0 && aspect.is_finite()) {
        return Err(Error::BadParams(format!("aspect must be positive, got {aspect}")));
    }
    periodic_lattice(
        n,
        m,
        Complex64::new(delta, 0.0),
        Complex64::new(0.0, delta * aspect),
    )
}

/// Moves every vertex by a uniform random offset in the disk of radius
/// `amplitude · mean_edge_length`. Deterministic for a given seed.
pub fn perturb(mesh: &QuadMesh, amplitude: f64, seed: u64) -> QuadMesh {
    let scale = amplitude * mesh.mean_edge_length();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets: Vec<Complex64> = (0..mesh.n_vertices())
        .map(|_| {
            let r = scale * rng.gen::<f64>().sqrt();
            let t = rng.gen_range(0.0..2.0 * PI);
            Complex64::from_polar(r, t)
        })
        .collect();
    mesh.remapped(|v, z| z + offsets[v.0])
}
