//! Bipartite quad-graphs embedded in the complex plane.
//!
//! A [`QuadMesh`] stores vertices (with their class and position) and quads
//! `(x, y, x', y')` listed counterclockwise, where `x, x'` belong to the
//! graph Γ and `y, y'` to the dual graph Γ*. The diagonal `(x, x')` is the
//! Γ-edge of the quad and `(y, y')` the Γ*-edge; in a positively oriented
//! quad the Γ*-diagonal is the Γ-diagonal turned by +90° and scaled by ρ.
//!
//! Flat tori are stored on the universal cover: each quad corner carries an
//! integer lattice shift, so the corner position is `z + a·P₁ + b·P₂`.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod dual;
pub mod generate;
pub mod io;
mod validate;

pub use dual::{DualEdge, DualGraph};
pub use validate::{check_critical, validate, Criticality, ValidationReport, Violation};
pub(crate) use validate::rho_is_real_positive;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexClass {
    Gamma,
    GammaStar,
}

impl VertexClass {
    pub fn dual(self) -> Self {
        match self {
            VertexClass::Gamma => VertexClass::GammaStar,
            VertexClass::GammaStar => VertexClass::Gamma,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex {
    pub class: VertexClass,
    pub z: Complex64,
}

/// Corners `(x, y, x', y')` in counterclockwise order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 4]", into = "[usize; 4]")]
pub struct Quad {
    pub x: VertexId,
    pub y: VertexId,
    pub xp: VertexId,
    pub yp: VertexId,
}

impl Quad {
    pub fn new(x: usize, y: usize, xp: usize, yp: usize) -> Self {
        Quad {
            x: VertexId(x),
            y: VertexId(y),
            xp: VertexId(xp),
            yp: VertexId(yp),
        }
    }

    pub fn corners(&self) -> [VertexId; 4] {
        [self.x, self.y, self.xp, self.yp]
    }
}

impl From<[usize; 4]> for Quad {
    fn from(c: [usize; 4]) -> Self {
        Quad::new(c[0], c[1], c[2], c[3])
    }
}

impl From<Quad> for [usize; 4] {
    fn from(q: Quad) -> Self {
        [q.x.0, q.y.0, q.xp.0, q.yp.0]
    }
}

/// Integer multiples of the two lattice periods.
pub type Shift = [i32; 2];

fn shift_sub(a: Shift, b: Shift) -> Shift {
    [a[0] - b[0], a[1] - b[1]]
}

/// Periodic gluing of a flat torus.
#[derive(Clone, Debug, PartialEq)]
pub struct Periodicity {
    pub periods: [Complex64; 2],
    /// Per quad, the lattice shift of each corner relative to its vertex.
    pub corner_shifts: Vec<[Shift; 4]>,
}

impl Periodicity {
    pub fn offset(&self, s: Shift) -> Complex64 {
        self.periods[0] * s[0] as f64 + self.periods[1] * s[1] as f64
    }
}

/// An unoriented ◇ edge stored with canonical orientation `a -> b`.
/// `shift` is the lattice shift of `b` relative to `a` on the cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub shift: Shift,
}

/// Incident quads around a vertex, counterclockwise. Each entry is
/// `(quad, corner)`. `closed` is false for boundary vertices.
#[derive(Clone, Debug, Default)]
pub struct Fan {
    pub corners: Vec<(usize, usize)>,
    pub closed: bool,
}

#[derive(Clone, Debug)]
pub struct QuadMesh {
    vertices: Vec<Vertex>,
    quads: Vec<Quad>,
    periodicity: Option<Periodicity>,
    edges: Vec<Edge>,
    /// Side `k` of a quad runs from corner `k` to corner `k+1`;
    /// stores `(edge, forward)`.
    quad_sides: Vec<[(usize, bool); 4]>,
    edge_quads: Vec<Vec<(usize, usize)>>,
    fans: Vec<Fan>,
    rho: Vec<Option<Complex64>>,
    edge_lookup: HashMap<(VertexId, VertexId), (usize, bool)>,
}

impl QuadMesh {
    /// Builds a planar mesh. Only structural problems (indices out of range)
    /// are errors here; geometric and combinatorial rules are checked by
    /// [`validate`].
    pub fn new(vertices: Vec<Vertex>, quads: Vec<Quad>) -> Result<Self> {
        Self::build(vertices, quads, None)
    }

    pub fn periodic(
        vertices: Vec<Vertex>,
        quads: Vec<Quad>,
        periods: [Complex64; 2],
        corner_shifts: Vec<[Shift; 4]>,
    ) -> Result<Self> {
        if corner_shifts.len() != quads.len() {
            return Err(Error::BadParams(format!(
                "{} corner shift records for {} quads",
                corner_shifts.len(),
                quads.len()
            )));
        }
        Self::build(
            vertices,
            quads,
            Some(Periodicity {
                periods,
                corner_shifts,
            }),
        )
    }

    fn build(
        vertices: Vec<Vertex>,
        quads: Vec<Quad>,
        periodicity: Option<Periodicity>,
    ) -> Result<Self> {
        let nv = vertices.len();
        for (qi, q) in quads.iter().enumerate() {
            for c in q.corners() {
                if c.0 >= nv {
                    return Err(Error::BadParams(format!(
                        "quad {qi} references vertex {} but only {nv} vertices exist",
                        c.0
                    )));
                }
            }
        }

        // Collect canonical edges, then renumber them lexicographically.
        let mut keys: HashMap<(usize, usize, Shift), ()> = HashMap::new();
        let mut side_keys = Vec::with_capacity(quads.len());
        for (qi, q) in quads.iter().enumerate() {
            let c = q.corners();
            let mut sides = [((0, 0, [0, 0]), true); 4];
            for k in 0..4 {
                let (a, b) = (c[k].0, c[(k + 1) % 4].0);
                let rel = match &periodicity {
                    Some(p) => shift_sub(p.corner_shifts[qi][(k + 1) % 4], p.corner_shifts[qi][k]),
                    None => [0, 0],
                };
                let neg = [-rel[0], -rel[1]];
                let (key, forward) = if a < b || (a == b && rel >= neg) {
                    ((a, b, rel), true)
                } else {
                    ((b, a, neg), false)
                };
                keys.insert(key, ());
                sides[k] = (key, forward);
            }
            side_keys.push(sides);
        }
        let mut sorted: Vec<(usize, usize, Shift)> = keys.into_keys().collect();
        sorted.sort();
        let index: HashMap<(usize, usize, Shift), usize> =
            sorted.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let edges: Vec<Edge> = sorted
            .iter()
            .map(|&(a, b, s)| Edge {
                a: VertexId(a),
                b: VertexId(b),
                shift: s,
            })
            .collect();

        let mut edge_quads = vec![Vec::new(); edges.len()];
        let quad_sides: Vec<[(usize, bool); 4]> = side_keys
            .iter()
            .enumerate()
            .map(|(qi, sides)| {
                let mut out = [(0, true); 4];
                for k in 0..4 {
                    let e = index[&sides[k].0];
                    edge_quads[e].push((qi, k));
                    out[k] = (e, sides[k].1);
                }
                out
            })
            .collect();

        let mut mesh = QuadMesh {
            vertices,
            quads,
            periodicity,
            edges,
            quad_sides,
            edge_quads,
            fans: Vec::new(),
            rho: Vec::new(),
            edge_lookup: HashMap::new(),
        };
        let mut incident = vec![Vec::new(); nv];
        for (qi, q) in mesh.quads.iter().enumerate() {
            for (k, c) in q.corners().iter().enumerate() {
                incident[c.0].push((qi, k));
            }
        }
        mesh.fans = incident.iter().map(|all| mesh.build_fan(all)).collect();
        for (e, edge) in mesh.edges.iter().enumerate() {
            mesh.edge_lookup.entry((edge.a, edge.b)).or_insert((e, true));
            mesh.edge_lookup.entry((edge.b, edge.a)).or_insert((e, false));
        }
        mesh.rho = (0..mesh.quads.len())
            .map(|q| {
                let z = mesh.quad_z(q);
                let dx = z[2] - z[0];
                if dx.norm() == 0.0 {
                    None
                } else {
                    Some((z[3] - z[1]) / (Complex64::i() * dx))
                }
            })
            .collect();
        Ok(mesh)
    }

    /// The corner following `(q, k)` counterclockwise around its vertex.
    fn fan_next(&self, q: usize, k: usize) -> Option<(usize, usize)> {
        let (e, _) = self.quad_sides[q][(k + 3) % 4];
        self.edge_quads[e]
            .iter()
            .find(|&&(q2, s2)| (q2, s2) != (q, (k + 3) % 4))
            .map(|&(q2, s2)| (q2, s2))
    }

    fn fan_prev(&self, q: usize, k: usize) -> Option<(usize, usize)> {
        let (e, _) = self.quad_sides[q][k];
        self.edge_quads[e]
            .iter()
            .find(|&&(q2, s2)| (q2, s2) != (q, k))
            .map(|&(q2, s2)| (q2, (s2 + 1) % 4))
    }

    fn build_fan(&self, all: &[(usize, usize)]) -> Fan {
        let Some(&first) = all.first() else {
            return Fan::default();
        };
        // Walk clockwise to the start of an open fan.
        let mut start = first;
        let mut closed = false;
        let mut guard = 0;
        while let Some(p) = self.fan_prev(start.0, start.1) {
            if p == first {
                closed = true;
                break;
            }
            start = p;
            guard += 1;
            if guard > all.len() {
                break;
            }
        }
        let mut corners = vec![start];
        let mut cur = start;
        while let Some(n) = self.fan_next(cur.0, cur.1) {
            if n == start || corners.len() > all.len() {
                break;
            }
            corners.push(n);
            cur = n;
        }
        let closed = closed && corners.len() == all.len();
        Fan { corners, closed }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_quads(&self) -> usize {
        self.quads.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn quads(&self) -> &[Quad] {
        &self.quads
    }

    pub fn quad(&self, q: usize) -> Quad {
        self.quads[q]
    }

    pub fn z(&self, v: VertexId) -> Complex64 {
        self.vertices[v.0].z
    }

    pub fn class(&self, v: VertexId) -> VertexClass {
        self.vertices[v.0].class
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn class_vertices(&self, class: VertexClass) -> Vec<VertexId> {
        self.vertex_ids().filter(|&v| self.class(v) == class).collect()
    }

    pub fn periodicity(&self) -> Option<&Periodicity> {
        self.periodicity.as_ref()
    }

    pub fn is_periodic(&self) -> bool {
        self.periodicity.is_some()
    }

    pub fn corner_shift(&self, q: usize, k: usize) -> Shift {
        self.periodicity
            .as_ref()
            .map_or([0, 0], |p| p.corner_shifts[q][k])
    }

    /// Position of corner `k` of quad `q` on the universal cover.
    pub fn corner_z(&self, q: usize, k: usize) -> Complex64 {
        let v = self.quads[q].corners()[k];
        let z = self.z(v);
        match &self.periodicity {
            Some(p) => z + p.offset(p.corner_shifts[q][k]),
            None => z,
        }
    }

    pub fn quad_z(&self, q: usize) -> [Complex64; 4] {
        [
            self.corner_z(q, 0),
            self.corner_z(q, 1),
            self.corner_z(q, 2),
            self.corner_z(q, 3),
        ]
    }

    /// Signed area of the quad, ½·Im(conj(x'−x)·(y'−y)).
    pub fn signed_area(&self, q: usize) -> f64 {
        let z = self.quad_z(q);
        0.5 * ((z[2] - z[0]).conj() * (z[3] - z[1])).im
    }

    /// ρ of the quad, defined by `Z(y') − Z(y) = iρ·(Z(x') − Z(x))`.
    /// The Γ*-diagonal carries the weight `1/ρ`.
    pub fn rho(&self, q: usize) -> Result<Complex64> {
        self.rho[q].ok_or(Error::DegenerateQuad {
            quad: q,
            reason: "Z(x') = Z(x)",
        })
    }

    /// Cross-ratio `(x−y)(x'−y') / ((y−x')(y'−x))` of the embedding.
    pub fn cross_ratio_q(&self, q: usize) -> Result<Complex64> {
        let [x, y, xp, yp] = self.quad_z(q);
        cross_ratio(x, y, xp, yp).ok_or(Error::DegenerateQuad {
            quad: q,
            reason: "vanishing cross-ratio denominator",
        })
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `Z(b) − Z(a)` on the cover for edge `e`.
    pub fn edge_vector(&self, e: usize) -> Complex64 {
        let edge = self.edges[e];
        let off = match &self.periodicity {
            Some(p) => p.offset(edge.shift),
            None => Complex64::new(0.0, 0.0),
        };
        self.z(edge.b) + off - self.z(edge.a)
    }

    pub fn quad_sides(&self, q: usize) -> [(usize, bool); 4] {
        self.quad_sides[q]
    }

    pub fn edge_quads(&self, e: usize) -> &[(usize, usize)] {
        &self.edge_quads[e]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_quads[e].len() == 1
    }

    pub fn boundary_edges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.is_boundary_edge(e))
            .collect()
    }

    pub fn fan(&self, v: VertexId) -> &Fan {
        &self.fans[v.0]
    }

    /// A vertex is interior when its incident quads close up around it.
    pub fn is_interior(&self, v: VertexId) -> bool {
        self.fans[v.0].closed
    }

    pub fn is_closed(&self) -> bool {
        self.edge_quads.iter().all(|q| q.len() == 2)
    }

    /// Adjacency of the ◇ graph: for each vertex, `(edge, neighbour, dz)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, VertexId, Complex64)>> {
        let mut adj: Vec<Vec<(usize, VertexId, Complex64)>> = vec![Vec::new(); self.n_vertices()];
        for (e, edge) in self.edges.iter().enumerate() {
            let d = self.edge_vector(e);
            adj[edge.a.0].push((e, edge.b, d));
            adj[edge.b.0].push((e, edge.a, -d));
        }
        for list in &mut adj {
            list.sort_by_key(|&(e, n, _)| (n, e));
        }
        adj
    }

    /// Look up the ◇ edge joining `a` and `b`, returning `(edge, forward)`.
    pub fn find_edge(&self, a: VertexId, b: VertexId) -> Option<(usize, bool)> {
        self.edge_lookup.get(&(a, b)).copied()
    }

    /// Returns a copy with every position translated by `c`.
    pub fn translated(&self, c: Complex64) -> QuadMesh {
        let vertices = self
            .vertices
            .iter()
            .map(|v| Vertex { class: v.class, z: v.z + c })
            .collect();
        let rebuilt = QuadMesh::build(vertices, self.quads.clone(), self.periodicity.clone());
        rebuilt.expect("translation preserves structure")
    }

    /// Returns a copy with positions replaced by `f(z)`; topology unchanged.
    pub fn remapped(&self, f: impl Fn(VertexId, Complex64) -> Complex64) -> QuadMesh {
        let vertices = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| Vertex { class: v.class, z: f(VertexId(i), v.z) })
            .collect();
        QuadMesh::build(vertices, self.quads.clone(), self.periodicity.clone())
            .expect("remapping preserves structure")
    }

    /// Returns a copy with some vertex classes replaced.
    pub fn with_class(&self, v: VertexId, class: VertexClass) -> QuadMesh {
        let mut vertices = self.vertices.clone();
        vertices[v.0].class = class;
        QuadMesh::build(vertices, self.quads.clone(), self.periodicity.clone())
            .expect("class change preserves structure")
    }

    /// Dual-graph neighbours of `v` through each incident quad:
    /// `(quad, neighbour, weight, Z(neighbour) − Z(v))`. The weight is ρ for
    /// Γ vertices and 1/ρ for Γ* vertices.
    pub fn diagonal_neighbours(&self, v: VertexId) -> Result<Vec<(usize, VertexId, Complex64, Complex64)>> {
        let mut out = Vec::new();
        for &(q, k) in &self.fans[v.0].corners {
            let opp = (k + 2) % 4;
            let rho = self.rho(q)?;
            let w = if k % 2 == 0 { rho } else { rho.inv() };
            let n = self.quads[q].corners()[opp];
            out.push((q, n, w, self.corner_z(q, opp) - self.corner_z(q, k)));
        }
        Ok(out)
    }

    /// Typical edge length (mean over ◇ edges).
    pub fn mean_edge_length(&self) -> f64 {
        if self.edges.is_empty() {
            return 0.0;
        }
        (0..self.edges.len())
            .map(|e| self.edge_vector(e).norm())
            .sum::<f64>()
            / self.edges.len() as f64
    }
}

pub(crate) fn cross_ratio(
    x: Complex64,
    y: Complex64,
    xp: Complex64,
    yp: Complex64,
) -> Option<Complex64> {
    let den = (y - xp) * (yp - x);
    if den.norm() == 0.0 {
        None
    } else {
        Some((x - y) * (xp - yp) / den)
    }
}
