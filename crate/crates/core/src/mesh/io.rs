//! JSON mesh files.
//!
//! Periodic meshes are written on a fundamental domain: canonical vertices
//! come first, followed by translated copies used by wrapping quads. Each
//! orbit lists a canonical id then its copies.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Quad, QuadMesh, Shift, Vertex, VertexClass};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct VertexRecord {
    id: usize,
    class: VertexClass,
    z: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct Identifications {
    orbits: Vec<Vec<usize>>,
    dz_periods: [[f64; 2]; 2],
}

#[derive(Serialize, Deserialize)]
struct MeshFile {
    vertices: Vec<VertexRecord>,
    quads: Vec<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    identifications: Option<Identifications>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn cplx(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn to_json(mesh: &QuadMesh) -> String {
    let mut vertices: Vec<VertexRecord> = mesh
        .vertices()
        .iter()
        .enumerate()
        .map(|(id, v)| VertexRecord { id, class: v.class, z: pair(v.z) })
        .collect();
    let mut quads = Vec::with_capacity(mesh.n_quads());
    let identifications = mesh.periodicity().map(|p| {
        let mut copies: BTreeMap<(usize, Shift), usize> = BTreeMap::new();
        let mut orbits: Vec<Vec<usize>> = (0..mesh.n_vertices()).map(|v| vec![v]).collect();
        for (qi, q) in mesh.quads().iter().enumerate() {
            let mut ids = [0usize; 4];
            for (k, c) in q.corners().iter().enumerate() {
                let s = p.corner_shifts[qi][k];
                ids[k] = if s == [0, 0] {
                    c.0
                } else {
                    *copies.entry((c.0, s)).or_insert_with(|| {
                        let id = vertices.len();
                        vertices.push(VertexRecord {
                            id,
                            class: mesh.class(*c),
                            z: pair(mesh.corner_z(qi, k)),
                        });
                        orbits[c.0].push(id);
                        id
                    })
                };
            }
            quads.push(ids);
        }
        orbits.retain(|o| o.len() > 1);
        Identifications { orbits, dz_periods: [pair(p.periods[0]), pair(p.periods[1])] }
    });
    if identifications.is_none() {
        quads = mesh.quads().iter().map(|&q| q.into()).collect();
    }
    let file = MeshFile { vertices, quads, identifications };
    serde_json::to_string_pretty(&file).expect("mesh serialization cannot fail")
}

pub fn from_json(text: &str) -> Result<QuadMesh> {
    let file: MeshFile = serde_json::from_str(text)?;
    let n = file.vertices.len();
    let mut slots: Vec<Option<Vertex>> = vec![None; n];
    for r in &file.vertices {
        if r.id >= n || slots[r.id].is_some() {
            return Err(Error::BadParams(format!("vertex ids must be a dense range, bad id {}", r.id)));
        }
        slots[r.id] = Some(Vertex { class: r.class, z: cplx(r.z) });
    }
    let all: Vec<Vertex> = slots.into_iter().map(|v| v.unwrap()).collect();
    for q in &file.quads {
        if q.iter().any(|&c| c >= n) {
            return Err(Error::BadParams(format!("quad {q:?} references a missing vertex")));
        }
    }
    let Some(ident) = file.identifications else {
        return QuadMesh::new(all, file.quads.into_iter().map(Quad::from).collect());
    };

    let periods = [cplx(ident.dz_periods[0]), cplx(ident.dz_periods[1])];
    let det = (periods[0].conj() * periods[1]).im;
    if det.abs() < 1e-300 {
        return Err(Error::BadParams("dz_periods are linearly dependent".into()));
    }
    // representative of each vertex
    let mut rep: Vec<usize> = (0..n).collect();
    for orbit in &ident.orbits {
        let Some(&first) = orbit.first() else { continue };
        for &v in orbit {
            if v >= n {
                return Err(Error::BadParams(format!("orbit references missing vertex {v}")));
            }
            rep[v] = first;
        }
    }
    let mut canon_index = vec![usize::MAX; n];
    let mut vertices = Vec::new();
    for v in 0..n {
        if rep[v] == v {
            canon_index[v] = vertices.len();
            vertices.push(all[v]);
        }
    }
    let shift_of = |v: usize| -> Result<Shift> {
        let d = all[v].z - all[rep[v]].z;
        // solve d = a·P1 + b·P2 over the reals
        let a = (d.conj() * periods[1]).im / det;
        let b = (periods[0].conj() * d).im / det;
        let (ra, rb) = (a.round(), b.round());
        if (a - ra).abs() > 1e-6 || (b - rb).abs() > 1e-6 {
            return Err(Error::BadParams(format!(
                "vertex {v} is not a lattice translate of vertex {}",
                rep[v]
            )));
        }
        Ok([ra as i32, rb as i32])
    };
    let mut quads = Vec::with_capacity(file.quads.len());
    let mut shifts = Vec::with_capacity(file.quads.len());
    for q in &file.quads {
        let mut s = [[0, 0]; 4];
        for k in 0..4 {
            s[k] = shift_of(q[k])?;
        }
        let c = q.map(|v| canon_index[rep[v]]);
        quads.push(Quad::new(c[0], c[1], c[2], c[3]));
        shifts.push(s);
    }
    QuadMesh::periodic(vertices, quads, periods, shifts)
}

pub fn write_file(mesh: &QuadMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_json(mesh))?;
    Ok(())
}

pub fn read_file(path: impl AsRef<Path>) -> Result<QuadMesh> {
    from_json(&std::fs::read_to_string(path)?)
}
