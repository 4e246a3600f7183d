use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::{Function0, Support};
use crate::error::{Error, Result};
use crate::mesh::{QuadMesh, VertexClass, VertexId};

/// `{"<vertex id>": [re, im], ...}` over the support, in id order.
pub fn function_to_json(mesh: &QuadMesh, f: &Function0) -> String {
    let mut out = String::from("{");
    let mut first = true;
    for v in mesh.vertex_ids().filter(|&v| f.support.contains(mesh.class(v))) {
        let z = f.get(v);
        let pair = serde_json::to_string(&[z.re, z.im]).expect("finite floats serialize");
        let _ = write!(out, "{}\"{}\": {}", if first { "" } else { ", " }, v.0, pair);
        first = false;
    }
    out.push('}');
    out
}

/// Reads the format of [`function_to_json`]. The support is inferred from the
/// classes of the keys present; every vertex of those classes must be given.
pub fn function_from_json(mesh: &QuadMesh, text: &str) -> Result<Function0> {
    let raw: HashMap<String, [f64; 2]> = serde_json::from_str(text)?;
    let mut values = vec![Complex64::new(0.0, 0.0); mesh.n_vertices()];
    let mut seen = vec![false; mesh.n_vertices()];
    for (k, [re, im]) in raw {
        let id: usize = k.trim().parse().map_err(|_| Error::BadParams(format!("bad vertex key {k:?}")))?;
        if id >= mesh.n_vertices() {
            return Err(Error::BadParams(format!("vertex {id} is not in the mesh")));
        }
        values[id] = Complex64::new(re, im);
        seen[id] = true;
    }
    let covers = |c: VertexClass| mesh.class_vertices(c).iter().all(|v| seen[v.0]);
    let touches = |c: VertexClass| mesh.class_vertices(c).iter().any(|v| seen[v.0]);
    let support = match (covers(VertexClass::Gamma), covers(VertexClass::GammaStar)) {
        (true, true) => Support::All,
        (true, false) if !touches(VertexClass::GammaStar) => Support::GammaOnly,
        (false, true) if !touches(VertexClass::Gamma) => Support::GammaStarOnly,
        _ => {
            let missing = mesh.vertex_ids().find(|v| !seen[v.0]).unwrap_or(VertexId(0));
            return Err(Error::BadParams(format!("function is missing vertex {}", missing.0)));
        }
    };
    Function0::new(mesh, support, values)
}
