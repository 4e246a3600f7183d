use num_complex::Complex64;
use serde::Serialize;

use super::{QuadMesh, VertexClass, VertexId};
use crate::error::Result;

/// A diagonal of one quad, oriented `x -> x'` on Γ and `y -> y'` on Γ*.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualEdge {
    pub quad: usize,
    pub from: VertexId,
    pub to: VertexId,
    /// ρ on Γ and 1/ρ on Γ*.
    #[serde(serialize_with = "ser_complex")]
    pub weight: Complex64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct DualGraph {
    pub class: VertexClass,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<DualEdge>,
}

impl DualGraph {
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e.from == v || e.to == v).count()
    }
}

impl QuadMesh {
    pub fn dual_graph(&self, class: VertexClass) -> Result<DualGraph> {
        let mut edges = Vec::with_capacity(self.n_quads());
        for (qi, q) in self.quads().iter().enumerate() {
            let rho = self.rho(qi)?;
            edges.push(match class {
                VertexClass::Gamma => DualEdge { quad: qi, from: q.x, to: q.xp, weight: rho },
                VertexClass::GammaStar => DualEdge { quad: qi, from: q.y, to: q.yp, weight: rho.inv() },
            });
        }
        Ok(DualGraph { class, vertices: self.class_vertices(class), edges })
    }

    /// Γ and Γ* with their diagonal weights.
    pub fn dual_graphs(&self) -> Result<(DualGraph, DualGraph)> {
        Ok((self.dual_graph(VertexClass::Gamma)?, self.dual_graph(VertexClass::GammaStar)?))
    }
}
