use num_complex::Complex64;
use serde::Serialize;

use crate::calculus::{laplacian, Function0, Support};
use crate::error::{Error, Result};
use crate::holomorphy::solve_on_domain;
use crate::linalg::SolverConfig;
use crate::mesh::{QuadMesh, VertexId};

/// Dirichlet Green function on a disk of the source's dual graph.
#[derive(Clone, Debug, Serialize)]
pub struct GreenFunction {
    pub source: VertexId,
    pub radius: f64,
    /// Vertices where `ΔG = δ` is imposed.
    pub domain: Vec<bool>,
    pub values: Function0,
}

/// Vertices of the class of `center` within `radius` whose fan is closed and
/// whose dual neighbours are all within `radius` as well.
pub fn disk_domain(mesh: &QuadMesh, center: VertexId, radius: f64) -> Result<Vec<bool>> {
    let c = mesh.z(center);
    let inside = |v: VertexId| (mesh.z(v) - c).norm() <= radius;
    let mut dom = vec![false; mesh.n_vertices()];
    for v in mesh.class_vertices(mesh.class(center)) {
        if inside(v) && mesh.is_interior(v) && mesh.diagonal_neighbours(v)?.iter().all(|&(_, n, _, _)| inside(n)) {
            dom[v.0] = true;
        }
    }
    Ok(dom)
}

/// Solves `ΔG = δ_source` on [`disk_domain`] with `G = 0` elsewhere on the
/// graph. Values on the other graph are reported as zero.
pub fn green_function(mesh: &QuadMesh, source: VertexId, radius: f64, config: &SolverConfig) -> Result<GreenFunction> {
    if mesh.is_periodic() {
        return Err(Error::BadParams("Green function needs a planar mesh".into()));
    }
    let domain = disk_domain(mesh, source, radius)?;
    if !domain[source.0] {
        return Err(Error::BadParams(format!("radius {radius} leaves no interior around the source")));
    }
    let values = green_on_domain(mesh, source, &domain, config)?;
    Ok(GreenFunction { source, radius, domain, values })
}

/// `ΔG = δ_source` on the flagged vertices, `G = 0` on the rest of the graph.
pub fn green_on_domain(mesh: &QuadMesh, source: VertexId, domain: &[bool], config: &SolverConfig) -> Result<Function0> {
    if !domain[source.0] {
        return Err(Error::BadParams("source is outside the domain".into()));
    }
    let zero = vec![Complex64::new(0.0, 0.0); mesh.n_vertices()];
    let mut delta = zero.clone();
    delta[source.0] = Complex64::new(1.0, 0.0);
    let class = mesh.class(source);
    let values = solve_on_domain(mesh, class, domain, &zero, &delta, config)?;
    Function0::new(mesh, Support::only(class), values)
}

/// Discrete Green identity on a vertex set `I` of one graph:
/// `Σ_I (uΔv − vΔu)` against the boundary flux
/// `Σ_{x∈I, n∉I} w·[u(x)(v(n) − v(x)) − v(x)(u(n) − u(x))]` with the
/// Laplacian sign convention `Δu(x) = Σ w·(u(x) − u(n))`. Returns the
/// absolute difference of the two sides.
pub fn greens_identity_residual(mesh: &QuadMesh, u: &Function0, v: &Function0, region: &[bool]) -> Result<f64> {
    let mut class = None;
    for x in mesh.vertex_ids().filter(|x| region[x.0]) {
        match class {
            None => class = Some(mesh.class(x)),
            Some(c) if c != mesh.class(x) => {
                return Err(Error::BadParams("region mixes both graphs".into()));
            }
            _ => {}
        }
    }
    let Some(class) = class else { return Ok(0.0) };
    u.require(class)?;
    v.require(class)?;
    let lu = laplacian(mesh, u, class)?;
    let lv = laplacian(mesh, v, class)?;
    let mut bulk = Complex64::new(0.0, 0.0);
    let mut flux = Complex64::new(0.0, 0.0);
    for x in mesh.class_vertices(class).into_iter().filter(|x| region[x.0]) {
        if lu.boundary[x.0] {
            return Err(Error::BadParams(format!("region vertex {} is on the mesh boundary", x.0)));
        }
        let (du, dv) = (lu.values.get(x), lv.values.get(x));
        bulk += u.get(x) * dv - v.get(x) * du;
        for (_, n, w, _) in mesh.diagonal_neighbours(x)? {
            if !region[n.0] {
                flux += w * (u.get(x) * (v.get(n) - v.get(x)) - v.get(x) * (u.get(n) - u.get(x)));
            }
        }
    }
    Ok((bulk + flux).norm())
}
