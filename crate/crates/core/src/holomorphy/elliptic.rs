use std::collections::VecDeque;

use num_complex::Complex64;

use crate::calculus::{Function0, Support};
use crate::error::{Error, Result};
use crate::linalg::{solve_spd_complex, SolverConfig, SparseMatrix};
use crate::mesh::{rho_is_real_positive, QuadMesh, VertexClass, VertexId};

/// Every quad must carry a real positive ρ for the Laplacian to be symmetric
/// positive definite.
pub(crate) fn check_weights(mesh: &QuadMesh) -> Result<()> {
    for q in 0..mesh.n_quads() {
        let rho = mesh.rho(q)?;
        if !rho_is_real_positive(rho, 1e-10) {
            return Err(Error::NonPositiveWeights { quad: q, rho });
        }
    }
    Ok(())
}

/// Solves `Δu = source` at the vertices flagged `unknown` (all in `class`),
/// with `u = fixed` at every other vertex. Returns values per vertex.
pub(crate) fn solve_on_domain(
    mesh: &QuadMesh,
    class: VertexClass,
    unknown: &[bool],
    fixed: &[Complex64],
    source: &[Complex64],
    config: &SolverConfig,
) -> Result<Vec<Complex64>> {
    check_weights(mesh)?;
    let mut index = vec![usize::MAX; mesh.n_vertices()];
    let mut ids = Vec::new();
    for v in mesh.class_vertices(class) {
        if unknown[v.0] {
            index[v.0] = ids.len();
            ids.push(v);
        }
    }
    let mut a = SparseMatrix::new(ids.len());
    let mut rhs = vec![Complex64::new(0.0, 0.0); ids.len()];
    for (row, &v) in ids.iter().enumerate() {
        rhs[row] = source[v.0];
        for (_, n, w, _) in mesh.diagonal_neighbours(v)? {
            let w = w.re;
            a.add(row, row, w);
            if index[n.0] != usize::MAX {
                a.add(row, index[n.0], -w);
            } else {
                rhs[row] += w * fixed[n.0];
            }
        }
    }
    let x = solve_spd_complex(&a, &rhs, config)?;
    let mut out = fixed.to_vec();
    for (row, &v) in ids.iter().enumerate() {
        out[v.0] = x[row];
    }
    Ok(out)
}

/// Discrete harmonic extension of the boundary trace of `boundary` on one
/// dual graph. Boundary vertices are those whose fan is open.
pub fn solve_dirichlet(
    mesh: &QuadMesh,
    class: VertexClass,
    boundary: &Function0,
    config: &SolverConfig,
) -> Result<Function0> {
    boundary.require(class)?;
    let verts = mesh.class_vertices(class);
    let unknown: Vec<bool> = (0..mesh.n_vertices()).map(|v| mesh.is_interior(VertexId(v))).collect();
    if verts.iter().all(|&v| unknown[v.0]) {
        return Err(Error::SingularSystem("no boundary vertices on this graph".into()));
    }
    let zero = vec![Complex64::new(0.0, 0.0); mesh.n_vertices()];
    let values = solve_on_domain(mesh, class, &unknown, &boundary.values, &zero, config)?;
    Function0::new(mesh, Support::only(class), values)
}

/// Harmonic conjugate on the dual graph of `class`. For `f` on Γ the result
/// lives on Γ* with `f*(y') − f*(y) = ρ·(f(x') − f(x))`; for `f` on Γ* it
/// lives on Γ with `f*(x') − f*(x) = −(f(y') − f(y))/ρ`. Hence `f ⊕ i·f*` is
/// linear holomorphic and conjugating twice gives `−f + const`.
pub fn harmonic_conjugate(
    mesh: &QuadMesh,
    f: &Function0,
    class: VertexClass,
    origin: VertexId,
    c0: Complex64,
    tol: f64,
) -> Result<Function0> {
    f.require(class)?;
    if mesh.is_periodic() {
        return Err(Error::BadParams("harmonic conjugate needs a planar mesh".into()));
    }
    let target = class.dual();
    if mesh.class(origin) != target {
        return Err(Error::BadParams(format!("origin {} is not on the dual graph", origin.0)));
    }
    // dual edges: (quad, from, to, increment)
    let mut adj: Vec<Vec<(VertexId, Complex64, usize)>> = vec![Vec::new(); mesh.n_vertices()];
    let mut edges = Vec::with_capacity(mesh.n_quads());
    for q in 0..mesh.n_quads() {
        let quad = mesh.quad(q);
        let rho = mesh.rho(q)?;
        let (from, to, inc) = match class {
            VertexClass::Gamma => (quad.y, quad.yp, rho * (f.get(quad.xp) - f.get(quad.x))),
            VertexClass::GammaStar => (quad.x, quad.xp, -(f.get(quad.yp) - f.get(quad.y)) / rho),
        };
        adj[from.0].push((to, inc, q));
        adj[to.0].push((from, -inc, q));
        edges.push((from, to, inc));
    }
    for list in &mut adj {
        list.sort_by_key(|&(n, _, q)| (n, q));
    }
    let mut values: Vec<Option<Complex64>> = vec![None; mesh.n_vertices()];
    values[origin.0] = Some(c0);
    let mut queue = VecDeque::from([origin]);
    while let Some(a) = queue.pop_front() {
        let va = values[a.0].unwrap();
        for &(b, inc, _) in &adj[a.0] {
            if values[b.0].is_none() {
                values[b.0] = Some(va + inc);
                queue.push_back(b);
            }
        }
    }
    let scale = f.max_norm(mesh).max(1.0);
    let mut residual: f64 = 0.0;
    for &(a, b, inc) in &edges {
        let (Some(va), Some(vb)) = (values[a.0], values[b.0]) else {
            return Err(Error::BadParams("dual graph is disconnected".into()));
        };
        residual = residual.max((va + inc - vb).norm() / scale);
    }
    if residual > tol {
        return Err(Error::NotHarmonic { residual });
    }
    let values = values.into_iter().map(|v| v.unwrap_or_default()).collect();
    Function0::new(mesh, Support::only(target), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holomorphy::check_linear_holomorphic;
    use crate::mesh::generate;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real_part(m: &QuadMesh, g: impl Fn(Complex64) -> Complex64) -> Function0 {
        Function0::from_fn(m, |z| c(g(z).re, 0.0))
    }

    fn max_diff(m: &QuadMesh, a: &Function0, b: &Function0, class: VertexClass) -> f64 {
        m.class_vertices(class).iter().map(|&v| (a.get(v) - b.get(v)).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn dirichlet_reproduces_harmonic_data() {
        let cfg = SolverConfig::default();
        for m in [generate::square(6, 6, 1.0).unwrap(), generate::rhombic(6, 6, 1.0, PI / 3.0).unwrap()] {
            for class in [VertexClass::Gamma, VertexClass::GammaStar] {
                for g in [real_part(&m, |z| z), real_part(&m, |z| z * z)] {
                    let u = solve_dirichlet(&m, class, &g, &cfg).unwrap();
                    assert!(max_diff(&m, &u, &g, class) < 1e-9);
                    let again = solve_dirichlet(&m, class, &u, &cfg).unwrap();
                    assert!(max_diff(&m, &u, &again, class) < 1e-9);
                }
                let k = Function0::constant(&m, c(2.5, 0.0));
                let u = solve_dirichlet(&m, class, &k, &cfg).unwrap();
                assert!(max_diff(&m, &u, &k, class) < 1e-12);
            }
        }
    }

    #[test]
    fn dirichlet_rejects_complex_weights() {
        let m = generate::rectangle_torus(4, 4, 1.0, 2.0).unwrap();
        let g = Function0::z(&m);
        assert!(solve_dirichlet(&m, VertexClass::Gamma, &g, &SolverConfig::default()).is_err());
        let planar = generate::perturb(&generate::square(4, 4, 1.0).unwrap(), 0.1, 3);
        assert!(matches!(
            solve_dirichlet(&planar, VertexClass::Gamma, &Function0::z(&planar), &SolverConfig::default()),
            Err(Error::NonPositiveWeights { .. })
        ));
    }

    #[test]
    fn conjugates() {
        let m = generate::tri_hex(5, 1.0).unwrap();
        let o = m.class_vertices(VertexClass::GammaStar)[0];
        for g in [|z: Complex64| z, |z: Complex64| z * z] {
            let u = real_part(&m, g);
            let v = harmonic_conjugate(&m, &u, VertexClass::Gamma, o, c(g(m.z(o)).im, 0.0), 1e-10).unwrap();
            let im = Function0::from_fn(&m, |z| c(g(z).im, 0.0));
            assert!(max_diff(&m, &v, &im, VertexClass::GammaStar) < 1e-10);
            let joined = Function0::join(&m, &u, &v.map(|x| Complex64::i() * x)).unwrap();
            assert!(check_linear_holomorphic(&m, &joined).unwrap().max_residual < 1e-10);
            // conjugating twice gives −u + const
            let x0 = m.class_vertices(VertexClass::Gamma)[0];
            let w = harmonic_conjugate(&m, &v, VertexClass::GammaStar, x0, -u.get(x0), 1e-10).unwrap();
            assert!(max_diff(&m, &w, &u.map(|x| -x), VertexClass::Gamma) < 1e-10);
        }
        let k = Function0::constant(&m, c(3.0, 0.0));
        let kc = harmonic_conjugate(&m, &k, VertexClass::Gamma, o, c(1.0, 0.0), 1e-10).unwrap();
        assert!(m.class_vertices(VertexClass::GammaStar).iter().all(|&v| kc.get(v) == c(1.0, 0.0)));
    }

    #[test]
    fn non_harmonic_input_is_rejected() {
        let m = generate::square(5, 5, 1.0).unwrap();
        let u = Function0::from_fn(&m, |z| c(z.norm_sqr(), 0.0));
        let o = m.class_vertices(VertexClass::GammaStar)[0];
        assert!(matches!(
            harmonic_conjugate(&m, &u, VertexClass::Gamma, o, c(0., 0.), 1e-10),
            Err(Error::NotHarmonic { .. })
        ));
    }
}
