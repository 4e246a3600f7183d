use std::fmt::Write as _;
use std::path::Path;

use dholo::backlund::{backlund_crossratio, backlund_linear, BacklundParams};
use dholo::calculus::{d0_diagonal, del, delbar, dilatation, dz_diagonal, energies, function_from_json, function_to_json, jacobian, l2_norm_sq, DiagonalForm, Function0};
use dholo::global::{cauchy_integral, green_function, hodge_decompose, holomorphic_basis, window_contour};
use dholo::holomorphy::{
    check_cross_ratio, check_linear_holomorphic, default_base_point, discrete_exponential, harmonic_conjugate,
    hirota_exponential, hirota_integrate, integrate_holomorphic, solve_dirichlet,
};
use dholo::linalg::{SolverConfig, SolverMethod};
use dholo::mesh::{check_critical, generate, io, validate};
use dholo::render::{render_pattern, shared_vertex_mismatch, svg_string};
use dholo::{Error, QuadMesh, Result, VertexClass, VertexId};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::{BacklundArg, CheckKind, ClassArg, Cli, Command, Coupling, ExpKind, MeshKind, SolverArgs, SolverKind};

pub struct Outcome {
    pub stdout: String,
    pub summary: String,
    pub passed: bool,
}

impl Outcome {
    fn ok(stdout: String, summary: impl Into<String>) -> Self {
        Outcome { stdout, summary: summary.into(), passed: true }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn solver_config(args: &SolverArgs) -> Result<SolverConfig> {
    let config = SolverConfig {
        method: match args.solver {
            SolverKind::Cg => SolverMethod::ConjugateGradient,
            SolverKind::Dense => SolverMethod::DirectDense,
        },
        rel_tolerance: args.tol,
        max_iterations: args.max_iter,
    };
    config.validate()?;
    Ok(config)
}

/// Parses `re` or `re,im`, e.g. `0.3,-0.1`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let bad = || Error::BadParams(format!("cannot parse complex number {text:?}; use re or re,im"));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

fn class_of(c: ClassArg) -> VertexClass {
    match c {
        ClassArg::Gamma => VertexClass::Gamma,
        ClassArg::GammaStar => VertexClass::GammaStar,
    }
}

fn vertex(mesh: &QuadMesh, id: usize) -> Result<VertexId> {
    if id < mesh.n_vertices() {
        Ok(VertexId(id))
    } else {
        Err(Error::BadParams(format!("vertex {id} is not in the mesh ({} vertices)", mesh.n_vertices())))
    }
}

fn origin_or_default(mesh: &QuadMesh, id: Option<usize>) -> Result<VertexId> {
    match id {
        Some(id) => vertex(mesh, id),
        None => Ok(default_base_point(mesh).vertex),
    }
}

fn load(mesh: &Path, function: &Path) -> Result<(QuadMesh, Function0)> {
    let m = io::read_file(mesh)?;
    let f = function_from_json(&m, &std::fs::read_to_string(function)?)?;
    Ok((m, f))
}

fn build(kind: MeshKind, n: usize, m: usize, delta: f64, angle: f64, aspect: f64) -> Result<QuadMesh> {
    match kind {
        MeshKind::Square => generate::square(n, m, delta),
        MeshKind::Rhombic => generate::rhombic(n, m, delta, angle),
        MeshKind::TriHex => generate::tri_hex(n, delta),
        MeshKind::Torus => generate::torus(n, m, delta),
        MeshKind::RectangleTorus => generate::rectangle_torus(n, m, delta, aspect),
    }
}

fn function_json_value(mesh: &QuadMesh, f: &Function0) -> Result<serde_json::Value> {
    Ok(serde_json::from_str(&function_to_json(mesh, f))?)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let config = solver_config(&cli.solver)?;
    let tol = cli.solver.tol;
    match &cli.command {
        Command::Generate { kind, n, m, delta, angle, aspect, perturb, seed, output } => {
            let mut mesh = build(*kind, *n, m.unwrap_or(*n), *delta, *angle, *aspect)?;
            if let Some(a) = perturb {
                mesh = generate::perturb(&mesh, *a, *seed);
            }
            let summary = format!("{} vertices, {} quads", mesh.n_vertices(), mesh.n_quads());
            match output {
                Some(path) => {
                    io::write_file(&mesh, path)?;
                    Ok(Outcome::ok(String::new(), format!("wrote {}: {summary}", path.display())))
                }
                None => Ok(Outcome::ok(io::to_json(&mesh), summary)),
            }
        }
        Command::Validate(arg) => {
            let mesh = io::read_file(&arg.mesh)?;
            let report = validate(&mesh);
            let passed = report.is_empty();
            let summary = format!("{} violation(s)", report.violations.len());
            Ok(Outcome { stdout: to_json(&report)?, summary, passed })
        }
        Command::Check { kind, mesh, function, detail } => {
            let m = io::read_file(mesh)?;
            if *kind == CheckKind::Critical {
                let c = check_critical(&m, None);
                let summary = format!("critical: {} (max deviation {:.3e})", c.is_critical, c.max_deviation);
                return Ok(Outcome { stdout: to_json(&c)?, summary, passed: c.is_critical });
            }
            let path = function.as_ref().ok_or(Error::BadParams("--function is required".into()))?;
            let f = function_from_json(&m, &std::fs::read_to_string(path)?)?;
            let report = match kind {
                CheckKind::Linear => check_linear_holomorphic(&m, &f)?,
                _ => check_cross_ratio(&m, &f)?,
            };
            let passed = report.passes(tol);
            let summary = format!("max residual {:.3e} (tol {tol:.1e}): {}", report.max_residual, if passed { "pass" } else { "fail" });
            let report = if *detail { report } else { report.without_detail() };
            Ok(Outcome { stdout: to_json(&report)?, summary, passed })
        }
        Command::SolveDirichlet { input, class } => {
            let (m, f) = load(&input.mesh, &input.function)?;
            let u = solve_dirichlet(&m, class_of(*class), &f, &config)?;
            Ok(Outcome::ok(function_to_json(&m, &u), "harmonic extension computed"))
        }
        Command::Conjugate { input, class, origin, c0, joined } => {
            let (m, f) = load(&input.mesh, &input.function)?;
            let class = class_of(*class);
            let origin = match origin {
                Some(id) => vertex(&m, *id)?,
                None => *m
                    .class_vertices(class.dual())
                    .first()
                    .ok_or(Error::BadParams("dual graph has no vertices".into()))?,
            };
            let fs = harmonic_conjugate(&m, &f, class, origin, parse_complex(c0)?, tol)?;
            let out = if *joined {
                let fi = fs.map(|v| Complex64::i() * v);
                match class {
                    VertexClass::Gamma => Function0::join(&m, &f, &fi)?,
                    VertexClass::GammaStar => Function0::join(&m, &fi, &f)?,
                }
            } else {
                fs
            };
            Ok(Outcome::ok(function_to_json(&m, &out), format!("conjugate anchored at vertex {}", origin.0)))
        }
        Command::Exp { mesh, lambda, origin, kind } => {
            let m = io::read_file(&mesh.mesh)?;
            let lambda = parse_complex(lambda)?;
            let o = origin_or_default(&m, *origin)?;
            let one = Complex64::new(1.0, 0.0);
            let p = match kind {
                ExpKind::Cayley => discrete_exponential(&m, lambda, o, one)?,
                ExpKind::Hirota => hirota_exponential(&m, lambda, o, one)?,
            };
            Ok(Outcome::ok(function_to_json(&m, &p.values), format!("closure residual {:.3e}", p.closure_residual)))
        }
        Command::Integrate { input, coupling, origin, f0 } => {
            let (m, f) = load(&input.mesh, &input.function)?;
            let o = origin_or_default(&m, *origin)?;
            let f0 = parse_complex(f0)?;
            let p = match coupling {
                Coupling::Additive => integrate_holomorphic(&m, &f, o, f0, tol)?,
                Coupling::Hirota => hirota_integrate(&m, &f, o, f0, tol)?,
            };
            Ok(Outcome::ok(function_to_json(&m, &p.values), format!("closure residual {:.3e}", p.closure_residual)))
        }
        Command::Backlund { kind, input, lambda, mu, origin } => {
            let (m, f) = load(&input.mesh, &input.function)?;
            let params = BacklundParams {
                lambda: parse_complex(lambda)?,
                mu: parse_complex(mu)?,
                origin: origin_or_default(&m, *origin)?,
            };
            let tol = tol.max(1e-11);
            let r = match kind {
                BacklundArg::Linear => backlund_linear(&m, &f, &params, tol)?,
                BacklundArg::Crossratio => backlund_crossratio(&m, &f, &params, tol)?,
            };
            let out = json!({
                "lambda": [params.lambda.re, params.lambda.im],
                "mu": [params.mu.re, params.mu.im],
                "origin": params.origin.0,
                "closure_residual": r.closure_residual,
                "function": function_json_value(&m, &r.function)?,
            });
            Ok(Outcome::ok(to_json(&out)?, format!("closure residual {:.3e}", r.closure_residual)))
        }
        Command::Energies(input) => {
            let (m, f) = load(&input.mesh, &input.function)?;
            let e = energies(&m, &f)?;
            let summary = format!("E_D = {:.6}, A = {:.6}, E_C = {:.6}", e.dirichlet, e.area, e.conformal);
            Ok(Outcome::ok(to_json(&e)?, summary))
        }
        Command::Derivatives(input) => {
            let (m, f) = load(&input.mesh, &input.function)?;
            let out = json!({
                "del": del(&m, &f)?.values,
                "delbar": delbar(&m, &f)?.values,
                "jacobian": jacobian(&m, &f)?,
                "dilatation": dilatation(&m, &f)?,
            });
            Ok(Outcome::ok(to_json(&out)?, format!("{} quads", m.n_quads())))
        }
        Command::Decompose { mesh, function, form } => {
            let m = io::read_file(mesh)?;
            let alpha: DiagonalForm = match (function, form) {
                (Some(p), _) => d0_diagonal(&m, &function_from_json(&m, &std::fs::read_to_string(p)?)?)?,
                (None, Some(p)) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
                (None, None) => dz_diagonal(&m),
            };
            if alpha.gamma.len() != m.n_quads() || alpha.gamma_star.len() != m.n_quads() {
                return Err(Error::BadParams("form length does not match the quad count".into()));
            }
            let s = hodge_decompose(&m, &alpha, &config)?;
            let norms = json!({
                "total": l2_norm_sq(&m, &alpha)?,
                "exact": l2_norm_sq(&m, &s.exact)?,
                "coexact": l2_norm_sq(&m, &s.coexact)?,
                "harmonic": l2_norm_sq(&m, &s.harmonic)?,
            });
            let summary = format!("squared norms {norms}");
            Ok(Outcome::ok(to_json(&json!({ "norms_sq": norms, "split": s }))?, summary))
        }
        Command::Periods { kind, aspect, n_list, m_factor } => {
            if !matches!(kind, MeshKind::Torus | MeshKind::RectangleTorus) {
                return Err(Error::BadParams("periods need --kind torus or rectangle_torus".into()));
            }
            let mut csv = String::from("n,tau_gamma_re,tau_gamma_im,tau_gamma_star_re,tau_gamma_star_im,gap");
            for &n in n_list {
                let mesh = build(*kind, n, n * m_factor, 1.0 / n as f64, 0.0, *aspect)?;
                let d = holomorphic_basis(&mesh)?;
                let _ = write!(
                    csv,
                    "\n{n},{:e},{:e},{:e},{:e},{:e}",
                    d.tau_gamma.re, d.tau_gamma.im, d.tau_gamma_star.re, d.tau_gamma_star.im, d.gap
                );
            }
            Ok(Outcome::ok(csv, format!("{} refinement(s)", n_list.len())))
        }
        Command::Green { mesh, source, radius } => {
            let m = io::read_file(&mesh.mesh)?;
            let g = green_function(&m, vertex(&m, *source)?, *radius, &config)?;
            let domain: Vec<usize> = (0..m.n_vertices()).filter(|&v| g.domain[v]).collect();
            let out = json!({
                "source": g.source.0,
                "radius": g.radius,
                "domain": domain,
                "values": function_json_value(&m, &g.values)?,
            });
            Ok(Outcome::ok(to_json(&out)?, format!("{} domain vertices", domain.len())))
        }
        Command::Cauchy { input, x, y, half_width, radius } => {
            let (m, f) = load(&input.mesh, &input.function)?;
            let (x, y) = (vertex(&m, *x)?, vertex(&m, *y)?);
            let contour = window_contour(&m, x, *half_width)?;
            let r = cauchy_integral(&m, &f, x, y, &contour, *radius, &config)?;
            let summary = format!("|error| = {:.3e} over {} contour edges", r.error, r.contour_length);
            Ok(Outcome::ok(to_json(&r)?, summary))
        }
        Command::Render { input, output } => {
            let (m, f) = load(&input.mesh, &input.function)?;
            let scene = render_pattern(&m, &f)?;
            std::fs::write(output, svg_string(&scene))?;
            let mismatch = shared_vertex_mismatch(&m, &f)?;
            let out = json!({ "polygons": scene.polygons.len(), "viewbox": scene.viewbox, "mismatch": mismatch });
            Ok(Outcome::ok(to_json(&out)?, format!("wrote {}", output.display())))
        }
    }
}
