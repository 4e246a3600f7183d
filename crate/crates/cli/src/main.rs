use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "dholo", version, about = "Discrete holomorphy on quad meshes")]
pub struct Cli {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Acceptance tolerance for checks and relative solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = SolverKind::Cg)]
    pub solver: SolverKind,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Cg,
    Dense,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
pub enum MeshKind {
    Square,
    Rhombic,
    TriHex,
    Torus,
    RectangleTorus,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
pub enum ClassArg {
    Gamma,
    GammaStar,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Linear,
    Crossratio,
    Critical,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BacklundArg {
    Linear,
    Crossratio,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpKind {
    Cayley,
    Hirota,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coupling {
    Additive,
    Hirota,
}

#[derive(Args, Debug, Clone)]
pub struct MeshArg {
    #[arg(long)]
    pub mesh: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct MeshFunction {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub function: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a mesh and write it as JSON.
    Generate {
        #[arg(long, value_enum)]
        kind: MeshKind,
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Defaults to `n`.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Rhombus angle in radians.
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_3)]
        angle: f64,
        #[arg(long, default_value_t = 1.0)]
        aspect: f64,
        /// Random vertex displacement as a fraction of the mean edge length.
        #[arg(long)]
        perturb: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Report structural violations of a mesh.
    Validate(MeshArg),
    /// Run a holomorphicity or criticality check.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, required_if_eq_any([("kind", "linear"), ("kind", "crossratio")]))]
        function: Option<PathBuf>,
        /// Include per-quad residuals.
        #[arg(long)]
        detail: bool,
    },
    /// Harmonic extension of boundary values on one dual graph.
    SolveDirichlet {
        #[command(flatten)]
        input: MeshFunction,
        #[arg(long, value_enum, default_value_t = ClassArg::Gamma)]
        class: ClassArg,
    },
    /// Harmonic conjugate on the dual graph.
    Conjugate {
        #[command(flatten)]
        input: MeshFunction,
        /// Graph carrying the input function.
        #[arg(long, value_enum, default_value_t = ClassArg::Gamma)]
        class: ClassArg,
        /// Dual-graph vertex where the conjugate takes the value `c0`.
        #[arg(long)]
        origin: Option<usize>,
        #[arg(long, default_value = "0")]
        c0: String,
        /// Print `f ⊕ i·f*` instead of `f*`.
        #[arg(long)]
        joined: bool,
    },
    /// Discrete exponential on a critical mesh.
    Exp {
        #[command(flatten)]
        mesh: MeshArg,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        origin: Option<usize>,
        #[arg(long, value_enum, default_value_t = ExpKind::Cayley)]
        kind: ExpKind,
    },
    /// Integrate `f dZ` (additive) or the Hirota system.
    Integrate {
        #[command(flatten)]
        input: MeshFunction,
        #[arg(long, value_enum, default_value_t = Coupling::Additive)]
        coupling: Coupling,
        #[arg(long)]
        origin: Option<usize>,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        f0: String,
    },
    /// Bäcklund transform of a holomorphic function.
    Backlund {
        #[arg(value_enum)]
        kind: BacklundArg,
        #[command(flatten)]
        input: MeshFunction,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long)]
        origin: Option<usize>,
    },
    /// Dirichlet, area and conformal energies.
    Energies(MeshFunction),
    /// Per-quad ∂f, ∂̄f, Jacobian and dilatation.
    Derivatives(MeshFunction),
    /// Hodge decomposition of `df` (or of `dZ`) on a closed mesh.
    Decompose {
        #[arg(long)]
        mesh: PathBuf,
        /// Function whose differential is decomposed; `dZ` when absent.
        #[arg(long)]
        function: Option<PathBuf>,
        /// Λ-form JSON `{"gamma": [[re, im], ...], "gamma_star": [...]}`.
        #[arg(long, conflicts_with = "function")]
        form: Option<PathBuf>,
    },
    /// Period ratios on a sequence of tori, as CSV.
    Periods {
        #[arg(long, value_enum, default_value_t = MeshKind::Torus)]
        kind: MeshKind,
        #[arg(long, default_value_t = 1.0)]
        aspect: f64,
        #[arg(long, value_delimiter = ',', default_value = "4,8")]
        n_list: Vec<usize>,
        /// Vertical cell count as a multiple of `n`.
        #[arg(long, default_value_t = 1)]
        m_factor: usize,
    },
    /// Dirichlet Green function on a disk around a vertex.
    Green {
        #[command(flatten)]
        mesh: MeshArg,
        #[arg(long)]
        source: usize,
        #[arg(long)]
        radius: f64,
    },
    /// Discrete Cauchy integral around a square window.
    Cauchy {
        #[command(flatten)]
        input: MeshFunction,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
        /// Half-width of the window of quads bounded by the contour.
        #[arg(long)]
        half_width: f64,
        /// Green-domain radius.
        #[arg(long)]
        radius: f64,
    },
    /// Polygonal-pattern SVG of a function.
    Render {
        #[command(flatten)]
        input: MeshFunction,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            if !outcome.stdout.is_empty() {
                let _ = writeln!(std::io::stdout(), "{}", outcome.stdout);
            }
            if !outcome.summary.is_empty() {
                eprintln!("{}", outcome.summary);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let _ = writeln!(std::io::stdout(), "{}", serde_json::json!({ "error": e.to_string() }));
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
