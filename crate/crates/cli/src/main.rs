//! `hilbert-lab`: distance queries, figures and experiment drivers.

mod commands;
mod parse;
mod render;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(hilbert_core::Error),
}

impl From<hilbert_core::Error> for CliError {
    fn from(e: hilbert_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use hilbert_core::Error;
        match self {
            CliError::Input(_) => 2,
            CliError::Core(Error::NonConvergence(_)) => 4,
            CliError::Core(e) if e.is_geometric() => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "hilbert-lab", version, about = "Hilbert geometry of convex bodies: queries, figures, experiments")]
pub struct Cli {
    /// Body descriptor JSON, or builtin:NAME (square, disk, hexagon, cube, ball, simplex2, simplex3).
    #[arg(long, global = true)]
    pub body: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// RNG seed; each experiment has its own default.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Membership tolerance of the body, relative to its circumradius.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Times `1,2,4`, `geometric:K` or `linear:LO:HI:N`.
    #[arg(long, global = true)]
    pub schedule: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Hilbert distance with its chord.
    Dist(DistArgs),
    /// Samples of the unit-speed geodesic ray toward a boundary point.
    Geodesic(GeodesicArgs),
    /// Points of a metric sphere.
    Sphere(SphereArgs),
    /// A plane section through an interior anchor.
    Section(SectionArgs),
    /// SVG figure of a planar body with overlays.
    Render(RenderArgs),
    /// Gromov-product defect curve along two rays.
    Kn(KnArgs),
    /// Quasi-isometry constants of the simplex chart on sampled pairs.
    Fit(FitArgs),
    /// Packing-number bracket of a norm.
    Pack(PackArgs),
    /// Maximum visibility subset of boundary samples.
    Visibility(VisibilityArgs),
    /// Arc decomposition and polygon detection.
    Detect(DetectArgs),
    /// Polygon checks on random plane sections.
    Verdict(VerdictArgs),
    /// Normalized images of geodesic rays under the simplex chart.
    Directions(DirectionsArgs),
    /// The full experiment suite.
    Suite(SuiteArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DistArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
}

#[derive(Debug, Args, Serialize)]
pub struct GeodesicArgs {
    /// Base point; the body center by default.
    #[arg(long, allow_hyphen_values = true)]
    pub base: Option<String>,
    /// Boundary point the ray converges to.
    #[arg(long, conflicts_with = "dir", allow_hyphen_values = true)]
    pub target: Option<String>,
    /// Direction of the ray instead of a target.
    #[arg(long, allow_hyphen_values = true)]
    pub dir: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SphereArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[arg(long)]
    pub radius: f64,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SectionArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub e1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub e2: String,
}

#[derive(Debug, Args, Serialize)]
pub struct RenderArgs {
    /// Radius of a metric sphere overlay.
    #[arg(long)]
    pub sphere: Option<f64>,
    /// Center of the sphere; the body center by default.
    #[arg(long, allow_hyphen_values = true)]
    pub sphere_center: Option<String>,
    /// Geodesic overlay toward this boundary point.
    #[arg(long, allow_hyphen_values = true)]
    pub geodesic: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub geodesic_base: Option<String>,
    /// Chord overlay through P and Q, given as `P;Q`.
    #[arg(long, allow_hyphen_values = true)]
    pub chord: Option<String>,
    /// Boundary points to mark, `x,y;x,y`.
    #[arg(long = "Y", allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Run the polygon detector on the marked points and draw its vertices.
    #[arg(long)]
    pub detect: bool,
    /// Section directive for bodies of dimension > 2.
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub e1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub e2: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct KnArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[arg(long, default_value_t = 100)]
    pub pairs: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PackArgs {
    /// lp1, lp2, lpinf, lpP or variation.
    #[arg(long, conflicts_with = "norm_file")]
    pub norm: Option<String>,
    /// Norm descriptor JSON.
    #[arg(long, allow_hyphen_values = true)]
    pub norm_file: Option<String>,
    /// Space dimension for lp norms, `m` for the variation norm.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long = "A", default_value_t = 1.0)]
    pub a: f64,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub candidates: Option<usize>,
    /// Skip the planar grid refinement.
    #[arg(long)]
    pub no_grid: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct VisibilityArgs {
    /// Evenly spaced boundary samples around the body center.
    #[arg(long, default_value_t = 64, conflicts_with = "points")]
    pub samples: usize,
    /// Explicit boundary points, `x,y;x,y`.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct DetectArgs {
    /// `midpoints` (edge midpoints of a polygon), `angles:K`, or `x,y;x,y`.
    #[arg(long = "Y", default_value = "midpoints", allow_hyphen_values = true)]
    pub y: String,
}

#[derive(Debug, Args, Serialize)]
pub struct VerdictArgs {
    #[arg(long, default_value_t = 20)]
    pub sections: usize,
    #[arg(long, default_value_t = 360)]
    pub samples: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct DirectionsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub base: Option<String>,
    /// Boundary points the rays converge to, `x,y;x,y`; the vertices by default.
    #[arg(long, allow_hyphen_values = true)]
    pub targets: Option<String>,
    #[arg(long = "A", default_value_t = 1.0)]
    pub a: f64,
    #[arg(long = "B", default_value_t = 0.0)]
    pub b: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SuiteArgs {}

/// Everything that determines an output, echoed into it.
#[derive(Debug, Serialize)]
pub struct RunConfig<'a> {
    pub command: &'a Command,
    pub body: Option<&'a str>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub schedule: Option<&'a str>,
    pub format: Format,
    pub out: Option<&'a str>,
    pub threads: Option<usize>,
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("HILBERT_LAB_THREADS") {
        Ok(v) => {
            let n: usize = v.parse().map_err(|_| CliError::Input(format!("bad HILBERT_LAB_THREADS {v:?}")))?;
            if n == 0 {
                return Err(CliError::Input("HILBERT_LAB_THREADS must be positive".into()));
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let threads = threads_from_env()?;
    if let Some(n) = threads {
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let output = commands::dispatch(cli, threads)?;
    match &cli.out {
        Some(path) => std::fs::write(path, output).map_err(|e| CliError::Input(format!("cannot write {path}: {e}"))),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
