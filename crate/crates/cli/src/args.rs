use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "peg", version, about = "Inscribe cyclic quadrilaterals in smooth Jordan curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find inscriptions of a quadrilateral in a curve.
    #[command(allow_negative_numbers = true)]
    Solve(SolveArgs),
    /// Convert eight vertex coordinates to "s t phi".
    #[command(allow_negative_numbers = true)]
    Params {
        /// Ax Ay Bx By Cx Cy Dx Dy (one argument or eight).
        #[arg(required = true, num_args = 1..)]
        coords: Vec<String>,
        /// Relative tolerance of the chord-product test.
        #[arg(long, default_value_t = 1e-9)]
        cyclic_tol: f64,
    },
    /// Canonical vertices "Ax Ay Bx By Cx Cy Dx Dy" of "s t phi".
    Vertices {
        #[arg(required = true, num_args = 1..)]
        params: Vec<String>,
    },
    /// Maslov index of an (m, n) loop on a torus.
    #[command(allow_negative_numbers = true)]
    Maslov(MaslovArgs),
    /// Write a curve file.
    GenCurve(GenCurveArgs),
    /// Render a curve and inscriptions as SVG.
    Render {
        curve: PathBuf,
        inscriptions: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the regularity and embeddedness checks for a curve file.
    Validate { curve: PathBuf },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub curve: PathBuf,
    /// "s t phi" or "Ax Ay Bx By Cx Cy Dx Dy".
    #[arg(required = true, num_args = 1..)]
    pub quad: Vec<String>,
    /// Seeds per axis of the 4-torus grid.
    #[arg(long, default_value_t = 12)]
    pub grid: usize,
    /// Residual tolerance relative to the curve diameter.
    #[arg(long, default_value_t = 1e-11)]
    pub newton_tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub dedup_tol: f64,
    /// Minimum |A - C| relative to the curve diameter.
    #[arg(long, default_value_t = 1e-3)]
    pub degen_tol: f64,
    #[arg(long, env = "PEG_SOLVER_THREADS")]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MaslovArgs {
    pub curve: PathBuf,
    pub m: i64,
    pub n: i64,
    /// Loop on gamma x gamma under the form r dz^dzbar + (1 - r) dw^dwbar.
    #[arg(long, conflicts_with = "map")]
    pub weights: Option<f64>,
    /// Loop on an image torus: "ft:T" for F_t, "rfs:S:PHI" for R_phi F_s.
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Circle,
    Ellipse,
    Random,
}

#[derive(Debug, Args)]
pub struct GenCurveArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Mode cutoff K of random curves.
    #[arg(long = "k", default_value_t = 8)]
    pub k_max: usize,
    #[arg(long, default_value_t = 2.5)]
    pub decay: f64,
    /// Ellipse semi-axis along x.
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    /// Ellipse semi-axis along y.
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
