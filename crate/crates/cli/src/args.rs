use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "inflatlab", version, about = "Short-map variance and first-eigenvalue maximization on tori and SU(2)")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// Worker threads; falls back to INFLATLAB_THREADS, then 1.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub group: Group,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// Flat tori `ℝ²/(ℤ(1,0) ⊕ ℤ(a,b))`.
    #[command(subcommand)]
    Torus(TorusCmd),
    /// Left-invariant metrics on SU(2).
    #[command(subcommand)]
    Su2(Su2Cmd),
    /// Grid discretization of the torus.
    #[command(subcommand)]
    Discrete(DiscreteCmd),
    /// Re-verify stored results.
    #[command(subcommand)]
    Check(CheckCmd),
}

#[derive(Debug, Subcommand)]
pub enum TorusCmd {
    /// Lowest Laplace eigenvalues with multiplicities and dual generators.
    Spectrum(TorusSpectrum),
    /// Certified optimal pair for the flat metric.
    Solve(TorusParams),
}

#[derive(Debug, Subcommand)]
pub enum Su2Cmd {
    /// Check the eigenfunction table for h*_{u,v,w}.
    Table(Su2Table),
    /// Sample Φ over the quadrant.
    Landscape(Su2Landscape),
    /// Certified optimal pair for h_{a,b,c}.
    Solve(Su2Solve),
    /// First eigenvalue and optimal pair on the Berger sphere h_t.
    Berger(Su2Berger),
}

#[derive(Debug, Subcommand)]
pub enum DiscreteCmd {
    /// Ascent on the discrete first eigenvalue, with certificate and primal bound.
    Maximize(DiscreteMaximize),
}

#[derive(Debug, Subcommand)]
pub enum CheckCmd {
    /// Recompute a stored result and compare every field.
    Duality(CheckDuality),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TorusParams {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TorusSpectrum {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    /// Number of distinct eigenvalues.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Su2Table {
    #[arg(long)]
    pub u: f64,
    #[arg(long)]
    pub v: f64,
    #[arg(long)]
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Su2Landscape {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    /// Grid intervals per axis.
    #[arg(long, default_value_t = 40)]
    pub grid: usize,
    /// Side of the sampled box `[0, U]²`.
    #[arg(long, default_value_t = 5.0)]
    pub extent: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Su2Solve {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub c: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Su2Berger {
    #[arg(long)]
    pub t: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DiscreteMaximize {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    /// Grid resolution.
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    /// Seed of the iterative eigensolver's start block.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative eigenvalue gap defining the certificate cluster.
    #[arg(long, default_value_t = 1e-3)]
    pub cluster_tol: f64,
    /// Directory for history.csv, field.json and result.json.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// `csv` prints the ascent history instead of the JSON result.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    #[serde(skip, default = "json_format")]
    pub format: Format,
}

fn json_format() -> Format {
    Format::Json
}

#[derive(Debug, Clone, Args)]
pub struct CheckDuality {
    /// JSON produced by a `torus`, `su2` or `discrete` command.
    #[arg(long)]
    pub input: PathBuf,
}
