//! `lowpass`: filter kernels, filtered series and samples, and the three
//! boundary-value examples with divergence diagnostics.

mod commands;
mod error;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "lowpass", version, about = "Linear low-pass filters on functions and Fourier series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate order-N kernels in closed form and as Fourier partial sums.
    Kernels(KernelsArgs),
    /// Filter a Fourier series given as (k, alpha, beta) rows.
    FilterSeries(FilterSeriesArgs),
    /// Filter uniformly spaced (x, f) samples.
    FilterSamples(FilterSamplesArgs),
    /// Plucked string: profiles and the acceleration scan.
    String(StringArgs),
    /// Potential in a box: profiles and the top-wall field scan.
    Box(BoxArgs),
    /// Heat flow in a cylinder: profiles and the surface flux scan.
    Cylinder(CylinderArgs),
    /// Classify the convergence of a series, optionally after filtering.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Inclusive range of filter orders: `3`, `1..8`, `1..=8` or `1,2,5`.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct Orders(pub Vec<usize>);

impl FromStr for Orders {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{t}` is not an order"))
        };
        let orders: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty order range {s}"));
            }
            (a..=b).collect()
        } else {
            s.split(',').map(parse).collect::<Result<_, _>>()?
        };
        if orders.iter().any(|&n| n == 0 || n > 32) {
            return Err("orders must lie in 1..=32".into());
        }
        Ok(Orders(orders))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KernelsArgs {
    /// Filter range ε, with 0 < ε ≤ π.
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value = "1..8")]
    pub orders: Orders,
    /// Number of Fourier modes in the partial sums.
    #[arg(long, default_value_t = 4096)]
    pub kmax: usize,
    /// Points on [-ε, ε].
    #[arg(long, default_value_t = 1001)]
    pub grid: usize,
    /// Distance from breakpoints below which discrepancies are not judged.
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
    /// Allowed closed-form vs Fourier discrepancy away from breakpoints.
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    /// Fail with exit code 3 if any oracle comparison exceeds its tolerance.
    #[arg(long)]
    pub self_check: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FilterArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1)]
    pub order: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FilterSeriesArgs {
    /// CSV of (k, alpha, beta) rows, or a JSON series.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Half-width P of the period interval [-P, P].
    #[arg(long, default_value_t = input::DEFAULT_HALF_WIDTH)]
    pub half_width: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionArg {
    /// The samples repeat with period equal to the grid length.
    Periodic,
    /// The function vanishes outside the sampled interval.
    Zero,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FilterSamplesArgs {
    /// CSV of (x, f) rows on a uniform grid.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[arg(long, value_enum, default_value_t = ExtensionArg::Zero)]
    pub extension: ExtensionArg,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExampleArgs {
    /// Number of odd modes for profiles.
    #[arg(long, default_value_t = 2048)]
    pub modes: usize,
    /// Points per profile.
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    /// Points of the divergence scan.
    #[arg(long, default_value_t = 1001)]
    pub scan_grid: usize,
    /// Number of odd modes in the divergence scan.
    #[arg(long, default_value_t = lowpass::pde::DEFAULT_SCAN_MODES)]
    pub scan_modes: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StringArgs {
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    /// Initial displacement h at the midpoint.
    #[arg(long, default_value_t = 1.0)]
    pub height: f64,
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    /// Wave speed ν.
    #[arg(long, default_value_t = 1.0)]
    pub speed: f64,
    /// Time of the profiles and the scan.
    #[arg(long, default_value_t = 0.2)]
    pub time: f64,
    #[command(flatten)]
    pub example: ExampleArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoxArgs {
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Potential V₀ of the top wall.
    #[arg(long, default_value_t = 1.0)]
    pub v0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    #[arg(long, default_value_t = 1.0)]
    pub height: f64,
    /// Height of the profiles; defaults to the top wall.
    #[arg(long)]
    pub y: Option<f64>,
    #[command(flatten)]
    pub example: ExampleArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CylinderArgs {
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Surface temperature amplitude u₀.
    #[arg(long, default_value_t = 1.0)]
    pub u0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Material constant cμκ.
    #[arg(long, default_value_t = 1.0)]
    pub conductance: f64,
    /// Radius of the profiles; defaults to the surface.
    #[arg(long)]
    pub r: Option<f64>,
    #[command(flatten)]
    pub example: ExampleArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiagnoseArgs {
    /// CSV of (k, alpha, beta) rows, or a JSON series.
    #[arg(long)]
    pub input: PathBuf,
    /// Also classify the series after filtering at this range.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub order: usize,
    /// Use only the first modes of the input.
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long, default_value_t = input::DEFAULT_HALF_WIDTH)]
    pub half_width: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Kernels(a) => commands::kernels(a),
        Command::FilterSeries(a) => commands::filter_series(a),
        Command::FilterSamples(a) => commands::filter_samples(a),
        Command::String(a) => commands::string(a),
        Command::Box(a) => commands::boxed(a),
        Command::Cylinder(a) => commands::cylinder(a),
        Command::Diagnose(a) => commands::diagnose(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
