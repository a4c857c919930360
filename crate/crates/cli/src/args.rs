use std::path::PathBuf;

use chibar::cones::CaseId;
use chibar::dist::DEFAULT_EPSILON_MULTIPLIER;
use chibar::mc::{DEFAULT_REPS, DEFAULT_SAMPLE_SIZE};
use chibar::SymPD2;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "chibar",
    version,
    about = "Chi-bar-squared weights, distributions and simulations for two boundary parameters"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mixture weights as a JSON report.
    Weights(ModelArgs),
    /// Limiting CDF on a grid or at given points.
    Cdf(CdfArgs),
    /// Limiting-law quantiles.
    Quantile(QuantileArgs),
    /// Region label and statistic for points read as CSV `z1,z2`.
    Regions(RegionsArgs),
    /// Monte Carlo simulation of the statistic.
    Simulate(SimulateArgs),
    /// Data-level simulation against the analytic overlays; exit 2 if the
    /// primary overlay misses its band.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    /// Alternative cone is the image of the nonnegative quadrant.
    Correct,
    /// Alternative cone is the whole upper half-plane.
    Selfliang,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Draw the whitened score directly.
    Score,
    /// Bivariate-normal-mean model with --sample-size observations.
    Data,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Boundary configuration: 7 (both parameters of interest) or 8 (one
    /// nuisance parameter).
    #[arg(long = "case", value_parser = parse_case)]
    pub case: u8,

    /// Score correlation, in (-1, 1).
    #[arg(long, value_parser = parse_rho, allow_hyphen_values = true, required_unless_present = "info")]
    pub rho: Option<f64>,

    /// Fisher information as `a11,a12,a22` (symmetric positive definite).
    #[arg(long, value_parser = parse_info, allow_hyphen_values = true, conflicts_with = "rho")]
    pub info: Option<SymPD2>,

    /// Case 8 alternative cone.
    #[arg(long, value_enum, default_value_t = Variant::Correct)]
    pub variant: Variant,

    /// Repair-term support as a multiple of the signed-density root (rho < 0).
    #[arg(long, value_parser = parse_positive, default_value_t = DEFAULT_EPSILON_MULTIPLIER)]
    pub epsilon_multiplier: f64,
}

impl ModelArgs {
    pub fn rho(&self) -> f64 {
        match (&self.info, self.rho) {
            (Some(i), _) => chibar::linalg2::correlation_from_information(i),
            (None, Some(r)) => r,
            (None, None) => unreachable!("clap requires --rho or --info"),
        }
    }

    pub fn case_id(&self) -> CaseId {
        match (self.case, self.variant) {
            (7, _) => CaseId::Case7,
            (_, Variant::Correct) => CaseId::Case8Correct,
            (_, Variant::Selfliang) => CaseId::Case8Selfliang,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CdfArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Evaluation points, comma separated; overrides the grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<f64>,

    /// Number of grid points on [0, --x-max].
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..), default_value_t = 512)]
    pub grid_points: u32,

    /// Upper end of the grid.
    #[arg(long, value_parser = parse_positive, default_value_t = 15.0)]
    pub x_max: f64,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct QuantileArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Probabilities in (0, 1), comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_probability, default_value = "0.95")]
    pub p: Vec<f64>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RegionsArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// CSV file with header `z1,z2`; `-` reads standard input. Points are in
    /// whitened coordinates with --rho and in original score coordinates
    /// with --info.
    #[arg(long, default_value = "-")]
    pub points: PathBuf,

    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// Monte Carlo replicates.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value_t = DEFAULT_REPS as u64)]
    pub reps: u64,

    /// Observations per replicate (data level only).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..), default_value_t = DEFAULT_SAMPLE_SIZE as u64)]
    pub sample_size: u64,

    /// Base seed of the random streams.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; results do not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub sim: SimArgs,

    #[arg(long, value_enum, default_value_t = Mode::Data)]
    pub mode: Mode,

    /// Points of the plotting grid written by --grid-csv.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..), default_value_t = 512)]
    pub grid_points: u32,

    /// JSON summary path; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Write `x,ecdf,f_corr,f_selfliang,f_5050` on the grid.
    #[arg(long)]
    pub grid_csv: Option<PathBuf>,

    /// Write every simulated statistic with its region.
    #[arg(long)]
    pub samples_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Score correlation, in (-1, 1).
    #[arg(long, value_parser = parse_rho, allow_hyphen_values = true)]
    pub rho: f64,

    #[command(flatten)]
    pub sim: SimArgs,

    /// Repair-term support as a multiple of the signed-density root.
    #[arg(long, value_parser = parse_positive, default_value_t = DEFAULT_EPSILON_MULTIPLIER)]
    pub epsilon_multiplier: f64,

    /// JSON report path; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_case(s: &str) -> Result<u8, String> {
    match s {
        "7" => Ok(7),
        "8" => Ok(8),
        _ => Err(format!("case must be 7 or 8, got {s}")),
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("{s}: {e}"))
}

fn parse_rho(s: &str) -> Result<f64, String> {
    let r = parse_f64(s)?;
    if r > -1.0 && r < 1.0 {
        Ok(r)
    } else {
        Err(format!("rho must lie in (-1, 1), got {s}"))
    }
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let p = parse_f64(s)?;
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(format!("probability must lie in (0, 1), got {s}"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {s}"))
    }
}

fn parse_info(s: &str) -> Result<SymPD2, String> {
    let parts: Vec<f64> = s.split(',').map(parse_f64).collect::<Result<_, _>>()?;
    let [a11, a12, a22] = parts[..] else {
        return Err(format!("expected a11,a12,a22, got {s}"));
    };
    SymPD2::new(a11, a12, a22).map_err(|e| e.to_string())
}
