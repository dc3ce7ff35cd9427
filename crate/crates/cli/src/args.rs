use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wpcn_core::experiments::ConfigOverrides;
use wpcn_core::{EhModel, Method, Scheme};

#[derive(Debug, Parser)]
#[command(
    name = "wpcn-select",
    version,
    about = "Outage of k-th best device selection in wireless powered networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one configuration point with one or more methods.
    Compute(PointArgs),
    /// Evaluate a grid over one parameter.
    Sweep(SweepArgs),
    /// Monte Carlo estimate at one configuration point.
    Simulate(PointArgs),
    /// Cross-check methods; exits with status 1 if any gap is out of tolerance.
    Compare(CompareArgs),
    /// Write the dataset behind one evaluation figure.
    ReproduceFigure(FigureArgs),
    /// Find the harvesting fraction t1 that minimizes outage.
    FindT1(FindT1Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Rs,
    Sbs,
    Ebs,
    Ibs,
    Mms,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Rs => Scheme::Rs,
            SchemeArg::Sbs => Scheme::Sbs,
            SchemeArg::Ebs => Scheme::Ebs,
            SchemeArg::Ibs => Scheme::Ibs,
            SchemeArg::Mms => Scheme::Mms,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Linear,
    Nonlinear,
}

impl From<ModelArg> for EhModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Linear => EhModel::Linear,
            ModelArg::Nonlinear => EhModel::NonLinear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Analytic,
    Evt,
    Highsnr,
    Mc,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Analytic => Method::Analytic,
            MethodArg::Evt => Method::Evt,
            MethodArg::Highsnr => Method::HighSnr,
            MethodArg::Mc => Method::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every point-based subcommand. Unset flags fall back to
/// the config file, then to the reference setting.
#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Order index of the scheduled device (1 = best).
    #[arg(long)]
    pub k: Option<usize>,
    /// Second order index; switches to pair selection (rs or sbs).
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Repeat to evaluate several methods.
    #[arg(long, value_enum)]
    pub method: Vec<MethodArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub pt_dbm: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub noise_dbm: Option<f64>,
    /// Number of devices M.
    #[arg(long)]
    pub m: Option<usize>,
    /// Channel estimation error variance (Monte Carlo only).
    #[arg(long)]
    pub sigma_e2: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

impl PointArgs {
    pub fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            scheme: self.scheme.map(Into::into),
            k: self.k,
            j: self.j,
            model: self.model.map(Into::into),
            method: self.method.first().copied().map(Into::into),
            pt_dbm: self.pt_dbm,
            t1: self.t1,
            q_db: self.q_db,
            noise_dbm: self.noise_dbm,
            m: self.m,
            sigma_e2: self.sigma_e2,
            trials: self.trials,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Swept parameter: pt_dbm, k, j, m, t1 or sigma_e2.
    #[arg(long)]
    pub param: Option<String>,
    /// Grid as `a,b,c` or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Absolute gap accepted between methods.
    #[arg(long, default_value_t = 5e-3)]
    pub tolerance: f64,
    /// Gaps within this many Monte Carlo standard errors also pass.
    #[arg(long, default_value_t = 3.0)]
    pub z_limit: f64,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// fig2a, fig2b, fig3a, fig3b, fig4, fig5 or fig6.
    pub figure: String,
    /// Output directory.
    #[arg(long, default_value = "figures")]
    pub out: PathBuf,
    /// Monte Carlo trials per row (0 skips simulation).
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct FindT1Args {
    #[command(flatten)]
    pub point: PointArgs,
    /// Final bracket width of the golden-section search.
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
}
