mod commands;
mod report;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit codes: 0 success, 2 invalid input, 3 claim violated, 4 numerical failure.
#[derive(Parser)]
#[command(name = "homflow", version, about = "Ricci flow of invariant metrics on homogeneous spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in spaces.
    List,
    /// Write a built-in space as a presentation document.
    Export {
        #[arg(long)]
        builtin: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a presentation and, optionally, certify an ideal.
    Check(CheckArgs),
    /// Ricci tensor, operator spectrum and scalar curvature of a metric.
    Ricci(RicciArgs),
    /// Positive Ricci direction along a compact fiber, with the term audit.
    Bochner(BochnerArgs),
    /// Integrate the flow from one metric or a seeded sweep.
    Flow(FlowArgs),
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
pub struct SpaceArgs {
    /// Name of a built-in space (see `list`).
    #[arg(long)]
    pub builtin: Option<String>,
    /// Presentation document (JSON).
    #[arg(long)]
    pub space_file: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct MetricArgs {
    /// `identity`, `random` (seeded), or a path to a metric document.
    #[arg(long, default_value = "identity")]
    pub metric: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Clone)]
pub struct IdealArgs {
    /// Basis vector of the compact ideal as a JSON array; repeat per vector.
    #[arg(long, value_name = "VECTOR")]
    pub ideal: Vec<String>,
    /// Take the ideal as the stable derived algebra of the whole algebra.
    #[arg(long, conflicts_with = "ideal")]
    pub auto: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub ideal: IdealArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args)]
pub struct RicciArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    /// Cross-check against the connection-based curvature on this metric
    /// and on `--verify-count` seeded random metrics.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value_t = 10)]
    pub verify_count: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args)]
pub struct BochnerArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub ideal: IdealArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args)]
pub struct FlowArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub ideal: IdealArgs,
    #[arg(long, default_value_t = 100.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub sample_dt: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub extinction_eps: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_steps: usize,
    /// Trajectory CSV; the verdict is written next to it as `<stem>.verdict.json`.
    /// With `--sweep`, the aggregate JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Long-format `t,series,value` CSV for plotting.
    #[arg(long, value_name = "PATH")]
    pub emit_plot_data: Option<PathBuf>,
    /// Run N seeded random metrics (seeds `seed..seed+N`) in parallel.
    #[arg(long, value_name = "N")]
    pub sweep: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => commands::list(),
        Command::Export { builtin, out } => commands::export(&builtin, out.as_deref()),
        Command::Check(args) => commands::check(&args),
        Command::Ricci(args) => commands::ricci(&args),
        Command::Bochner(args) => commands::bochner(&args),
        Command::Flow(args) => commands::flow(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
