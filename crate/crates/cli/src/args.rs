use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freshness_core::sweep::{Coupling, SweepMode, SweepParam};
use freshness_core::WriteTimeDistribution;

#[derive(Debug, Parser)]
#[command(
    name = "freshness",
    version,
    about = "Age of information for reads in leader-based replicated storage"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form mean read age at a single point.
    Analytic(AnalyticArgs),
    /// Monte Carlo estimate at a single point, next to the closed form.
    Simulate(SimulateArgs),
    /// Sweep one parameter and write one row per point.
    Sweep(SweepArgs),
    /// Write the preset sweeps behind a figure (fig2..fig5, or all).
    Figure(FigureArgs),
}

/// Model parameters shared by `analytic` and `simulate`.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Number of nodes holding the chunk.
    #[arg(long)]
    pub n: u32,
    /// Number of leaders.
    #[arg(long)]
    pub l: Option<u32>,
    /// Query size: distinct nodes each read goes to.
    #[arg(long)]
    pub r: u32,
    /// Explicit commit time. Mutually exclusive with --k.
    #[arg(long, conflicts_with = "k")]
    pub c: Option<f64>,
    /// Relative leader write speed; commit time becomes l / (k·lambda).
    #[arg(long)]
    pub k: Option<f64>,
    /// Follower write rate; also the default exponential rate.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Follower write-time law: exp:RATE, uniform:B or det:D.
    #[arg(long, value_parser = parse_dist)]
    pub dist: Option<WriteTimeDistribution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecordFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Print the leader-speed threshold above which a second leader helps.
    #[arg(long)]
    pub threshold: bool,
    #[arg(long, value_enum, default_value_t = RecordFormat::Text)]
    pub format: RecordFormat,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Queried slots after warmup.
    #[arg(long, default_value_t = 100_000)]
    pub slots: u64,
    /// Random seed; drawn from system entropy and echoed when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Warmup rounds; chosen from F_w(c) when absent.
    #[arg(long)]
    pub warmup: Option<u64>,
    /// Append one row to this CSV file (header written if the file is new).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = RecordFormat::Text)]
    pub format: RecordFormat,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Parameter to vary: l, n, k or r.
    #[arg(long, value_parser = parse_param)]
    pub vary: SweepParam,
    #[arg(long)]
    pub from: u32,
    #[arg(long)]
    pub to: u32,
    #[arg(long, default_value_t = 1)]
    pub step: u32,
    /// Fixed parameters; each is required unless it is the one varied
    /// (or, for r, set by --couple-r).
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub l: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, value_parser = parse_dist)]
    pub dist: Option<WriteTimeDistribution>,
    /// Couple the query size to the node count: A:B means r = A + floor(n/B).
    #[arg(long, value_parser = parse_coupling)]
    pub couple_r: Option<Coupling>,
    #[arg(long, value_parser = parse_mode, default_value = "analytic")]
    pub mode: SweepMode,
    #[arg(long, default_value_t = 100_000)]
    pub slots: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Curve label written into every row.
    #[arg(long, default_value = "sweep")]
    pub curve: String,
    /// Output file; stdout when absent. A `.meta.json` sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// fig2, fig3, fig4, fig5 or all.
    pub id: String,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_parser = parse_mode, default_value = "analytic")]
    pub mode: SweepMode,
    #[arg(long, default_value_t = 100_000)]
    pub slots: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
}

fn parse_dist(s: &str) -> Result<WriteTimeDistribution, String> {
    s.parse().map_err(|e: freshness_core::Error| e.to_string())
}

fn parse_param(s: &str) -> Result<SweepParam, String> {
    s.parse().map_err(|e: freshness_core::Error| e.to_string())
}

fn parse_coupling(s: &str) -> Result<Coupling, String> {
    s.parse().map_err(|e: freshness_core::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<SweepMode, String> {
    s.parse().map_err(|e: freshness_core::Error| e.to_string())
}
