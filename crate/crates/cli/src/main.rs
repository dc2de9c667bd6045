mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Random-walk dismantling of ER, BA and Delaunay-lattice networks.
#[derive(Parser, Debug)]
#[command(name = "netslice", version)]
pub struct Cli {
    /// TOML file of default settings; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write generated networks as edge lists.
    Generate(GenerateArgs),
    /// Dismantle one network from an edge-list file.
    Walk(WalkArgs),
    /// Run a full campaign and write every summary.
    Experiment(ExperimentArgs),
    /// Summarize event, trace and dendrogram files.
    Stats(StatsArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelArg {
    Er,
    Ba,
    Geo,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Sequential,
    Parallel,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScopeArg {
    AllLevels,
    RootOnly,
}

/// Generator parameters shared by `generate` and `experiment`.
#[derive(Args, Debug, Default)]
pub struct GenFlags {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Target node count.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub er_p: Option<f64>,
    #[arg(long)]
    pub ba_attach: Option<usize>,
    #[arg(long)]
    pub geo_jitter: Option<f64>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub gen: GenFlags,
    /// Exact generator seed for a single network per model.
    #[arg(long, conflicts_with = "replications")]
    pub seed: Option<u64>,
    /// Networks per model, with seeds derived from the master seed.
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub master_seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WalkArgs {
    /// Edge-list file as written by `generate`.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Sequential walks to run, each on its own substream.
    #[arg(long)]
    pub walks: Option<usize>,
    #[arg(long)]
    pub master_seed: Option<u64>,
    /// Stop a parallel run after this many ticks.
    #[arg(long)]
    pub truncate_at_tick: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub gen: GenFlags,
    /// Networks per model.
    #[arg(long)]
    pub replications: Option<usize>,
    /// Sequential walks per network.
    #[arg(long)]
    pub walks: Option<usize>,
    /// Parallel dismantlings per network.
    #[arg(long)]
    pub parallel_runs: Option<usize>,
    #[arg(long)]
    pub master_seed: Option<u64>,
    /// Region boundary on the small-part axis; defaults to n / 4.
    #[arg(long)]
    pub region_cut: Option<f64>,
    #[arg(long, value_enum)]
    pub scope: Option<ScopeArg>,
    #[arg(long)]
    pub truncate_at_tick: Option<u64>,
    /// Parallel runs per model written out as dendrograms.
    #[arg(long)]
    pub exemplars: Option<usize>,
    /// Worker threads; 0 runs serially.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Split-event CSV files.
    #[arg(long, num_args = 1..)]
    pub events: Vec<PathBuf>,
    /// Walk-trace CSV files, one replication each.
    #[arg(long, num_args = 1..)]
    pub traces: Vec<PathBuf>,
    /// Dendrogram JSON files, one replication each.
    #[arg(long, num_args = 1..)]
    pub dendrogram: Vec<PathBuf>,
    /// Network size; defaults to the largest parent in the events.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub region_cut: Option<f64>,
    #[arg(long, value_enum)]
    pub scope: Option<ScopeArg>,
    /// Output directory; without it the summary goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit status when a campaign finished with failed replications.
pub const EXIT_PARTIAL: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_PARTIAL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
