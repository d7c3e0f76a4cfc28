//! `pack3d`: generate datasets, run and compare solvers, serve the game API.

use std::net::SocketAddr;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pack3d_bench::config::{DatasetSource, DatasetSpec, PolicySpec, RunConfig, SolverSpec};
use pack3d_bench::report::RunReport;
use pack3d_bench::server::ServeConfig;
use pack3d_bench::{compare, dataset, run, server};
use pack3d_core::datagen::Origin;
use pack3d_core::lookahead::SearchBudget;
use pack3d_core::multibin::Closing;
use pack3d_core::policies::{Aggregate, Estimator};
use pack3d_core::runner::Search;
use pack3d_core::state::{BinConfig, RewardMode};

#[derive(Parser)]
#[command(name = "pack3d", version, about = "Online 3D bin packing benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a dataset of generated item sequences.
    Gen(GenArgs),
    /// Run a solver over a dataset and write a report.
    Run(RunArgs),
    /// Print reports side by side.
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
    /// Serve the game API under /v1/.
    Serve(ServeArgs),
}

#[derive(Args)]
struct BinArgs {
    /// Bin length, width and height in grid cells.
    #[arg(long, num_args = 3, value_names = ["L", "W", "H"], default_values_t = [10, 10, 10])]
    bin: Vec<u32>,
}

impl BinArgs {
    fn bin(&self) -> Result<BinConfig> {
        Ok(BinConfig::new(self.bin[0], self.bin[1], self.bin[2])?)
    }
}

#[derive(Args)]
struct GeneratedArgs {
    /// RS, CUT1 or CUT2.
    #[arg(long, default_value = "CUT2")]
    origin: Origin,
    #[arg(long, default_value_t = 2000)]
    count: usize,
    /// Smallest item side; defaults to 2.
    #[arg(long)]
    dim_min: Option<u32>,
    /// Largest item side; defaults to half the smallest bin side.
    #[arg(long)]
    dim_max: Option<u32>,
}

impl GeneratedArgs {
    fn spec(&self, bin: &BinConfig, seed: u64) -> DatasetSpec {
        let mut spec = DatasetSpec::standard(self.origin, bin, self.count, seed);
        spec.dim_min = self.dim_min.unwrap_or(spec.dim_min);
        spec.dim_max = self.dim_max.unwrap_or(spec.dim_max);
        spec
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    bin: BinArgs,
    #[command(flatten)]
    data: GeneratedArgs,
    #[arg(long)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyKind {
    BoundaryRule,
    Dbl,
    Random,
    External,
}

#[derive(Clone, Copy, ValueEnum)]
enum AggregateArg {
    Mean,
    Sum,
}

#[derive(Clone, Copy, ValueEnum)]
enum RewardArg {
    StepWise,
    Termination,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "boundary-rule")]
    policy: PolicyKind,
    /// Weight of the cuboid volume term of the boundary rule.
    #[arg(long, default_value_t = 1)]
    volume_scale: i64,
    #[arg(long, value_enum, default_value = "mean")]
    aggregate: AggregateArg,
    /// Program answering the line bridge, for `--policy external`.
    #[arg(long)]
    bridge_program: Option<String>,
    #[arg(long = "bridge-arg", allow_hyphen_values = true)]
    bridge_args: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    bridge_timeout_ms: u64,
    /// Visible items, the current one included.
    #[arg(long, default_value_t = 1)]
    lookahead: usize,
    /// greedy, mcts or brute-force.
    #[arg(long, default_value = "greedy")]
    search: Search,
    #[arg(long, default_value_t = 600)]
    simulations: usize,
    #[arg(long, default_value_t = 1.0)]
    exploration: f64,
    /// zero, greedy-fit or free-volume.
    #[arg(long, default_value = "free-volume")]
    estimator: Estimator,
    /// Allow swapping an item's length and width.
    #[arg(long)]
    rotation: bool,
    #[arg(long, value_enum, default_value = "step-wise")]
    reward_mode: RewardArg,
    #[arg(long, default_value_t = 1)]
    bins: usize,
    /// reroute or drop.
    #[arg(long, default_value = "reroute")]
    closing: Closing,
    /// Sequences per bin concatenated into one multi-bin stream.
    #[arg(long, default_value_t = 3)]
    stream_factor: usize,
}

impl SolverArgs {
    fn spec(&self, seed: u64) -> Result<SolverSpec> {
        let policy = match self.policy {
            PolicyKind::BoundaryRule => PolicySpec::BoundaryRule {
                volume_scale: self.volume_scale,
                aggregate: match self.aggregate {
                    AggregateArg::Mean => Aggregate::Mean,
                    AggregateArg::Sum => Aggregate::Sum,
                },
            },
            PolicyKind::Dbl => PolicySpec::Dbl,
            PolicyKind::Random => PolicySpec::Random,
            PolicyKind::External => PolicySpec::External {
                program: self.bridge_program.clone().context("--policy external needs --bridge-program")?,
                args: self.bridge_args.clone(),
                timeout_ms: self.bridge_timeout_ms,
            },
        };
        let search = match self.search {
            Search::Mcts(_) => Search::Mcts(SearchBudget { simulations: self.simulations, exploration: self.exploration, seed }),
            other => other,
        };
        Ok(SolverSpec {
            policy,
            lookahead: self.lookahead,
            search,
            estimator: self.estimator,
            rotation: self.rotation,
            reward_mode: match self.reward_mode {
                RewardArg::StepWise => RewardMode::StepWise,
                RewardArg::Termination => RewardMode::Termination,
            },
            bins: self.bins,
            closing: self.closing,
            stream_factor: self.stream_factor,
            seed,
        })
    }
}

#[derive(Args)]
struct RunArgs {
    /// Full run configuration as JSON; other flags except --seed and --out are ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seeds the solver; with a generated dataset it also seeds generation.
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    bin: BinArgs,
    /// Dataset file; sequences are generated in memory when absent.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[command(flatten)]
    data: GeneratedArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Report path; a `.timings.jsonl` sidecar is written next to it.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Also print every episode, not only the means.
    #[arg(long)]
    episodes: bool,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    bin: BinArgs,
    /// Dataset whose sequences games can be created from by index.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Directory holding the game event logs.
    #[arg(long)]
    store: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

fn file_source(path: PathBuf) -> Result<DatasetSource> {
    let (_, sha256) = dataset::read(&path)?;
    Ok(DatasetSource::File { path, sha256 })
}

fn run_config(args: RunArgs) -> Result<RunConfig> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut config: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.solver.seed = args.seed;
        if args.out.is_some() {
            config.output = args.out;
        }
        return Ok(config);
    }
    let bin = args.bin.bin()?;
    let dataset = match args.dataset {
        Some(path) => file_source(path)?,
        None => DatasetSource::Generated(args.data.spec(&bin, args.seed)),
    };
    Ok(RunConfig { bin, dataset, solver: args.solver.spec(args.seed)?, output: args.out })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(args) => {
            let bin = args.bin.bin()?;
            let spec = args.data.spec(&bin, args.seed);
            let sequences = dataset::generate(&bin, &spec)?;
            let sha = dataset::write(&args.out, &sequences)?;
            println!("{} sequences -> {} (sha256 {sha})", sequences.len(), args.out.display());
        }
        Command::Run(args) => {
            let show_episodes = args.episodes;
            let config = run_config(args)?;
            let report = run::run_and_write(&config)?;
            if show_episodes {
                print!("{}", report.table());
            } else {
                println!("{}", compare::compare(std::slice::from_ref(&report))?);
            }
        }
        Command::Compare { reports } => {
            let reports = reports.iter().map(|p| RunReport::read(p)).collect::<Result<Vec<_>>>()?;
            print!("{}", compare::compare(&reports)?);
        }
        Command::Serve(args) => {
            if args.solver.bins != 1 {
                bail!("the game service plays a single bin");
            }
            let config = ServeConfig {
                bin: args.bin.bin()?,
                dataset: args.dataset.map(file_source).transpose()?,
                solver: args.solver.spec(args.seed)?,
                store: args.store,
                addr: args.addr,
            };
            tokio::runtime::Runtime::new()?.block_on(server::serve(config))?;
        }
    }
    Ok(())
}
