mod commands;
mod data;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hornex_core::learner::Mode;

/// Learn Horn approximations of datasets and compute their canonical bases.
#[derive(Debug, Parser)]
#[command(name = "hornex", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Learn a Horn approximation with the dataset as implication oracle.
    Learn(LearnArgs),
    /// Compute the exact canonical (Duquenne-Guigues) basis.
    ExactBasis(ExactArgs),
    /// Estimate precision and recall of a formula against a dataset.
    Eval(EvalArgs),
    /// Write a random dataset as a Burmeister context.
    GenRandom(GenArgs),
    /// Run a grid of learner runs and report the summary.
    Bench(BenchArgs),
    /// Serve interactive learning sessions over HTTP.
    Serve(ServeArgs),
}

/// Input dataset. Relative paths not found in the working directory are
/// looked up in `$HORNEX_DATA_DIR`.
#[derive(Debug, Args)]
struct DataArgs {
    /// Burmeister `.cxt` context or CSV table.
    #[arg(long)]
    data: PathBuf,
    /// Column scaling for CSV input [default: <data stem>.scaling.toml next to the data]
    #[arg(long)]
    scaling: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Approx,
    Strong,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Approx => Mode::Approx,
            ModeArg::Strong => Mode::StrongApprox,
        }
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x <= 1.0 {
        Ok(x)
    } else {
        Err(format!("must lie in (0, 1], got {x}"))
    }
}

fn open_unit_interval(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(format!("must lie in (0, 1), got {x}"))
    }
}

fn probability(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("must lie in [0, 1], got {x}"))
    }
}

#[derive(Debug, Args)]
struct LearnArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Learner settings as TOML; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Accuracy parameter.
    #[arg(long, value_parser = unit_interval, required_unless_present = "config")]
    epsilon: Option<f64>,
    /// Confidence parameter.
    #[arg(long, value_parser = unit_interval, required_unless_present = "config")]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    seed: Option<u64>,
    /// Cache counterexamples and confirmed implications.
    #[arg(long)]
    cache: bool,
    /// Keep every implication of the hypothesis valid in the data.
    #[arg(long)]
    valid_hypothesis: bool,
    /// Stop after this many counterexamples (exit code 2).
    #[arg(long)]
    max_counterexamples: Option<u64>,
    /// Formula output, one JSON implication per line.
    #[arg(long)]
    out: PathBuf,
    /// Run report output [default: standard output]
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    out: PathBuf,
    /// Give up after enumerating this many sets (exit code 2).
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Formula to evaluate, one JSON implication per line.
    #[arg(long)]
    basis: PathBuf,
    /// Hoeffding confidence parameter.
    #[arg(long, value_parser = open_unit_interval, conflicts_with = "samples")]
    eta: Option<f64>,
    /// Hoeffding accuracy parameter.
    #[arg(long, value_parser = open_unit_interval, conflicts_with = "samples")]
    t: Option<f64>,
    /// Fixed number of samples instead of the Hoeffding bound.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report output [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Take rows, attributes and density from this dataset unless given.
    #[arg(long)]
    like: Option<PathBuf>,
    /// Scaling for a CSV `--like` dataset.
    #[arg(long, requires = "like")]
    scaling: Option<PathBuf>,
    #[arg(long, required_unless_present = "like")]
    rows: Option<usize>,
    #[arg(long, required_unless_present = "like")]
    attrs: Option<usize>,
    /// Probability of each incidence.
    #[arg(long, value_parser = probability, required_unless_present = "like")]
    density: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output `.cxt` file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Accuracy values [default: 0.1,0.01,0.001; with --extreme also 0.0001]
    #[arg(long, value_delimiter = ',', value_parser = unit_interval)]
    epsilon: Vec<f64>,
    /// Confidence values; the grid is every epsilon with every delta.
    #[arg(long, value_delimiter = ',', value_parser = unit_interval, default_value = "0.1")]
    delta: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    repetitions: u32,
    #[arg(long, value_enum, default_value = "approx")]
    mode: ModeArg,
    /// Master seed; each run gets its own derived seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    cache: bool,
    #[arg(long)]
    valid_hypothesis: bool,
    /// Evaluation samples per run [default: Hoeffding bound for eta = 0.001, t = 0.01]
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    eval_samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    eval_seed: u64,
    /// Allow epsilon below 0.001. Such runs take minutes to hours.
    #[arg(long)]
    extreme: bool,
    /// Per-run records as JSON lines.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock times in the records.
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    bind: String,
    /// Dataset to offer for automatic answering, named by its file stem.
    /// Repeatable. Without any, every query goes to the human expert.
    #[arg(long)]
    data: Vec<PathBuf>,
    /// Directory for session logs; sessions found there are restored.
    #[arg(long)]
    state_dir: Option<PathBuf>,
}

/// How a command ended.
pub enum Outcome {
    Done,
    /// Stopped early: counterexample cap, budget or sample-count overflow.
    Stopped,
}

fn main() -> ExitCode {
    // usage errors exit with 1; 2 is reserved for runs that stopped early
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Learn(a) => commands::learn(a),
        Command::ExactBasis(a) => commands::exact_basis(a),
        Command::Eval(a) => commands::eval(a),
        Command::GenRandom(a) => commands::gen_random(a),
        Command::Bench(a) => commands::bench(a),
        Command::Serve(a) => commands::serve(a),
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Stopped) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {}", chain_message(&e));
            ExitCode::from(1)
        }
    }
}

/// The error chain joined with ": ", skipping causes the previous message
/// already ends with.
fn chain_message(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if out.ends_with(&msg) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&msg);
    }
    out
}
