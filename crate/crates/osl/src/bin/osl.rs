//! The `osl` command line tool: cluster point files, run Monte Carlo risk
//! campaigns, benchmark via subsampled ARI, evaluate the theoretical bound,
//! and generate synthetic datasets.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use osl::cli::{
    cmd_bench, cmd_bound, cmd_cluster, cmd_generate, cmd_risk, CliResult, ExperimentConfig,
};
use osl::error::Error;
use osl::evaluate::Algorithm;

#[derive(Parser)]
#[command(name = "osl", version, about = "Outlier-robust single linkage clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a point file and print labels plus the selection trace.
    Cluster {
        /// Input file (CSV or whitespace-delimited coordinates).
        file: PathBuf,
        /// Number of clusters to recover.
        #[arg(long)]
        m: usize,
        /// Radius selection rule.
        #[arg(long, default_value = "osl")]
        algo: Algorithm,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Monte Carlo risk campaign described by a JSON config.
    Risk {
        /// JSON experiment configuration.
        #[arg(long)]
        config: PathBuf,
        /// Worker thread count (overrides OSL_THREADS and the config).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Subsampling ARI benchmark on a labeled dataset.
    Bench {
        /// Input file with a trailing integer label column.
        file: PathBuf,
        /// Number of clusters to recover.
        #[arg(long)]
        m: usize,
        /// Radius selection rules to compare.
        #[arg(long, value_delimiter = ',', default_values_t = vec![Algorithm::Osl, Algorithm::Sl])]
        algo: Vec<Algorithm>,
        /// Number of subsampling replications.
        #[arg(long, default_value_t = 1000)]
        b: u64,
        /// Subsample fraction in (0, 1].
        #[arg(long, default_value_t = 0.75)]
        fraction: f64,
        /// RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Label value marking outliers in the input file.
        #[arg(long, default_value_t = 0)]
        noise_label: i64,
        /// Summary CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional per-replication ARI CSV path.
        #[arg(long)]
        per_rep: Option<PathBuf>,
        /// Worker thread count (overrides OSL_THREADS).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Evaluate the theoretical risk bound on a radius grid.
    Bound {
        /// JSON file with the model constants.
        #[arg(long)]
        params: PathBuf,
        /// Radius grid as lo:hi:steps.
        #[arg(long)]
        grid: String,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a dataset from a built-in model and write it as CSV.
    Generate {
        /// Model name: squares|circles|sine|sine_highdim|gaussian_sine|example2.
        #[arg(long)]
        model: String,
        /// Separation regime for squares/circles/sine.
        #[arg(long)]
        delta_case: Option<String>,
        /// Ambient dimension (sine_highdim only).
        #[arg(long)]
        dim: Option<usize>,
        /// Base variance (gaussian_sine only).
        #[arg(long)]
        sigma2: Option<f64>,
        /// Correlation (gaussian_sine only).
        #[arg(long)]
        rho: Option<f64>,
        /// Sample size.
        #[arg(long)]
        n: usize,
        /// Outlier proportion.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Cluster { file, m, algo, out } => cmd_cluster(&file, m, algo, out.as_deref()),
        Command::Risk { config, threads } => {
            let text = std::fs::read_to_string(&config).map_err(|e| osl::cli::CliError {
                code: 2,
                error: e.into(),
            })?;
            let cfg: ExperimentConfig =
                serde_json::from_str(&text).map_err(|e| osl::cli::CliError {
                    code: 2,
                    error: Error::Config(format!("bad config file: {e}")),
                })?;
            cmd_risk(&cfg, threads)
        }
        Command::Bench {
            file,
            m,
            algo,
            b,
            fraction,
            seed,
            noise_label,
            out,
            per_rep,
            threads,
        } => cmd_bench(
            &file,
            &algo,
            m,
            b,
            fraction,
            seed,
            noise_label,
            out.as_deref(),
            per_rep.as_deref(),
            threads,
        ),
        Command::Bound { params, grid, out } => cmd_bound(&params, &grid, out.as_deref()),
        Command::Generate {
            model,
            delta_case,
            dim,
            sigma2,
            rho,
            n,
            eps,
            seed,
            out,
        } => cmd_generate(
            &model,
            delta_case.as_deref(),
            dim,
            sigma2,
            rho,
            n,
            eps,
            seed,
            out.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.error);
            ExitCode::from(e.code as u8)
        }
    }
}
