use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dcsi::{parse_config, Experiment, Preset};

#[derive(Parser)]
#[command(
    name = "sim",
    version,
    about = "Distributed-CSI zero-forcing simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named preset or a TOML config and write a CSV.
    Run {
        /// fig1, fig2, fig3, mg_suite or bounds_suite
        #[arg(required_unless_present = "config", conflicts_with = "config")]
        preset: Option<Preset>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the quantization-distortion bound checks.
    Bounds {
        /// Samples per check
        #[arg(long, default_value_t = dcsi::experiment::BOUNDS_SAMPLES)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    out: PathBuf,
    /// Overrides the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides trials per channel (per codebook for RVQ) or bound samples
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads; results do not depend on this
    #[arg(long, env = "SIM_THREADS")]
    threads: Option<usize>,
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    let (mut experiment, common) = match cli.command {
        Command::Run {
            preset,
            config,
            common,
        } => {
            let exp = match (preset, config) {
                (Some(p), _) => p.experiment(),
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    let cfg =
                        parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?;
                    Experiment::Sweep(cfg)
                }
                (None, None) => unreachable!("clap requires a preset or --config"),
            };
            (exp, common)
        }
        Command::Bounds { samples, common } => (Experiment::Bounds { samples, seed: 0 }, common),
    };
    if let Some(seed) = common.seed {
        experiment.set_seed(seed);
    }
    if let Some(trials) = common.trials {
        experiment.set_trials(trials);
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        pool = pool.num_threads(n);
    }
    pool.build()?.install(|| experiment.run(&common.out))?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
