use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oasw_cli::{
    cmd_baseline, cmd_run_oasw, cmd_synth, cmd_train, cmd_tune, load_config, print_summaries, CliError, Overrides,
};

#[derive(Parser)]
#[command(name = "oasw", version, about = "Drift-adaptive stream classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(short, long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Parallel PSO candidate evaluations.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            out_dir: self.out_dir.clone(),
            jobs: self.jobs,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit the offline model, tuning it first if configured.
    Train(Common),
    /// Run every configured search and write the resolved config.
    Tune(Common),
    /// Replay the online split through the adaptive engine.
    RunOasw {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
    },
    /// Replay the online split with a detect-and-retrain baseline.
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
        /// One of ddm, eddm, adwin.
        #[arg(long)]
        detector: String,
        #[arg(long)]
        retrain_window: Option<usize>,
    },
    /// Write a synthetic drifting stream as CSV.
    Synth {
        /// Generator spec (TOML): `length` plus the generator fields.
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    match cli.command {
        Command::Train(c) => {
            let config = load_config(&c.config, &c.overrides())?;
            let trained = cmd_train(&config)?;
            println!("model written to {}", trained.model_path.display());
        }
        Command::Tune(c) => {
            let config = load_config(&c.config, &c.overrides())?;
            let trained = cmd_tune(&config)?;
            print!("{}", trained.config.to_toml());
        }
        Command::RunOasw { common, model } => {
            let config = load_config(&common.config, &common.overrides())?;
            let reports = cmd_run_oasw(&config, &model)?;
            print_summaries(stdout.lock(), &reports)?;
        }
        Command::Baseline {
            common,
            model,
            detector,
            retrain_window,
        } => {
            let config = load_config(&common.config, &common.overrides())?;
            let report = cmd_baseline(&config, &model, &detector, retrain_window)?;
            print_summaries(stdout.lock(), &[report])?;
        }
        Command::Synth { spec, out } => {
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", spec.display())))?;
            let n = cmd_synth(&text, &out)?;
            println!("{n} samples written to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oasw: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
