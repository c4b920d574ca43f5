use std::fs;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

mod config;
mod run;

use config::{parse_config, Experiment};
use run::{emit_csv, RunError};

/// Run one experiment and write its CSV.
#[derive(Debug, Parser)]
#[command(name = "crosswell", version)]
struct Args {
    experiment: Experiment,
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to the config's `out`, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the integration step.
    #[arg(long)]
    dt: Option<f64>,
}

fn execute(args: &Args) -> Result<(), RunError> {
    let text = fs::read_to_string(&args.config).map_err(|e| {
        config::ConfigError::Parse(format!("cannot read {}: {e}", args.config.display()))
    })?;
    let mut cfg = parse_config(&text)?;
    if args.dt.is_some() {
        cfg.dt = args.dt;
        cfg.validate()?;
    }
    let table = run::run(args.experiment, &cfg)?;
    match args.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from)) {
        Some(path) => emit_csv(&table, BufWriter::new(fs::File::create(path)?)),
        None => emit_csv(&table, io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("crosswell: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
