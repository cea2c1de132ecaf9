use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tdlab::harness::{export_report, run_experiment, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "tdlab", version, about = "Run encoder-dynamics experiments from a TOML config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Token synchronisation offsets
    Sync(RunArgs),
    /// Local Lyapunov exponents
    Lle(RunArgs),
    /// Effective dimension over time
    Effdim(RunArgs),
    /// Transient-chaos lengths and a PCA view
    Transient(RunArgs),
    /// Handwriting readout error map
    Handwriting(RunArgs),
    /// Masked-token readout accuracy per step
    MlmSweep(RunArgs),
    /// Validate a weights container
    ImportCheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config; defaults apply when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "TDLAB_WORKERS", default_value_t = 1)]
    workers: usize,
}

fn run(kind: ExperimentKind, args: RunArgs) -> tdlab::Result<()> {
    let mut config = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(kind),
    };
    config.kind = kind;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = args.out {
        let cwd = std::env::current_dir().map_err(|e| tdlab::Error::Io { path: ".".into(), source: e })?;
        config.output_dir = cwd.join(out);
    }
    let report = run_experiment(&config, args.workers)?;
    let dir = config.output_path();
    export_report(&report, &dir)?;
    print!("{}", report.summary_text());
    println!("output_dir: {}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Sync(a) => (ExperimentKind::Sync, a),
        Command::Lle(a) => (ExperimentKind::Lle, a),
        Command::Effdim(a) => (ExperimentKind::Effdim, a),
        Command::Transient(a) => (ExperimentKind::Transient, a),
        Command::Handwriting(a) => (ExperimentKind::Handwriting, a),
        Command::MlmSweep(a) => (ExperimentKind::MlmSweep, a),
        Command::ImportCheck(a) => (ExperimentKind::ImportCheck, a),
    };
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tdlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
