use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use photoassoc::config::RunConfig;
use photoassoc::pipeline::{run, Command};
use photoassoc::Error;

#[derive(Parser)]
#[command(version, about = "Two-channel photoassociation wavepacket runs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; must be absent or empty.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads, 0 = one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Calibrate the crossing and export the dressed curves.
    Calibrate,
    /// Level tables and B_v against E_v.
    Spectrum,
    /// Propagate and store populations and snapshots.
    Propagate,
    /// Propagate, then report projections, peaks, hole and thermal chain.
    Analyze,
    /// Impulsive-approximation state and momentum-peak predictions.
    Impulsive,
    /// Characteristic-time table.
    Times,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Calibrate => Command::Calibrate,
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Propagate => Command::Propagate,
            Cmd::Analyze => Command::Analyze,
            Cmd::Impulsive => Command::Impulsive,
            Cmd::Times => Command::Times,
        }
    }
}

fn execute(cli: &Cli) -> Result<(), Error> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| Error::config("--threads", e.to_string()))?;
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let report = run(cli.command.into(), &cfg, &cli.out)?;
    if !cli.quiet {
        for line in &report.summary {
            println!("{line}");
        }
        println!("wrote {} files to {}", report.files.len(), report.dir.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.module());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
