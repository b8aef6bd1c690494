use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use spinboson::commands;
use spinboson::config::RunConfig;

/// Spin-boson dynamics of a laser-addressed ion in a linear Coulomb chain.
#[derive(Parser)]
#[command(name = "spinboson", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (flat key=value file). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for kernel tabulation and sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Normal-mode spectrum: modes.csv
    Modes,
    /// Smoothed spectral density and Ohmic fit: jspec.csv, jspec_fit.txt
    Jspec,
    /// Polarization and memory kernel: p_of_t.csv, kernel.csv
    Evolve,
    /// Decay rate over analysis.alpha_grid x analysis.t_list: sweep.csv
    Sweep,
    /// Required trap frequency over analysis.n_list x analysis.alpha_grid: plan.csv
    Plan,
    /// Caption parameters of paper figure 2, 3, 4 or 5
    Figure { id: u32 },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }
    if let Some(k) = cli.threads {
        anyhow::ensure!(k > 0, "--threads: must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("--threads: cannot configure the worker pool")?;
    }
    let out = cfg.output_dir.clone();
    let written = match cli.command {
        Command::Modes => commands::cmd_modes(&cfg, &out)?,
        Command::Jspec => commands::cmd_jspec(&cfg, &out)?,
        Command::Evolve => commands::cmd_evolve(&cfg, &out)?,
        Command::Sweep => commands::cmd_sweep(&cfg, &out)?,
        Command::Plan => commands::cmd_plan(&cfg, &out)?,
        Command::Figure { id } => commands::cmd_figure(id, &cfg, &out)?,
    };
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
