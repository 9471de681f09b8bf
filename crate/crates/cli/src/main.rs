#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{CmdError, Outcome, EXIT_CONFIG, EXIT_OTHER};
use crate::config::{Flags, Format, RunConfig};
use crate::output::to_json;

/// Band gaps and line-defect guided modes of a weighted periodic quantum graph.
#[derive(Parser)]
#[command(name = "lattice-guide", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Bands, gaps and their types in the frequency window.
    Gaps,
    /// Guided modes inside the gaps.
    Eigen,
    /// Gaps and guided modes over a sweep of beta in [0, pi].
    Bands,
    /// Roots of the dispersion relation over a (xi, eta) grid.
    Dispersion,
    /// Cross-check guided modes against the truncated lattice.
    Verify,
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("LATTICE_GUIDE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("LATTICE_GUIDE_THREADS must be a thread count, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CmdError> {
    let res = match &cfg.out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| CmdError {
        code: EXIT_OTHER,
        message: format!("cannot write output: {e}"),
        payload: None,
    })
}

fn run(cli: Cli) -> Result<i32, CmdError> {
    let env_tol = std::env::var("LATTICE_GUIDE_TOL").ok();
    let cfg = RunConfig::resolve(cli.flags, env_tol.as_deref()).map_err(|e| CmdError {
        code: EXIT_CONFIG,
        message: e.0,
        payload: None,
    })?;
    let outcome: Outcome = match cli.command {
        Command::Gaps => commands::gaps(&cfg),
        Command::Eigen => commands::eigen(&cfg),
        Command::Bands => commands::bands(&cfg),
        Command::Dispersion => commands::dispersion(&cfg),
        Command::Verify => commands::verify(&cfg),
    }?;
    let text = match cfg.format {
        Format::Json => to_json(&outcome.json),
        Format::Csv => outcome.table.to_csv(),
    };
    emit(&cfg, &text)?;
    for d in &outcome.diagnostics {
        eprintln!("lattice-guide: {d}");
    }
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("lattice-guide: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("lattice-guide: error: {}", e.message);
            if let Some(p) = e.payload {
                print!("{}", to_json(&p));
            }
            ExitCode::from(e.code as u8)
        }
    }
}
