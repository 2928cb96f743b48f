use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hardy_core::cli::{cmd_chsh_scan, cmd_feasibility, cmd_ghz_check, cmd_hardy_table, CliError, CommandOutput, RunConfig};

#[derive(Parser)]
#[command(name = "hardy", version, about = "Hardy's model, local hidden-variable LPs and CHSH checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Agreement tolerance for internal consistency checks.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write CSV output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Quantum predictions over a grid of alpha.
    HardyTable {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha_min: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        alpha_max: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Local hidden-variable feasibility of Hardy's constraints at one alpha.
    Feasibility {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Maximal CHSH value of Hardy's state against the correlation-matrix oracle.
    ChshScan {
        #[arg(long, default_value_t = 21)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// GHZ correlators versus the factored three-party model.
    GhzCheck {
        #[command(flatten)]
        common: Common,
    },
}

fn emit(output: CommandOutput, out: Option<PathBuf>) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    let io_err = |e: std::io::Error| CliError::Usage(format!("cannot write output: {e}"));
    if let Some(v) = output.verdict {
        stdout.write_all(v.as_bytes()).map_err(io_err)?;
    }
    if let Some(csv) = output.csv {
        match out {
            Some(path) => fs::write(&path, csv).map_err(io_err)?,
            None => stdout.write_all(csv.as_bytes()).map_err(io_err)?,
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (result, common) = match cli.command {
        Command::HardyTable { alpha_min, alpha_max, steps, common } => {
            let cfg = RunConfig { tolerance: common.tol, seed: common.seed };
            (cmd_hardy_table(&cfg, alpha_min, alpha_max, steps), common)
        }
        Command::Feasibility { alpha, common } => {
            let cfg = RunConfig { tolerance: common.tol, seed: common.seed };
            (cmd_feasibility(&cfg, alpha), common)
        }
        Command::ChshScan { steps, common } => {
            let cfg = RunConfig { tolerance: common.tol, seed: common.seed };
            (cmd_chsh_scan(&cfg, steps), common)
        }
        Command::GhzCheck { common } => {
            let cfg = RunConfig { tolerance: common.tol, seed: common.seed };
            (cmd_ghz_check(&cfg), common)
        }
    };
    emit(result?, common.out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hardy: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
