use std::path::PathBuf;
use std::process::ExitCode;

use agsp_lab::{run, CliError, Command, Config};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "agsp-lab",
    version,
    about = "Seeded AGSP verification suites and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; overrides the config.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Run every randomized verification suite; fails on any violated flag.
    VerifyLemmas,
    /// Evaluate the two-dimensional sharpness instance.
    SharpnessDemo,
    /// Chebyshev AGSP, bootstrap and entropy bound on a model Hamiltonian.
    ChainExperiment,
    /// Tabulate the explicit entanglement bound over a parameter grid.
    BoundTable,
    /// Bootstrap against a sequence of approximate targets.
    FrustratedRun,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::VerifyLemmas => Command::VerifyLemmas,
            Cmd::SharpnessDemo => Command::SharpnessDemo,
            Cmd::ChainExperiment => Command::ChainExperiment,
            Cmd::BoundTable => Command::BoundTable,
            Cmd::FrustratedRun => Command::FrustratedRun,
        }
    }
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.seed = cli.seed.or(cfg.seed);
    cfg.out = cli.out.or(cfg.out);
    cfg.workers = cli.workers.unwrap_or(cfg.workers);
    let command = Command::from(cli.command);
    let outcome = run(command, cfg)?;
    for (name, rows, failures) in &outcome.tables {
        println!("{name}: {rows} rows, {failures} failed flags");
    }
    Ok(!command.is_verification() || outcome.failures() == 0)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("agsp-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
