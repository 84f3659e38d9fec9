//! Seeded batch runner for the verification suites and experiments.

pub mod config;
pub mod experiments;
pub mod output;
pub mod verify;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPool;

pub use config::Config;
use output::{Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Io(_) | Self::Numerical(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    VerifyLemmas,
    SharpnessDemo,
    ChainExperiment,
    BoundTable,
    FrustratedRun,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::VerifyLemmas => "verify-lemmas",
            Self::SharpnessDemo => "sharpness-demo",
            Self::ChainExperiment => "chain-experiment",
            Self::BoundTable => "bound-table",
            Self::FrustratedRun => "frustrated-run",
        }
    }

    /// Verification commands fail on any false flag; experiments only report.
    pub fn is_verification(self) -> bool {
        matches!(self, Self::VerifyLemmas | Self::SharpnessDemo)
    }
}

/// Written tables and their flag failures.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub tables: Vec<(String, usize, usize)>,
}

impl Outcome {
    pub fn failures(&self) -> usize {
        self.tables.iter().map(|t| t.2).sum()
    }
}

/// Shared state of one command invocation.
pub struct Context {
    pub cfg: Config,
    pub seed: u64,
    pub out: PathBuf,
    pool: ThreadPool,
}

impl Context {
    pub fn new(cfg: Config) -> Result<Self, CliError> {
        cfg.validate()?;
        let seed = cfg.root_seed()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| CliError::Config(format!("workers: {e}")))?;
        let out = cfg.out_dir();
        Ok(Self {
            cfg,
            seed,
            out,
            pool,
        })
    }

    /// Runs `f(0..n)` on the worker pool; results come back in index order.
    pub fn trials<R: Send>(&self, n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
        self.pool
            .install(|| (0..n).into_par_iter().map(f).collect())
    }

    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }
}

type Suite = Box<dyn Fn(&Context) -> Result<Vec<Table>, CliError>>;

fn one(f: fn(&Context) -> Result<Table, CliError>) -> Suite {
    Box::new(move |c| f(c).map(|t| vec![t]))
}

fn many(f: fn(&Context) -> Result<Vec<Table>, CliError>) -> Suite {
    Box::new(f)
}

/// Runs `command` and writes its CSV tables under the output directory.
pub fn run(command: Command, cfg: Config) -> Result<Outcome, CliError> {
    let ctx = Context::new(cfg)?;
    std::fs::create_dir_all(&ctx.out)?;
    let suites: Vec<(&str, Suite)> = match command {
        Command::VerifyLemmas => vec![
            ("error_ratio", one(verify::error_ratio)),
            ("lifting", one(verify::lifting)),
            ("symmetry", one(verify::symmetry)),
            ("amplification", one(verify::amplification)),
            ("tail", one(verify::tail)),
            ("dyadic", one(verify::dyadic)),
            ("formulas", one(verify::formulas)),
            ("sharpness", one(verify::sharpness)),
        ],
        Command::SharpnessDemo => vec![("sharpness", one(verify::sharpness))],
        Command::ChainExperiment => vec![("chain", many(experiments::chain))],
        Command::BoundTable => vec![("bound", one(experiments::bound_table))],
        Command::FrustratedRun => vec![("frustrated", many(experiments::frustrated))],
    };
    let mut outcome = Outcome::default();
    let mut timings = Table::new("timings", &["command", "suite", "rows", "seconds"]);
    for (name, suite) in suites {
        let start = Instant::now();
        let tables = suite(&ctx)?;
        let seconds = start.elapsed().as_secs_f64();
        let rows: usize = tables.iter().map(|t| t.rows.len()).sum();
        for t in tables {
            t.write(&ctx.out)?;
            outcome
                .tables
                .push((t.name.clone(), t.rows.len(), t.failures()));
        }
        timings.push(vec![
            command.name().into(),
            name.into(),
            rows.into(),
            Cell::from(seconds),
        ]);
    }
    if ctx.cfg.record_timings {
        timings.write(&ctx.out)?;
    }
    Ok(outcome)
}
