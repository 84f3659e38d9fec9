//! Flat TOML experiment configuration. Every key is optional except `seed`,
//! which may instead come from `--seed`. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use agsp_core::{DeltaSequence, DimensionRule};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: usize,
    pub record_timings: bool,
    pub dump_matrices: bool,

    // verify-lemmas
    pub suite_trials: usize,
    pub boundary_trials: usize,
    pub max_ambient: usize,
    pub max_target_dim: usize,
    pub check_tol: f64,
    pub inject_bug: bool,
    pub sharpness_shrink: Vec<f64>,

    // chain-experiment
    pub model: String,
    pub sites: Vec<usize>,
    pub cuts: Vec<usize>,
    pub left_dim: usize,
    pub right_dim: usize,
    pub degeneracy: usize,
    pub degrees: Vec<usize>,
    pub rank_shrink_target: f64,

    // bootstrap
    pub nu_target: Option<f64>,
    pub sample_budget: usize,
    pub max_iters: usize,
    pub rule: String,
    pub restarts: usize,
    pub bound_constant: Option<f64>,

    // bound-table
    pub bound_degeneracy: Vec<usize>,
    pub bound_rank: Vec<f64>,
    pub bound_shrink: Vec<f64>,
    pub bound_m: Vec<usize>,
    pub bound_delta: Vec<String>,

    // frustrated-run
    pub fr_left: usize,
    pub fr_right: usize,
    pub fr_degeneracy: usize,
    pub fr_shrink: f64,
    pub fr_rank: f64,
    pub fr_stages: usize,
    pub fr_delta: String,
    pub fr_m: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: None,
            out: None,
            workers: 1,
            record_timings: false,
            dump_matrices: false,
            suite_trials: 1000,
            boundary_trials: 500,
            max_ambient: 32,
            max_target_dim: 6,
            check_tol: 1e-9,
            inject_bug: false,
            sharpness_shrink: vec![0.25, 0.1, 0.5, 0.9],
            model: "ising".into(),
            sites: vec![8],
            cuts: Vec::new(),
            left_dim: 8,
            right_dim: 8,
            degeneracy: 2,
            degrees: (1..=8).collect(),
            rank_shrink_target: 1.0 / 32.0,
            nu_target: None,
            sample_budget: 200,
            max_iters: 50,
            rule: "search".into(),
            restarts: agsp_core::bootstrap::DEFAULT_RESTARTS,
            bound_constant: None,
            bound_degeneracy: vec![1, 2, 4, 8],
            bound_rank: vec![1.0, 2.0, 16.0],
            bound_shrink: vec![0.0, 0.01, 0.03125, 0.5],
            bound_m: vec![17],
            bound_delta: vec!["zero".into(), "geometric:1:0.25".into()],
            fr_left: 8,
            fr_right: 8,
            fr_degeneracy: 2,
            fr_shrink: 1.0 / 4096.0,
            fr_rank: 64.0,
            fr_stages: 5,
            fr_delta: "geometric:1:0.25".into(),
            fr_m: 17,
        }
    }
}

impl Config {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Root seed; there is no fallback entropy source.
    pub fn root_seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| {
            CliError::Config("no seed: set `seed` in the config or pass --seed".into())
        })
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn dimension_rule(&self) -> Result<DimensionRule, CliError> {
        match self.rule.as_str() {
            "search" => Ok(DimensionRule::Search),
            "formula" => Ok(DimensionRule::Formula),
            other => Err(CliError::Config(format!(
                "rule: unknown value `{other}` (search | formula)"
            ))),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if !agsp_core::hamiltonians::ModelSpec::NAMES.contains(&self.model.as_str()) {
            return bad(format!(
                "model: unknown name `{}` (known: {})",
                self.model,
                agsp_core::hamiltonians::ModelSpec::NAMES.join(", ")
            ));
        }
        if self.check_tol.is_nan() || self.check_tol < 0.0 {
            return bad("check_tol must be non-negative".into());
        }
        if self.max_ambient < 2 || self.max_target_dim == 0 {
            return bad("max_ambient must be ≥ 2 and max_target_dim ≥ 1".into());
        }
        self.dimension_rule()?;
        parse_delta(&self.fr_delta)?;
        Ok(())
    }
}

/// `zero`, `geometric:SCALE:RATIO` or `explicit:D1,D2,...`.
pub fn parse_delta(spec: &str) -> Result<DeltaSequence, CliError> {
    let err = || {
        CliError::Config(format!(
            "δ family `{spec}`: expected zero | geometric:SCALE:RATIO | explicit:D1,D2,..."
        ))
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| err());
    match spec.split_once(':') {
        None if spec == "zero" => Ok(DeltaSequence::Zero),
        Some(("geometric", rest)) => {
            let (a, b) = rest.split_once(':').ok_or_else(err)?;
            Ok(DeltaSequence::Geometric {
                scale: num(a)?,
                ratio: num(b)?,
            })
        }
        Some(("explicit", rest)) => Ok(DeltaSequence::Explicit(
            rest.split(',').map(num).collect::<Result<_, _>>()?,
        )),
        _ => Err(err()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_seed() {
        let c = Config::parse("seed = 7\nworkers = 2\n", "t").unwrap();
        assert_eq!(c.root_seed().unwrap(), 7);
        assert_eq!(c.workers, 2);
        assert_eq!(c.suite_trials, 1000);
        assert!(Config::parse("", "t").unwrap().root_seed().is_err());
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = Config::parse("seed = 1\n\nbogus = 3\n", "cfg.toml")
            .unwrap_err()
            .to_string();
        assert!(err.contains("bogus"), "{err}");
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn delta_families() {
        assert_eq!(parse_delta("zero").unwrap(), DeltaSequence::Zero);
        assert_eq!(
            parse_delta("geometric:1:0.25").unwrap(),
            DeltaSequence::Geometric {
                scale: 1.0,
                ratio: 0.25
            }
        );
        assert_eq!(
            parse_delta("explicit:0.1,0.01").unwrap(),
            DeltaSequence::Explicit(vec![0.1, 0.01])
        );
        assert!(parse_delta("geometric:1").is_err());
        assert!(parse_delta("cubic").is_err());
    }

    #[test]
    fn validation() {
        let mut c = Config {
            model: "heisenberg".into(),
            ..Config::default()
        };
        assert!(c.validate().is_err());
        c.model = "random-target".into();
        c.validate().unwrap();
        c.rule = "magic".into();
        assert!(c.validate().is_err());
    }
}
