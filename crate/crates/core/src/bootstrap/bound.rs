//! The explicit entanglement bound assembled from the bootstrap dimensions.
//!
//! # The dimension constant
//!
//! Let `ρ ≥ 1` be the PAP dimension and `ν = 1/(32ρ)`. If `V` is a minimal
//! `ν`-overlapping left space, then `K V` has dimension at most `ρV` and
//! overlap at least `1/2`, and the reduced-dimension formula applied with
//! `μ = 1/2` gives
//!
//! ```text
//! V ≤ max(⌈V/2⌉, ⌈8 (D ln(288ρ) + 2 ln(ρV))⌉).
//! ```
//!
//! The first branch forces `V ≤ 1`. In the second, `ln V ≤ V/32 + ln 32 − 1`
//! and `D ≥ 1` give `V ≤ D (48 ln ρ + a)` with `a = 16 ln 288 + 32 ln 32 − 30`.
//! Using `ln ρ ≤ ρ/e`, `V ≤ (48/e + a) D ρ`, and `V″ = K K V` has dimension at
//! most `ρ² V ≤ C D ρ³` with
//!
//! ```text
//! C = 48/e + 16 ln 288 + 32 ln 32 − 30 ≈ 189.2.
//! ```
//!
//! For the `n`-th AGSP, `ρ = Rⁿ`, so `dim V_n ≤ C D R^{3n}`.

use crate::bipartite::entropy_term;
use crate::error::{Error, Result};

/// Terms below this are dropped from the series.
const SERIES_FLOOR: f64 = 1e-15;
const MAX_TERMS: usize = 10_000_000;

pub fn dimension_constant() -> f64 {
    48.0 / std::f64::consts::E + 16.0 * 288f64.ln() + 32.0 * 32f64.ln() - 30.0
}

/// `ε_m = Δ^{m/2} / (1 − Δ^{1/2})`.
pub fn epsilon_m(shrink: f64, m: usize) -> f64 {
    shrink.powf(m as f64 / 2.0) / (1.0 - shrink.sqrt())
}

/// Target-space errors `δ_1, δ_2, …`.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum DeltaSequence {
    #[default]
    Zero,
    /// `δ_n = scale · ratioⁿ`.
    Geometric { scale: f64, ratio: f64 },
    /// `δ_1, …, δ_k`, then zero.
    Explicit(Vec<f64>),
}

impl DeltaSequence {
    /// `δ_n` for `n ≥ 1`.
    pub fn term(&self, n: usize) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Geometric { scale, ratio } => scale * ratio.powi(n as i32),
            Self::Explicit(v) => n
                .checked_sub(1)
                .and_then(|i| v.get(i))
                .copied()
                .unwrap_or(0.0),
        }
    }

    /// Checks `δ_n ∈ [0, 1]` and that `Σ n √δ_n` converges.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Zero => Ok(()),
            Self::Geometric { scale, ratio } => {
                if !(*ratio >= 0.0 && *ratio < 1.0) {
                    return Err(Error::Parameter(format!(
                        "geometric ratio {ratio} does not give a convergent series"
                    )));
                }
                if !(*scale >= 0.0 && scale * ratio <= 1.0) {
                    return Err(Error::Parameter(format!(
                        "geometric scale {scale} gives δ_1 outside [0, 1]"
                    )));
                }
                Ok(())
            }
            Self::Explicit(v) => match v.iter().find(|d| !(**d >= 0.0 && **d <= 1.0)) {
                Some(d) => Err(Error::Parameter(format!("δ value {d} outside [0, 1]"))),
                None => Ok(()),
            },
        }
    }

    /// `c_δ = Σ_{n≥1} √δ_n`.
    pub fn c_delta(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Geometric { scale, ratio } => {
                let q = ratio.sqrt();
                scale.sqrt() * q / (1.0 - q)
            }
            Self::Explicit(v) => v.iter().map(|d| d.sqrt()).sum(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundParams {
    pub degeneracy: usize,
    pub rank: f64,
    pub shrink: f64,
    pub m: usize,
    pub delta: DeltaSequence,
    pub constant: f64,
}

impl BoundParams {
    pub fn new(degeneracy: usize, rank: f64, shrink: f64) -> Self {
        Self {
            degeneracy,
            rank,
            shrink,
            m: 17,
            delta: DeltaSequence::Zero,
            constant: dimension_constant(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degeneracy == 0 {
            return Err(Error::Parameter("degeneracy must be positive".into()));
        }
        if !(self.rank >= 1.0 && self.rank.is_finite()) {
            return Err(Error::Parameter(format!(
                "rank {} must be at least 1",
                self.rank
            )));
        }
        if !(self.shrink >= 0.0 && self.rank * self.shrink <= 0.5) {
            return Err(Error::Parameter(format!(
                "R·Δ = {} exceeds 1/2",
                self.rank * self.shrink
            )));
        }
        if self.m < 5 {
            return Err(Error::Parameter(format!("m = {} is below 5", self.m)));
        }
        if !(self.constant >= 1.0 && self.constant.is_finite()) {
            return Err(Error::Parameter(format!(
                "constant {} must be at least 1",
                self.constant
            )));
        }
        self.delta.validate()
    }

    /// `log₂(C · D · R^{3n})`.
    fn log_dim(&self, n: usize) -> f64 {
        self.constant.log2() + (self.degeneracy as f64).log2() + 3.0 * n as f64 * self.rank.log2()
    }
}

/// The bound split into its parts.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundBreakdown {
    /// `log₂(C · D · R^{3m})`.
    pub head: f64,
    /// `Σ_{n≥m} γ_n log₂(C · D · R^{3n+3})`.
    pub series: f64,
    /// `Σ_{n≥m} h(γ_n)`.
    pub entropy_series: f64,
    pub total: f64,
    pub epsilon_m: f64,
    pub c_delta: f64,
    pub terms: usize,
}

/// Evaluates the bound with `γ_n = min(1, Δ^{n/2} + √δ_n)`, `n ≥ m`.
pub fn explicit_bound(p: &BoundParams) -> Result<BoundBreakdown> {
    p.validate()?;
    let head = p.log_dim(p.m);
    let (mut series, mut entropy_series) = (0.0, 0.0);
    let mut terms = 0;
    let tail_end = match &p.delta {
        DeltaSequence::Explicit(v) => v.len(),
        _ => 0,
    };
    let mut n = p.m;
    loop {
        let gamma = (p.shrink.powf(n as f64 / 2.0) + p.delta.term(n).sqrt()).min(1.0);
        let term = gamma * p.log_dim(n + 1);
        if terms >= MAX_TERMS {
            return Err(Error::Parameter("bound series did not converge".into()));
        }
        if term < SERIES_FLOOR && gamma < SERIES_FLOOR && n >= tail_end {
            break;
        }
        series += term;
        entropy_series += entropy_term(gamma);
        terms += 1;
        n += 1;
    }
    Ok(BoundBreakdown {
        head,
        series,
        entropy_series,
        total: head + series + entropy_series,
        epsilon_m: epsilon_m(p.shrink, p.m),
        c_delta: p.delta.c_delta(),
        terms,
    })
}
