//! Random dimension reduction and the bootstrap loop.
//!
//! Starting from `V = H_L`, the loop alternates `V ← K V` (which lifts the
//! left overlap onto `Z` to at least `1/2`) with a Haar-random reduction back
//! down to a `ν`-overlapping subspace, `ν = 1/(32 R)`, until the dimension
//! stops decreasing. The run also returns `V″ = K K V`, whose left viability
//! error is at most the shrink factor.

mod bound;
mod entropy;
mod frustrated;

use std::io::{self, Write};

pub use bound::{
    dimension_constant, epsilon_m, explicit_bound, BoundBreakdown, BoundParams, DeltaSequence,
};
pub use entropy::{max_entropy_estimate, EntropyEstimate, DEFAULT_RESTARTS};
pub use frustrated::{frustrated_run, FrustratedParams, FrustratedReport, StageReport};

use crate::agsp::{pap_apply, Pap};
use crate::bipartite::{left_compare, Bipartition};
use crate::error::Error;
use crate::linalg::{derive_seed, gaussian_matrix, seeded_rng};
use crate::scalar::{tol, Real};
use crate::subspace::{compare, OverlapReport, Subspace};

/// A Haar-distributed `dim`-dimensional subspace of `w`.
pub fn haar_subspace<T: Real>(
    w: &Subspace<T>,
    dim: usize,
    rng_seed: u64,
) -> crate::Result<Subspace<T>> {
    if dim == 0 || dim > w.dim() {
        return Err(Error::Parameter(format!(
            "cannot sample dimension {dim} inside dimension {}",
            w.dim()
        )));
    }
    if dim == w.dim() {
        return Ok(w.clone());
    }
    let g = gaussian_matrix::<T, _>(&mut seeded_rng(rng_seed), w.dim(), dim);
    let coords = Subspace::from_columns(&g, T::zero());
    if coords.dim() != dim {
        return Err(Error::Precondition(
            "sampled basis is rank deficient".into(),
        ));
    }
    Ok(Subspace::from_columns(
        &(w.basis() * coords.basis()),
        T::zero(),
    ))
}

/// Parameters of the random-subspace overlap estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandLem {
    /// `ν = V μ / (8 W)`.
    pub nu: f64,
    /// `ln η`, `η = (1 + 2 ν^{-1/2})^D W e^{−V/16}`.
    pub log_eta: f64,
    /// `ln η̃`, `η̃ = (9/ν)^{D/2} W e^{−V/16}`.
    pub log_eta_loose: f64,
}

impl RandLem {
    pub fn eta(&self) -> f64 {
        self.log_eta.exp()
    }

    pub fn eta_loose(&self) -> f64 {
        self.log_eta_loose.exp()
    }
}

pub fn randlem_params(w_dim: usize, v_dim: usize, mu: f64, degeneracy: usize) -> RandLem {
    let (w, v, d) = (w_dim as f64, v_dim as f64, degeneracy as f64);
    let nu = v / (8.0 * w) * mu;
    let tail = w.ln() - v / 16.0;
    let r = RandLem {
        nu,
        log_eta: d * (1.0 + 2.0 / nu.sqrt()).ln() + tail,
        log_eta_loose: d / 2.0 * (9.0 / nu).ln() + tail,
    };
    if nu < 1.0 {
        debug_assert!(r.log_eta <= r.log_eta_loose + 1e-12);
    }
    r
}

/// `⌈8 (W ν/μ ∨ (D ln(9/ν) + 2 ln W))⌉ ∧ W`.
pub fn reduced_dimension(w_dim: usize, nu: f64, mu: f64, degeneracy: usize) -> usize {
    let w = w_dim as f64;
    let a = w * nu / mu;
    let b = degeneracy as f64 * (9.0 / nu).ln() + 2.0 * w.ln();
    let v = (8.0 * a.max(b)).ceil();
    if v >= w {
        w_dim
    } else {
        v.max(1.0) as usize
    }
}

/// How `reduce_dimension` chooses the output dimension.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DimensionRule {
    /// Exactly the value of [`reduced_dimension`].
    #[default]
    Formula,
    /// The smallest dimension up to the formula value for which sampling
    /// finds a `ν`-overlapping candidate within the budget.
    Search,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BootstrapParams {
    /// Overlap to maintain; `None` means `1/(32 R)` with `R` the PAP dimension.
    pub nu_target: Option<f64>,
    pub sample_budget: usize,
    pub max_iters: usize,
    pub rng_seed: u64,
    pub rule: DimensionRule,
}

impl BootstrapParams {
    pub fn new(rng_seed: u64) -> Self {
        Self {
            nu_target: None,
            sample_budget: 200,
            max_iters: 50,
            rng_seed,
            rule: DimensionRule::Formula,
        }
    }

    pub fn with_rule(mut self, rule: DimensionRule) -> Self {
        self.rule = rule;
        self
    }

    fn validate(&self) -> crate::Result<()> {
        if let Some(nu) = self.nu_target {
            if !(nu > 0.0 && nu <= 1.0) {
                return Err(Error::Parameter(format!("nu_target {nu} outside (0, 1]")));
            }
        }
        if self.sample_budget == 0 || self.max_iters == 0 {
            return Err(Error::Parameter("budgets must be at least 1".into()));
        }
        Ok(())
    }
}

/// The space whose overlap a reduction must preserve.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a, T: Real> {
    /// Ordinary overlap onto a subspace of the same ambient space.
    Full(&'a Subspace<T>),
    /// Left overlap onto a subspace of `H_L ⊗ H_R`.
    Left(&'a Subspace<T>),
}

impl<T: Real> Target<'_, T> {
    pub fn overlap(&self, v: &Subspace<T>) -> crate::Result<OverlapReport<T>> {
        match *self {
            Self::Full(z) => compare(z, v),
            Self::Left(z) => left_compare(v, z),
        }
    }

    pub fn degeneracy(&self) -> usize {
        match *self {
            Self::Full(z) | Self::Left(z) => z.dim(),
        }
    }
}

/// Sampling exhausted its budget.
#[derive(Clone, Debug)]
pub struct ReductionFailure<T: Real> {
    pub best: Subspace<T>,
    pub best_overlap: f64,
    pub nu: f64,
    pub attempts: usize,
    pub trace: Option<BootstrapTrace<T>>,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum BootstrapError<T: Real> {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("no candidate reached overlap {} after {} samples (best {})", .0.nu, .0.attempts, .0.best_overlap)]
    Reduction(Box<ReductionFailure<T>>),
}

/// Samples Haar subspaces of `w` of dimension `dim` until one is `nu`-overlapping.
fn sample_at<T: Real>(
    w: &Subspace<T>,
    target: Target<T>,
    nu: f64,
    dim: usize,
    budget: usize,
    seed: u64,
) -> Result<Subspace<T>, Box<ReductionFailure<T>>> {
    let mut best: Option<(Subspace<T>, f64)> = None;
    for attempt in 0..budget {
        let cand = match haar_subspace(w, dim, derive_seed(seed, dim as u64, attempt as u64)) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let mu = target.overlap(&cand).map(|r| r.mu.as_f64()).unwrap_or(0.0);
        if mu >= nu {
            return Ok(cand);
        }
        if best.as_ref().is_none_or(|(_, b)| mu > *b) {
            best = Some((cand, mu));
        }
    }
    let (best, best_overlap) = best.unwrap_or_else(|| (Subspace::zero(w.ambient_dim()), 0.0));
    Err(Box::new(ReductionFailure {
        best,
        best_overlap,
        nu,
        attempts: budget,
        trace: None,
    }))
}

/// A subspace of `w` that stays `nu`-overlapping onto `target`.
pub fn reduce_dimension<T: Real>(
    w: &Subspace<T>,
    target: Target<T>,
    nu: f64,
    params: &BootstrapParams,
) -> Result<Subspace<T>, BootstrapError<T>> {
    params.validate()?;
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Parameter(format!("nu {nu} outside (0, 1]")).into());
    }
    let mu = target.overlap(w)?.mu.as_f64();
    if mu < nu {
        return Err(Error::Precondition(format!("input overlap {mu} is below nu = {nu}")).into());
    }
    let formula = reduced_dimension(w.dim(), nu, mu, target.degeneracy());
    if params.rule == DimensionRule::Search {
        for d in 1..formula {
            if let Ok(found) = sample_at(w, target, nu, d, params.sample_budget, params.rng_seed) {
                return Ok(found);
            }
        }
    }
    if formula == w.dim() {
        return Ok(w.clone());
    }
    sample_at(
        w,
        target,
        nu,
        formula,
        params.sample_budget,
        params.rng_seed,
    )
    .map_err(BootstrapError::Reduction)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    PapApply,
    Reduce,
}

impl Action {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PapApply => "pap_apply",
            Self::Reduce => "reduce",
        }
    }
}

/// State of `V` after one action.
#[derive(Clone, Debug)]
pub struct TraceRecord<T: Real> {
    pub iteration: usize,
    pub action: Action,
    pub dim: usize,
    pub mu: T,
    pub delta: T,
    pub epsilon: T,
    pub subspace: Subspace<T>,
}

#[derive(Clone, Debug)]
pub struct BootstrapTrace<T: Real> {
    pub records: Vec<TraceRecord<T>>,
    pub final_space: Subspace<T>,
    pub final_report: OverlapReport<T>,
    /// `K K V` for the final `V`.
    pub v_double_prime: Subspace<T>,
    pub v_double_prime_report: OverlapReport<T>,
    pub converged: bool,
    pub nu: f64,
    pub dim_pap: usize,
    pub shrink: T,
}

impl<T: Real> BootstrapTrace<T> {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "# schema=1")?;
        writeln!(out, "iter,action,dim,mu,delta,epsilon")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{:?},{:?},{:?}",
                r.iteration,
                r.action.as_str(),
                r.dim,
                r.mu.as_f64(),
                r.delta.as_f64(),
                r.epsilon.as_f64()
            )?;
        }
        Ok(())
    }

    /// Largest disagreement between stored and recomputed record values.
    pub fn recheck(&self, z: &Subspace<T>) -> crate::Result<f64> {
        let mut worst = 0.0f64;
        for r in &self.records {
            let rep = left_compare(&r.subspace, z)?;
            if r.subspace.dim() != r.dim {
                return Ok(f64::INFINITY);
            }
            worst = worst
                .max((rep.mu - r.mu).abs().as_f64())
                .max((rep.delta - r.delta).abs().as_f64());
        }
        Ok(worst)
    }
}

/// Runs the bootstrap loop for the PAP `k` against `z ⊂ H_L ⊗ H_R`.
pub fn bootstrap_run<T: Real>(
    k: &Pap<T>,
    z: &Subspace<T>,
    params: &BootstrapParams,
) -> Result<BootstrapTrace<T>, BootstrapError<T>> {
    params.validate()?;
    Bipartition::with_left(z.ambient_dim(), k.left_dim)?;
    if z.dim() == 0 {
        return Err(Error::UndefinedOverlap.into());
    }
    let budget = T::lit(1.0 / 32.0) + tol::<T>().num;
    if k.dim_pap == 0 || k.shrink * T::lit(k.dim_pap as f64) > budget {
        return Err(Error::Precondition(format!(
            "shrink {} times PAP dimension {} exceeds 1/32",
            k.shrink, k.dim_pap
        ))
        .into());
    }
    let nu = params.nu_target.unwrap_or(1.0 / (32.0 * k.dim_pap as f64));
    let target = Target::Left(z);
    let record = |iteration, action, v: &Subspace<T>| -> crate::Result<TraceRecord<T>> {
        let rep = left_compare(v, z)?;
        Ok(TraceRecord {
            iteration,
            action,
            dim: v.dim(),
            mu: rep.mu,
            delta: rep.delta,
            epsilon: rep.epsilon,
            subspace: v.clone(),
        })
    };

    let mut records = Vec::new();
    let mut v = Subspace::full(k.left_dim);
    let mut converged = false;
    for iteration in 1..=params.max_iters {
        let lifted = pap_apply(k, &v)?;
        records.push(record(iteration, Action::PapApply, &lifted)?);
        let step = BootstrapParams {
            rng_seed: derive_seed(params.rng_seed, 0xB007, iteration as u64),
            ..*params
        };
        let reduced = match reduce_dimension(&lifted, target, nu, &step) {
            Ok(r) => r,
            Err(BootstrapError::Reduction(mut f)) => {
                f.trace = Some(partial_trace(records, &v, z, k, nu)?);
                return Err(BootstrapError::Reduction(f));
            }
            Err(e) => return Err(e),
        };
        let stalled = reduced.dim() >= v.dim();
        if !stalled {
            v = reduced;
        }
        records.push(record(iteration, Action::Reduce, &v)?);
        if stalled {
            converged = true;
            break;
        }
    }
    let v2 = pap_apply(k, &pap_apply(k, &v)?)?;
    Ok(BootstrapTrace {
        final_report: left_compare(&v, z)?,
        v_double_prime_report: left_compare(&v2, z)?,
        final_space: v,
        v_double_prime: v2,
        records,
        converged,
        nu,
        dim_pap: k.dim_pap,
        shrink: k.shrink,
    })
}

fn partial_trace<T: Real>(
    records: Vec<TraceRecord<T>>,
    v: &Subspace<T>,
    z: &Subspace<T>,
    k: &Pap<T>,
    nu: f64,
) -> crate::Result<BootstrapTrace<T>> {
    let report = left_compare(v, z)?;
    Ok(BootstrapTrace {
        records,
        final_space: v.clone(),
        final_report: report.clone(),
        v_double_prime: v.clone(),
        v_double_prime_report: report,
        converged: false,
        nu,
        dim_pap: k.dim_pap,
        shrink: k.shrink,
    })
}
