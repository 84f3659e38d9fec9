//! The bootstrap against a sequence of approximate targets `Z̃_n ≈ Z`.

use super::bound::{explicit_bound, BoundBreakdown, BoundParams, DeltaSequence};
use super::entropy::{max_entropy_estimate, EntropyEstimate};
use super::{bootstrap_run, BootstrapError, BootstrapParams};
use crate::agsp::{pap_from_agsp, BipartiteAgsp};
use crate::bipartite::{left_compare, tail_bound_check, TailCheck};
use crate::error::Error;
use crate::linalg::derive_seed;
use crate::scalar::{tol, Real};
use crate::subspace::{delta_close, Subspace};

#[derive(Clone, Debug, PartialEq)]
pub struct FrustratedParams {
    /// `Δ`: stage `n` must have shrink at most `Δⁿ`.
    pub shrink: f64,
    /// `R`: stage `n` must have rank at most `Rⁿ`.
    pub rank: f64,
    pub delta: DeltaSequence,
    pub bootstrap: BootstrapParams,
    pub restarts: usize,
    pub m: usize,
}

#[derive(Clone, Debug)]
pub struct StageReport<T: Real> {
    pub n: usize,
    pub delta_n: f64,
    pub shrink: f64,
    pub rank: usize,
    pub converged: bool,
    pub dim_v: usize,
    pub dim_v2: usize,
    /// Left viability error of `V″_n` onto `Z`.
    pub viability: f64,
    /// `(Δ^{n/2} + √δ_n)²`.
    pub viability_bound: f64,
    pub viability_holds: bool,
    /// Schmidt tail of the entropy maximizer beyond `dim V″_n`.
    pub tail: TailCheck<T>,
}

#[derive(Clone, Debug)]
pub struct FrustratedReport<T: Real> {
    pub stages: Vec<StageReport<T>>,
    pub max_entropy: EntropyEstimate<T>,
    pub bound: BoundBreakdown,
    pub bound_holds: bool,
}

impl<T: Real> FrustratedReport<T> {
    pub fn all_hold(&self) -> bool {
        self.bound_holds
            && self
                .stages
                .iter()
                .all(|s| s.viability_holds && s.tail.holds)
    }
}

/// Runs stage `n = 1, 2, …` of `stages` against its own target and measures
/// the resulting left space against the exact `z`.
pub fn frustrated_run<T: Real>(
    z: &Subspace<T>,
    stages: &[BipartiteAgsp<T>],
    params: &FrustratedParams,
) -> Result<FrustratedReport<T>, BootstrapError<T>> {
    params.delta.validate()?;
    let dims = stages
        .first()
        .map(|s| s.dims)
        .ok_or_else(|| Error::Parameter("no stages".into()))?;
    let num = tol::<T>().num.as_f64();
    let max_entropy = max_entropy_estimate(
        z,
        dims,
        params.restarts,
        derive_seed(params.bootstrap.rng_seed, 0xF0, 0),
    )?;

    let mut reports = Vec::with_capacity(stages.len());
    for (i, stage) in stages.iter().enumerate() {
        let n = i + 1;
        let delta_n = params.delta.term(n);
        let target = stage.base.target();
        if stage.dims != dims {
            return Err(Error::Parameter(format!("stage {n} uses a different cut")).into());
        }
        if !delta_close(target, z, T::lit(delta_n))? {
            return Err(Error::Precondition(format!(
                "stage {n} target is not {delta_n}-close to Z"
            ))
            .into());
        }
        let shrink = stage.base.shrink().as_f64();
        if shrink > params.shrink.powi(n as i32) + num {
            return Err(
                Error::Precondition(format!("stage {n} shrink {shrink} exceeds Δ^{n}")).into(),
            );
        }
        if stage.rank_exact as f64 > params.rank.powi(n as i32) {
            return Err(Error::Precondition(format!(
                "stage {n} rank {} exceeds R^{n}",
                stage.rank_exact
            ))
            .into());
        }
        let bp = BootstrapParams {
            rng_seed: derive_seed(params.bootstrap.rng_seed, 0xF1, n as u64),
            ..params.bootstrap
        };
        let trace = bootstrap_run(&pap_from_agsp(stage), target, &bp)?;
        let v2 = &trace.v_double_prime;
        let viability = left_compare(v2, z)?.delta.as_f64();
        let bound = (params.shrink.powf(n as f64 / 2.0) + delta_n.sqrt()).powi(2);
        let tail = tail_bound_check(z, v2, &max_entropy.psi)?;
        reports.push(StageReport {
            n,
            delta_n,
            shrink,
            rank: stage.rank_exact,
            converged: trace.converged,
            dim_v: trace.final_space.dim(),
            dim_v2: v2.dim(),
            viability,
            viability_bound: bound,
            viability_holds: viability <= bound + num,
            tail,
        });
    }

    let bp = BoundParams {
        m: params.m,
        delta: params.delta.clone(),
        ..BoundParams::new(z.dim(), params.rank, params.shrink)
    };
    let bound = explicit_bound(&bp)?;
    let bound_holds = max_entropy.entropy.as_f64() <= bound.total;
    Ok(FrustratedReport {
        stages: reports,
        max_entropy,
        bound,
        bound_holds,
    })
}
