//! Chain experiment, bound table and frustrated run.

use std::fs::File;
use std::io::BufWriter;

use agsp_core::bipartite::Bipartition;
use agsp_core::bootstrap::{
    dimension_constant, explicit_bound, frustrated_run, max_entropy_estimate, BootstrapError,
    BootstrapParams, BoundParams, FrustratedParams,
};
use agsp_core::hamiltonians::{ground_space, ModelSpec};
use agsp_core::linalg::derive_seed;
use agsp_core::{
    bootstrap_run, chebyshev_agsp, operator_schmidt, pap_from_agsp, random_degenerate_target,
    rotate_subspace, synth_agsp, BipartiteAgsp64, Error, Subspace64,
};

use crate::config::parse_delta;
use crate::output::{dump_agsp, Cell, MatrixSidecar, Table};
use crate::{CliError, Context};

const CHAIN: u64 = 0x100;
const CHAIN_ENTROPY: u64 = 0x101;
const FRUSTRATED: u64 = 0x200;

fn core(e: Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn bootstrap_params(ctx: &Context, seed: u64) -> Result<BootstrapParams, CliError> {
    Ok(BootstrapParams {
        nu_target: ctx.cfg.nu_target,
        sample_budget: ctx.cfg.sample_budget,
        max_iters: ctx.cfg.max_iters,
        rng_seed: seed,
        rule: ctx.cfg.dimension_rule()?,
    })
}

struct Instance {
    spec: ModelSpec,
    sites: Option<usize>,
    cut: usize,
}

fn chain_instances(ctx: &Context) -> Vec<Instance> {
    let c = &ctx.cfg;
    match c.model.as_str() {
        "ising" => c
            .sites
            .iter()
            .flat_map(|&n| {
                let cuts = if c.cuts.is_empty() {
                    vec![n / 2]
                } else {
                    c.cuts.clone()
                };
                cuts.into_iter().map(move |cut| Instance {
                    spec: ModelSpec::Ising { sites: n },
                    sites: Some(n),
                    cut,
                })
            })
            .collect(),
        _ => vec![Instance {
            spec: ModelSpec::RandomTarget {
                left: c.left_dim,
                right: c.right_dim,
                degeneracy: c.degeneracy,
                seed: derive_seed(ctx.seed, CHAIN, u64::MAX),
            },
            sites: None,
            cut: 0,
        }],
    }
}

pub const CHAIN_COLUMNS: [&str; 28] = [
    "model",
    "sites",
    "cut",
    "dl",
    "dr",
    "k",
    "degeneracy",
    "gap",
    "shrink",
    "rank",
    "rank_shrink",
    "precondition_met",
    "status",
    "dim_pap",
    "converged",
    "iterations",
    "dim_v",
    "mu_v",
    "nu",
    "delta_v2",
    "dim_v2",
    "s_max",
    "gradient_norm",
    "bound",
    "tol",
    "nu_ok",
    "v2_ok",
    "bound_ok",
];

/// One row per `(instance, degree)`; bootstrap traces go to `traces/`.
pub fn chain(ctx: &Context) -> Result<Vec<Table>, CliError> {
    let mut t = Table::new("chain", &CHAIN_COLUMNS);
    let tol = ctx.cfg.check_tol;
    let trace_dir = ctx.out.join("traces");
    std::fs::create_dir_all(&trace_dir)?;
    for (j, inst) in chain_instances(ctx).iter().enumerate() {
        let model = inst.spec.build::<f64>().map_err(core)?;
        let (z, gap) = ground_space(&model.matrix, None).map_err(core)?;
        let dims = match inst.sites {
            Some(n) => {
                if inst.cut == 0 || inst.cut >= n {
                    return Err(CliError::Config(format!("cut {} outside 1..{n}", inst.cut)));
                }
                Bipartition::chain(n, model.info.local_dim, inst.cut)
            }
            None => Bipartition::new(ctx.cfg.left_dim, ctx.cfg.right_dim),
        };
        let cut = if inst.sites.is_some() {
            inst.cut
        } else {
            dims.left
        };
        let entropy = ctx
            .install(|| {
                max_entropy_estimate(
                    &z,
                    dims,
                    ctx.cfg.restarts,
                    derive_seed(ctx.seed, CHAIN_ENTROPY, j as u64),
                )
            })
            .map_err(core)?;
        let s_max = entropy.entropy;
        let rows = ctx.trials(ctx.cfg.degrees.len(), |i| -> Result<Vec<Cell>, CliError> {
            let k = ctx.cfg.degrees[i];
            let seed = derive_seed(derive_seed(ctx.seed, CHAIN, j as u64), 0, k as u64);
            let a = chebyshev_agsp(&model.matrix, &z, k).map_err(core)?;
            let b = operator_schmidt(&a, dims).map_err(core)?;
            let (shrink, rank) = (a.shrink(), b.rank_exact);
            let rank_shrink = rank as f64 * shrink;
            let met = rank_shrink <= ctx.cfg.rank_shrink_target;
            let stem = format!(
                "{}_n{}_cut{cut}_k{k}",
                inst.spec.name(),
                inst.sites.unwrap_or(0)
            );
            if ctx.cfg.dump_matrices {
                let meta = MatrixSidecar {
                    shrink,
                    rank_exact: rank,
                    dims: [dims.left, dims.right],
                    seed,
                };
                dump_agsp(&ctx.out.join("matrices"), &stem, a.operator(), &meta)?;
            }
            let mut row: Vec<Cell> = vec![
                inst.spec.name().into(),
                inst.sites.into(),
                cut.into(),
                dims.left.into(),
                dims.right.into(),
                k.into(),
                z.dim().into(),
                gap.into(),
                shrink.into(),
                rank.into(),
                rank_shrink.into(),
                met.into(),
            ];
            if !met {
                row.push("precondition-unmet".into());
                row.resize(CHAIN_COLUMNS.len(), Cell::Empty);
                return Ok(row);
            }
            let pap = pap_from_agsp(&b);
            let trace = match bootstrap_run(&pap, &z, &bootstrap_params(ctx, seed)?) {
                Ok(tr) => tr,
                Err(BootstrapError::Reduction(f)) => {
                    row.push("reduction-failed".into());
                    row.push(pap.dim_pap.into());
                    row.push(false.into());
                    row.push(f.trace.map(|tr| tr.records.len()).into());
                    row.resize(CHAIN_COLUMNS.len(), Cell::Empty);
                    return Ok(row);
                }
                Err(BootstrapError::Core(e)) => return Err(core(e)),
            };
            let mut w = BufWriter::new(File::create(trace_dir.join(format!("{stem}.csv")))?);
            trace.write_csv(&mut w)?;
            let bp = BoundParams {
                m: ctx.cfg.fr_m,
                ..BoundParams::new(z.dim(), rank as f64, shrink)
            };
            let bound = explicit_bound(&bp).map_err(core)?.total;
            let (mu_v, delta_v2) = (trace.final_report.mu, trace.v_double_prime_report.delta);
            row.extend([
                "ok".into(),
                trace.dim_pap.into(),
                trace.converged.into(),
                trace.records.len().into(),
                trace.final_space.dim().into(),
                mu_v.into(),
                trace.nu.into(),
                delta_v2.into(),
                trace.v_double_prime.dim().into(),
                s_max.into(),
                entropy.gradient_norm.into(),
                bound.into(),
                tol.into(),
                (mu_v >= trace.nu - tol).into(),
                (delta_v2 <= shrink + tol).into(),
                (s_max <= bound).into(),
            ]);
            Ok(row)
        });
        for r in rows {
            t.push(r?);
        }
    }
    Ok(vec![t])
}

pub fn bound_table(ctx: &Context) -> Result<Table, CliError> {
    let c = &ctx.cfg;
    let mut t = Table::new(
        "bound",
        &[
            "degeneracy",
            "rank",
            "shrink",
            "m",
            "delta_family",
            "constant",
            "c_delta",
            "epsilon_m",
            "head",
            "series",
            "entropy_series",
            "bound",
            "status",
            "reason",
        ],
    );
    let constant = c.bound_constant.unwrap_or_else(dimension_constant);
    for &d in &c.bound_degeneracy {
        for &r in &c.bound_rank {
            for &s in &c.bound_shrink {
                for &m in &c.bound_m {
                    for family in &c.bound_delta {
                        let p = BoundParams {
                            m,
                            delta: parse_delta(family)?,
                            constant,
                            ..BoundParams::new(d, r, s)
                        };
                        let mut row: Vec<Cell> = vec![
                            d.into(),
                            r.into(),
                            s.into(),
                            m.into(),
                            family.as_str().into(),
                            constant.into(),
                        ];
                        match explicit_bound(&p) {
                            Ok(b) => row.extend([
                                b.c_delta.into(),
                                b.epsilon_m.into(),
                                b.head.into(),
                                b.series.into(),
                                b.entropy_series.into(),
                                b.total.into(),
                                "ok".into(),
                                Cell::Empty,
                            ]),
                            Err(e) => {
                                row.resize(12, Cell::Empty);
                                row.push("rejected".into());
                                row.push(e.to_string().into());
                            }
                        }
                        t.push(row);
                    }
                }
            }
        }
    }
    Ok(t)
}

/// Stages `A_n` built from `δ_n`-rotated targets with shrink `Δⁿ`.
pub fn frustrated(ctx: &Context) -> Result<Vec<Table>, CliError> {
    let c = &ctx.cfg;
    let tol = c.check_tol;
    let delta = parse_delta(&c.fr_delta)?;
    let dims = Bipartition::new(c.fr_left, c.fr_right);
    let z: Subspace64 = random_degenerate_target::<f64>(
        c.fr_left,
        c.fr_right,
        c.fr_degeneracy,
        derive_seed(ctx.seed, FRUSTRATED, 0),
    )
    .map_err(core)?
    .ground_space;
    let stages = ctx.trials(c.fr_stages, |i| -> Result<BipartiteAgsp64, CliError> {
        let n = i + 1;
        let zn = rotate_subspace(
            &z,
            delta.term(n),
            derive_seed(ctx.seed, FRUSTRATED, 2 * n as u64),
        )
        .map_err(core)?;
        let a = synth_agsp(
            &zn,
            c.fr_shrink.powi(n as i32),
            1.0,
            derive_seed(ctx.seed, FRUSTRATED, 2 * n as u64 + 1),
        )
        .map_err(core)?;
        operator_schmidt(&a, dims).map_err(core)
    });
    let stages = stages.into_iter().collect::<Result<Vec<_>, _>>()?;
    let params = FrustratedParams {
        shrink: c.fr_shrink,
        rank: c.fr_rank,
        delta,
        bootstrap: bootstrap_params(ctx, derive_seed(ctx.seed, FRUSTRATED, 1))?,
        restarts: c.restarts,
        m: c.fr_m,
    };
    let report = ctx
        .install(|| frustrated_run(&z, &stages, &params))
        .map_err(|e| match e {
            BootstrapError::Core(e) => core(e),
            other => CliError::Numerical(other.to_string()),
        })?;
    let mut t = Table::new(
        "frustrated",
        &[
            "n",
            "delta_n",
            "shrink",
            "rank",
            "converged",
            "dim_v",
            "dim_v2",
            "viability",
            "viability_bound",
            "tail",
            "tail_delta",
            "tol",
            "viability_ok",
            "tail_ok",
        ],
    );
    for s in &report.stages {
        t.push(vec![
            s.n.into(),
            s.delta_n.into(),
            s.shrink.into(),
            s.rank.into(),
            s.converged.into(),
            s.dim_v.into(),
            s.dim_v2.into(),
            s.viability.into(),
            s.viability_bound.into(),
            s.tail.tail.into(),
            s.tail.delta.into(),
            tol.into(),
            (s.viability <= s.viability_bound + tol).into(),
            (s.tail.tail <= s.tail.delta.sqrt() + tol).into(),
        ]);
    }
    let mut summary = Table::new(
        "frustrated_summary",
        &[
            "dl",
            "dr",
            "degeneracy",
            "stages",
            "shrink",
            "rank",
            "delta_family",
            "m",
            "s_max",
            "gradient_norm",
            "c_delta",
            "epsilon_m",
            "bound",
            "bound_ok",
        ],
    );
    let b = &report.bound;
    summary.push(vec![
        c.fr_left.into(),
        c.fr_right.into(),
        z.dim().into(),
        c.fr_stages.into(),
        c.fr_shrink.into(),
        c.fr_rank.into(),
        c.fr_delta.as_str().into(),
        c.fr_m.into(),
        report.max_entropy.entropy.into(),
        report.max_entropy.gradient_norm.into(),
        b.c_delta.into(),
        b.epsilon_m.into(),
        b.total.into(),
        (report.max_entropy.entropy <= b.total).into(),
    ]);
    Ok(vec![t, summary])
}
