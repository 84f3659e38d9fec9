//! Randomized verification suites. Each trial draws its instance from a seed
//! derived from `(root seed, suite, trial index)`.

use agsp_core::bipartite::{
    dyadic_entropy_bound, shannon_entropy, tail_bound_check, Bipartition, EntropyPartition,
};
use agsp_core::bootstrap::{randlem_params, reduced_dimension};
use agsp_core::linalg::{derive_seed, gaussian_matrix, gaussian_vector, real, seeded_rng, CMatrix};
use agsp_core::{
    apply_to_subspace, compare, error_reduction_check, lifting_operator, overlap_symmetry_check,
    rotate_subspace, synth_agsp, validate_agsp, Error, Subspace64,
};
use rand::Rng;

use crate::output::{Cell, Table};
use crate::{CliError, Context};

const ERROR_RATIO: u64 = 1;
const LIFTING: u64 = 2;
const SYMMETRY: u64 = 3;
const AMPLIFICATION: u64 = 4;
const TAIL: u64 = 5;
const DYADIC: u64 = 6;

const SHRINKS: [f64; 5] = [0.0, 1e-4, 0.1, 0.5, 0.99];
const DILATIONS: [f64; 3] = [1.0, 2.0, 10.0];
const BOUNDARY_SHRINKS: [f64; 5] = [1e-4, 0.01, 0.1, 0.25, 0.5];
/// Agreement required between the two mutual overlaps.
pub const SYMMETRY_TOL: f64 = 1e-10;

fn random_subspace(rng: &mut impl Rng, n: usize, k: usize) -> Subspace64 {
    Subspace64::from_columns(&gaussian_matrix(rng, n, k), 0.0)
}

/// `(Z, V)` with `V` covering `Z`, both drawn inside `C^n`.
fn covering_pair(rng: &mut impl Rng, ctx: &Context) -> (Subspace64, Subspace64) {
    loop {
        let n = rng.random_range(2..=ctx.cfg.max_ambient);
        let k = rng.random_range(1..=ctx.cfg.max_target_dim.min(n - 1));
        let dv = rng.random_range(k..=n);
        let z = random_subspace(rng, n, k);
        let v = random_subspace(rng, n, dv);
        if compare(&z, &v).map(|r| r.covers).unwrap_or(false) {
            return (z, v);
        }
    }
}

fn core(e: Error) -> CliError {
    CliError::Numerical(e.to_string())
}

pub fn error_ratio(ctx: &Context) -> Result<Table, CliError> {
    let mut t = Table::new(
        "error_ratio",
        &[
            "trial",
            "ambient",
            "dim_z",
            "dim_v",
            "shrink_param",
            "dilation_max",
            "shrink",
            "mu",
            "delta",
            "epsilon",
            "mu_after",
            "delta_after",
            "epsilon_after",
            "tol",
            "ratio_ok",
            "viability_ok",
        ],
    );
    let tol = ctx.cfg.check_tol;
    let rows = ctx.trials(ctx.cfg.suite_trials, |i| -> Result<Vec<Cell>, CliError> {
        let mut rng = seeded_rng(derive_seed(ctx.seed, ERROR_RATIO, i as u64));
        let (z, v) = covering_pair(&mut rng, ctx);
        let (s, d) = (SHRINKS[i % 5], DILATIONS[(i / 5) % 3]);
        let a = synth_agsp(&z, s, d, rng.random()).map_err(core)?;
        let r = error_reduction_check(&a, &v).map_err(core)?;
        let mut ratio_ok = r.epsilon_after <= a.shrink() * r.epsilon_before + tol;
        if ctx.cfg.inject_bug {
            ratio_ok = !ratio_ok;
        }
        let viability_ok = r.delta_after <= a.shrink() * r.delta_before / r.mu_before + tol;
        Ok(vec![
            i.into(),
            z.ambient_dim().into(),
            z.dim().into(),
            v.dim().into(),
            s.into(),
            d.into(),
            a.shrink().into(),
            r.mu_before.into(),
            r.delta_before.into(),
            r.epsilon_before.into(),
            r.mu_after.into(),
            r.delta_after.into(),
            r.epsilon_after.into(),
            tol.into(),
            ratio_ok.into(),
            viability_ok.into(),
        ])
    });
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

pub fn lifting(ctx: &Context) -> Result<Table, CliError> {
    let mut t = Table::new(
        "lifting",
        &[
            "trial",
            "ambient",
            "dim_z",
            "dim_v",
            "mu",
            "epsilon",
            "lift_residual",
            "lift_norm",
            "perp_norm",
            "tol",
            "identity_ok",
            "norm_ok",
            "perp_ok",
        ],
    );
    let tol = ctx.cfg.check_tol;
    let rows = ctx.trials(ctx.cfg.suite_trials, |i| -> Result<Vec<Cell>, CliError> {
        let mut rng = seeded_rng(derive_seed(ctx.seed, LIFTING, i as u64));
        let (z, v) = covering_pair(&mut rng, ctx);
        let rep = compare(&z, &v).map_err(core)?;
        let w = lifting_operator(&z, &v).map_err(core)?;
        let (res, norm, perp) = (w.lifting_residual(&z), w.norm(), w.perp_norm(&z));
        Ok(vec![
            i.into(),
            z.ambient_dim().into(),
            z.dim().into(),
            v.dim().into(),
            rep.mu.into(),
            rep.epsilon.into(),
            res.into(),
            norm.into(),
            perp.into(),
            tol.into(),
            (res <= tol).into(),
            (norm <= rep.mu.powf(-0.5) + tol).into(),
            (perp <= rep.epsilon.sqrt() + tol).into(),
        ])
    });
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

pub fn symmetry(ctx: &Context) -> Result<Table, CliError> {
    let mut t = Table::new(
        "symmetry",
        &[
            "trial",
            "ambient",
            "dim",
            "mu_vz",
            "mu_zv",
            "sym_tol",
            "symmetric_ok",
        ],
    );
    let rows = ctx.trials(ctx.cfg.suite_trials, |i| -> Result<Vec<Cell>, CliError> {
        let mut rng = seeded_rng(derive_seed(ctx.seed, SYMMETRY, i as u64));
        let n = rng.random_range(2..=ctx.cfg.max_ambient);
        let k = rng.random_range(1..=ctx.cfg.max_target_dim.min(n));
        let (z, v) = (
            random_subspace(&mut rng, n, k),
            random_subspace(&mut rng, n, k),
        );
        let c = overlap_symmetry_check(&z, &v).map_err(core)?;
        Ok(vec![
            i.into(),
            n.into(),
            k.into(),
            c.mu_vz.into(),
            c.mu_zv.into(),
            SYMMETRY_TOL.into(),
            ((c.mu_vz - c.mu_zv).abs() <= SYMMETRY_TOL).into(),
        ])
    });
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

pub fn amplification(ctx: &Context) -> Result<Table, CliError> {
    let mut t = Table::new(
        "amplification",
        &[
            "trial",
            "ambient",
            "dim_z",
            "shrink_param",
            "dilation_max",
            "shrink",
            "mu",
            "mu_after",
            "tol",
            "applies",
            "amplified_ok",
        ],
    );
    let tol = ctx.cfg.check_tol;
    let rows = ctx.trials(
        ctx.cfg.boundary_trials,
        |i| -> Result<Vec<Cell>, CliError> {
            let mut rng = seeded_rng(derive_seed(ctx.seed, AMPLIFICATION, i as u64));
            let n = rng.random_range(2..=ctx.cfg.max_ambient);
            let k = rng.random_range(1..=ctx.cfg.max_target_dim.min(n - 1));
            let (s, d) = (BOUNDARY_SHRINKS[i % 5], DILATIONS[(i / 5) % 3]);
            let z = random_subspace(&mut rng, n, k);
            let mu_target = s * (1.0 + rng.random::<f64>());
            let v = rotate_subspace(&z, 1.0 - mu_target, rng.random()).map_err(core)?;
            let mu = compare(&z, &v).map_err(core)?.mu;
            let a = synth_agsp(&z, s, d, rng.random()).map_err(core)?;
            let image = apply_to_subspace(&a, &v).map_err(core)?;
            let mu_after = compare(&z, &image).map_err(core)?.mu;
            let applies = mu >= a.shrink();
            Ok(vec![
                i.into(),
                n.into(),
                k.into(),
                s.into(),
                d.into(),
                a.shrink().into(),
                mu.into(),
                mu_after.into(),
                tol.into(),
                applies.into(),
                (!applies || mu_after >= 0.5 - tol).into(),
            ])
        },
    );
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

/// Left space spanned by the leading left singular vectors of `Z`'s basis.
fn aligned_left_space(z: &Subspace64, dims: Bipartition, dim: usize) -> Subspace64 {
    let blocks: Vec<CMatrix<f64>> = (0..z.dim())
        .map(|j| agsp_core::bipartite::as_matrix(&z.vector(j), dims))
        .collect();
    let stacked = CMatrix::<f64>::from_fn(dims.left, dims.right * z.dim(), |l, c| {
        blocks[c / dims.right][(l, c % dims.right)]
    });
    let svd = agsp_core::linalg::thin_svd(&stacked);
    Subspace64::from_orthonormal(svd.u.columns(0, dim).into_owned())
        .expect("singular vectors are orthonormal")
}

pub fn tail(ctx: &Context) -> Result<Table, CliError> {
    let mut t = Table::new(
        "tail",
        &["trial", "dim_z", "dim_v", "tail", "delta", "tol", "tail_ok"],
    );
    let tol = ctx.cfg.check_tol;
    let dims = Bipartition::new(8, 8);
    let rows = ctx.trials(
        ctx.cfg.boundary_trials,
        |i| -> Result<Vec<Cell>, CliError> {
            let mut rng = seeded_rng(derive_seed(ctx.seed, TAIL, i as u64));
            let d = rng.random_range(1..=4usize);
            let z = random_subspace(&mut rng, dims.total(), d);
            let psi = z.embed(&gaussian_vector(&mut rng, d).normalize());
            let mut dv = rng.random_range(d..=7usize);
            loop {
                let v = if i % 2 == 0 {
                    random_subspace(&mut rng, dims.left, dv)
                } else {
                    aligned_left_space(&z, dims, dv)
                };
                match tail_bound_check(&z, &v, &psi) {
                    Ok(c) => {
                        return Ok(vec![
                            i.into(),
                            d.into(),
                            dv.into(),
                            c.tail.into(),
                            c.delta.into(),
                            tol.into(),
                            (c.tail <= c.delta.sqrt() + tol).into(),
                        ])
                    }
                    Err(Error::NoCover { .. }) if dv < dims.left => dv += 1,
                    Err(e) => return Err(core(e)),
                }
            }
        },
    );
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

pub fn dyadic(ctx: &Context) -> Result<Table, CliError> {
    let mut t = Table::new(
        "dyadic",
        &[
            "trial",
            "blocks",
            "entropy",
            "bound",
            "tol",
            "dyadic_ok",
            "equality_ok",
        ],
    );
    let tol = ctx.cfg.check_tol;
    let uniform = EntropyPartition::<f64>::new(vec![4], vec![]).map_err(core)?;
    let (s, b) = (
        shannon_entropy(vec![0.25f64; 4]),
        dyadic_entropy_bound(&uniform),
    );
    t.push(vec![
        0usize.into(),
        "4".into(),
        s.into(),
        b.into(),
        tol.into(),
        (s <= b + tol).into(),
        ((s - b).abs() <= 1e-12).into(),
    ]);
    let rows = ctx.trials(
        ctx.cfg.suite_trials.saturating_sub(1),
        |i| -> Result<Vec<Cell>, CliError> {
            let mut rng = seeded_rng(derive_seed(ctx.seed, DYADIC, i as u64 + 1));
            let mut sizes = vec![rng.random_range(3..8usize)];
            sizes.extend((0..rng.random_range(0..6usize)).map(|_| rng.random_range(3..10usize)));
            let len: usize = sizes.iter().sum();
            let mut lambdas: Vec<f64> = (0..len).map(|_| rng.random::<f64>().powi(4)).collect();
            let total = lambdas.iter().sum::<f64>() * (1.0 + 0.5 * rng.random::<f64>());
            lambdas.iter_mut().for_each(|l| *l /= total);
            lambdas.sort_by(|a, b| b.total_cmp(a));
            let mut start = sizes[0];
            let gammas: Vec<f64> = sizes[1..]
                .iter()
                .map(|&s| {
                    let mass: f64 = lambdas[start..start + s].iter().sum();
                    start += s;
                    (mass * (1.0 + 0.1 * rng.random::<f64>())).min(1.0)
                })
                .collect();
            let p = EntropyPartition::new(sizes.clone(), gammas).map_err(core)?;
            debug_assert!(p.admits(&lambdas));
            let (s, b) = (
                shannon_entropy(lambdas.iter().copied()),
                dyadic_entropy_bound(&p),
            );
            let blocks = sizes
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            Ok(vec![
                (i + 1).into(),
                blocks.into(),
                s.into(),
                b.into(),
                tol.into(),
                (s <= b + tol).into(),
                Cell::Empty,
            ])
        },
    );
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

const GRID_W: [usize; 10] = [
    1 << 4,
    1 << 8,
    1 << 12,
    1 << 16,
    1 << 20,
    1 << 24,
    1 << 28,
    1 << 32,
    1 << 40,
    1 << 48,
];
const GRID_RATIO: [f64; 10] = [1.0, 0.5, 0.25, 0.1, 0.05, 0.01, 1e-3, 1e-4, 1e-5, 1e-6];

pub fn formulas(_ctx: &Context) -> Result<Table, CliError> {
    let mut t = Table::new(
        "formulas",
        &[
            "w",
            "d",
            "mu",
            "nu",
            "reduced_v",
            "log_eta_tilde",
            "nu_sampled",
            "log_eta",
            "log_eta_loose",
            "reduced_ok",
            "loose_ok",
        ],
    );
    let mu = 0.5;
    for &w in &GRID_W {
        for &ratio in &GRID_RATIO {
            for d in 1..=10usize {
                let nu = mu * ratio;
                let v = reduced_dimension(w, nu, mu, d);
                let log_eta_tilde =
                    d as f64 / 2.0 * (9.0 / nu).ln() + (w as f64).ln() - v as f64 / 16.0;
                let r = randlem_params(w, v, mu, d);
                t.push(vec![
                    w.into(),
                    d.into(),
                    mu.into(),
                    nu.into(),
                    v.into(),
                    log_eta_tilde.into(),
                    r.nu.into(),
                    r.log_eta.into(),
                    r.log_eta_loose.into(),
                    (v == w || log_eta_tilde <= 0.0).into(),
                    (r.nu >= 1.0 || r.log_eta_loose >= r.log_eta).into(),
                ]);
            }
        }
    }
    Ok(t)
}

/// The two-dimensional instance `A = diag(1, √Δ)`, `Z = span{e0}`,
/// `V = span{(e0 + e1)/√2}`, where the error-ratio bound is attained.
pub fn sharpness(ctx: &Context) -> Result<Table, CliError> {
    let mut t = Table::new(
        "sharpness",
        &[
            "case",
            "shrink",
            "epsilon",
            "epsilon_after",
            "ratio",
            "lift_norm",
            "sharp_ok",
            "lift_ok",
        ],
    );
    for (i, &s) in ctx.cfg.sharpness_shrink.iter().enumerate() {
        if !(0.0..1.0).contains(&s) || s == 0.0 {
            return Err(CliError::Config(format!(
                "sharpness_shrink: {s} outside (0, 1)"
            )));
        }
        let mut a = CMatrix::<f64>::identity(2, 2);
        a[(1, 1)] = real(s.sqrt());
        let z = Subspace64::coordinate(2, &[0]).map_err(core)?;
        let root = real(0.5f64.sqrt());
        let v = Subspace64::from_orthonormal(CMatrix::from_column_slice(2, 1, &[root, root]))
            .map_err(core)?;
        let agsp = validate_agsp(a, z.clone()).map_err(core)?;
        let r = error_reduction_check(&agsp, &v).map_err(core)?;
        let ratio = r.epsilon_after / (agsp.shrink() * r.epsilon_before);
        let w = lifting_operator(&z, &v).map_err(core)?.norm();
        t.push(vec![
            i.into(),
            agsp.shrink().into(),
            r.epsilon_before.into(),
            r.epsilon_after.into(),
            ratio.into(),
            w.into(),
            ((ratio - 1.0).abs() <= 1e-12).into(),
            ((w - 2f64.sqrt()).abs() <= 1e-10).into(),
        ]);
    }
    Ok(t)
}
