//! Multi-restart Riemannian gradient ascent of the entanglement entropy over
//! the unit sphere of a subspace. The result is a lower bound on the maximum.

use crate::bipartite::{as_matrix, from_matrix, Bipartition};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{derive_seed, gaussian_vector, real, seeded_rng, thin_svd, CMatrix, CVector};
use crate::scalar::Real;
use crate::subspace::Subspace;

pub const DEFAULT_RESTARTS: usize = 32;
const GRAD_TOL: f64 = 1e-9;
const MAX_STEPS: usize = 5000;
const ARMIJO: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyEstimate<T: Real> {
    pub psi: CVector<T>,
    /// Coordinates of `psi` in the basis of the subspace.
    pub coords: CVector<T>,
    pub entropy: T,
    /// Gradient norm at the returned point.
    pub gradient_norm: T,
}

/// Entropy in bits and its gradient with respect to the coefficient matrix.
fn entropy_and_gradient<T: Real>(m: &CMatrix<T>) -> (T, CMatrix<T>) {
    let svd = thin_svd(m);
    let ln2 = T::lit(std::f64::consts::LN_2);
    let mut s = T::zero();
    let mut weights = Vec::with_capacity(svd.sigma.len());
    for &sigma in &svd.sigma {
        let p = sigma * sigma;
        if p > T::lit(1e-300) {
            s -= p * p.ln();
            weights.push(-T::lit(2.0) * sigma * p.ln() / ln2);
        } else {
            weights.push(T::zero());
        }
    }
    let mut scaled = svd.u.clone();
    for (j, w) in weights.iter().enumerate() {
        let mut col = scaled.column_mut(j);
        col *= real(*w);
    }
    (s / ln2, scaled * &svd.v_t)
}

fn entropy_at<T: Real>(z: &Subspace<T>, dims: Bipartition, c: &CVector<T>) -> T {
    entropy_and_gradient(&as_matrix(&z.embed(c), dims)).0
}

/// Tangent gradient on the sphere at unit `c`.
fn sphere_gradient<T: Real>(z: &Subspace<T>, dims: Bipartition, c: &CVector<T>) -> (T, CVector<T>) {
    let (s, g) = entropy_and_gradient(&as_matrix(&z.embed(c), dims));
    let g = z.basis().adjoint() * from_matrix(&g);
    let radial = c.dotc(&g).re;
    (s, g - c * real(radial))
}

fn ascend<T: Real>(z: &Subspace<T>, dims: Bipartition, mut c: CVector<T>) -> EntropyEstimate<T> {
    let (mut s, mut g) = sphere_gradient(z, dims, &c);
    let mut step = T::one();
    for _ in 0..MAX_STEPS {
        let gn2 = g.norm_squared();
        if gn2.sqrt() < T::lit(GRAD_TOL) {
            break;
        }
        let mut accepted = false;
        let mut t = (step * T::lit(2.0)).min(T::lit(1e3));
        while t > T::lit(1e-14) {
            let trial = (&c + &g * real(t)).normalize();
            let st = entropy_at(z, dims, &trial);
            if st >= s + T::lit(ARMIJO) * t * gn2 {
                c = trial;
                step = t;
                accepted = true;
                break;
            }
            t *= T::lit(0.5);
        }
        if !accepted {
            break;
        }
        (s, g) = sphere_gradient(z, dims, &c);
    }
    EntropyEstimate {
        psi: z.embed(&c),
        gradient_norm: g.norm(),
        coords: c,
        entropy: s,
    }
}

/// Best entanglement entropy over unit vectors of `z` found from `restarts`
/// random starting points. Restart `r` depends only on `(rng_seed, r)`, so
/// the estimate is non-decreasing in `restarts`.
pub fn max_entropy_estimate<T: Real>(
    z: &Subspace<T>,
    dims: Bipartition,
    restarts: usize,
    rng_seed: u64,
) -> Result<EntropyEstimate<T>> {
    check_dim("max_entropy_estimate", dims.total(), z.ambient_dim())?;
    if z.dim() == 0 {
        return Err(Error::UndefinedOverlap);
    }
    let mut best: Option<EntropyEstimate<T>> = None;
    for r in 0..restarts.max(1) {
        let start = gaussian_vector::<T, _>(
            &mut seeded_rng(derive_seed(rng_seed, 0xE17, r as u64)),
            z.dim(),
        )
        .normalize();
        let est = ascend(z, dims, start);
        if best.as_ref().is_none_or(|b| est.entropy > b.entropy) {
            best = Some(est);
        }
    }
    Ok(best.expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::entanglement_entropy;
    use crate::linalg::gaussian_matrix;

    fn e(n: usize, i: usize) -> CVector<f64> {
        let mut v = CVector::<f64>::zeros(n);
        v[i] = real(1.0);
        v
    }

    #[test]
    fn bell_line() {
        let bell = (e(4, 0) + e(4, 3)) * real(0.5f64.sqrt());
        let z = Subspace::from_columns(&CMatrix::from_columns(&[bell]), 1e-10);
        let est = max_entropy_estimate(&z, Bipartition::new(2, 2), 4, 0).unwrap();
        assert!((est.entropy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_plane_reaches_one_bit_at_equal_weights() {
        let z = Subspace::<f64>::coordinate(64, &[0, 63]).unwrap();
        let est = max_entropy_estimate(&z, Bipartition::new(8, 8), 8, 1).unwrap();
        assert!((est.entropy - 1.0).abs() < 1e-9, "{}", est.entropy);
        assert!((est.coords[0].norm_sqr() - 0.5).abs() < 1e-4);
        let direct = entanglement_entropy(&est.psi, Bipartition::new(8, 8)).unwrap();
        assert!((direct - est.entropy).abs() < 1e-12);
    }

    #[test]
    fn beats_dense_random_sampling() {
        let z = Subspace::<f64>::from_columns(&gaussian_matrix(&mut seeded_rng(42), 16, 2), 1e-10);
        let dims = Bipartition::new(4, 4);
        let est = max_entropy_estimate(&z, dims, DEFAULT_RESTARTS, 7).unwrap();
        let mut rng = seeded_rng(99);
        let mut sampled: f64 = 0.0;
        for _ in 0..100_000 {
            let c = gaussian_vector::<f64, _>(&mut rng, 2).normalize();
            sampled = sampled.max(entanglement_entropy(&z.embed(&c), dims).unwrap());
        }
        assert!(
            est.entropy >= sampled - 1e-6,
            "{} < {}",
            est.entropy,
            sampled
        );
    }

    #[test]
    fn monotone_in_restarts() {
        let z = Subspace::<f64>::from_columns(&gaussian_matrix(&mut seeded_rng(3), 24, 3), 1e-10);
        let dims = Bipartition::new(4, 6);
        let mut prev = f64::NEG_INFINITY;
        for r in 1..8 {
            let s = max_entropy_estimate(&z, dims, r, 11).unwrap().entropy;
            assert!(s >= prev);
            prev = s;
        }
        assert!(prev <= 2.0 + 1e-12);
    }

    #[test]
    fn finite_difference_gradient() {
        let z = Subspace::<f64>::from_columns(&gaussian_matrix(&mut seeded_rng(5), 12, 3), 1e-10);
        let dims = Bipartition::new(3, 4);
        let c = gaussian_vector::<f64, _>(&mut seeded_rng(6), 3).normalize();
        let (_, g) = sphere_gradient(&z, dims, &c);
        let dir = gaussian_vector::<f64, _>(&mut seeded_rng(8), 3);
        let dir = &dir - &c * real(c.dotc(&dir).re);
        let h = 1e-6;
        let fd = (entropy_at(&z, dims, &(&c + &dir * real(h)).normalize())
            - entropy_at(&z, dims, &(&c - &dir * real(h)).normalize()))
            / (2.0 * h);
        let analytic = g.dotc(&dir).re;
        assert!((fd - analytic).abs() < 1e-6, "{fd} vs {analytic}");
    }
}
