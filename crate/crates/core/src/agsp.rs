//! Approximate ground space projectors: certification, synthesis, action on
//! subspaces, error-reduction checks, operator-Schmidt decomposition and
//! partial approximate projectors (PAPs).

use nalgebra::DMatrix;
use rand::Rng;

use crate::bipartite::Bipartition;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{
    derive_seed, gaussian_matrix, haar_unitary, hermitian_eigen, is_hermitian, real, seeded_rng,
    singular_values, spectral_norm, thin_svd, CMatrix, CVector,
};
use crate::scalar::{tol, Real};
use crate::subspace::{compare, Subspace};

/// A certified AGSP: `operator` commutes with `P_Z`, dilates `Z`, and has
/// `‖A P_{Z⊥}‖² = shrink`.
#[derive(Clone, Debug, PartialEq)]
pub struct Agsp<T: Real> {
    operator: CMatrix<T>,
    target: Subspace<T>,
    shrink: T,
    dilation_margin: T,
    commutation_residual: T,
}

impl<T: Real> Agsp<T> {
    pub fn operator(&self) -> &CMatrix<T> {
        &self.operator
    }

    pub fn target(&self) -> &Subspace<T> {
        &self.target
    }

    /// Measured shrink factor `Δ = ‖A P_{Z⊥}‖₂²`.
    pub fn shrink(&self) -> T {
        self.shrink
    }

    /// Smallest eigenvalue of `P_Z A†A P_Z` on `Z`.
    pub fn dilation_margin(&self) -> T {
        self.dilation_margin
    }

    pub fn commutation_residual(&self) -> T {
        self.commutation_residual
    }

    /// Ratio of the largest to the smallest singular value of `A` on `Z`.
    pub fn target_conditioning(&self) -> T {
        let sv = singular_values(&(&self.operator * self.target.basis()));
        match (sv.first(), sv.last()) {
            (Some(&hi), Some(&lo)) if lo > T::zero() => hi / lo,
            _ => T::infinity(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.operator.nrows()
    }
}

/// Certifies `operator` as an AGSP for `target`.
pub fn validate_agsp<T: Real>(operator: CMatrix<T>, target: Subspace<T>) -> Result<Agsp<T>> {
    if !operator.is_square() {
        return Err(Error::Parameter(format!(
            "operator must be square, got {}×{}",
            operator.nrows(),
            operator.ncols()
        )));
    }
    check_dim("validate_agsp", target.ambient_dim(), operator.nrows())?;
    if target.dim() == 0 {
        return Err(Error::UndefinedOverlap);
    }
    let n = operator.nrows();
    let p = target.projector();
    let commutation_residual = spectral_norm(&(&operator * &p - &p * &operator));
    let tol_agsp = tol::<T>().agsp;
    if commutation_residual > tol_agsp {
        return Err(Error::NotAnAgsp {
            residual: commutation_residual.as_f64(),
        });
    }
    let on_target = singular_values(&(&operator * target.basis()));
    let smallest = on_target.last().copied().unwrap_or_else(T::zero);
    let dilation_margin = smallest * smallest;
    if dilation_margin < T::one() - tol_agsp {
        return Err(Error::NotADilation {
            margin: dilation_margin.as_f64(),
        });
    }
    let perp = CMatrix::<T>::identity(n, n) - p;
    let s = spectral_norm(&(&operator * perp));
    Ok(Agsp {
        operator,
        target,
        shrink: s * s,
        dilation_margin,
        commutation_residual,
    })
}

/// Random AGSP of block form `A_Z ⊕ A_{Z⊥}` with `‖A_{Z⊥}‖ = √shrink`.
///
/// With `dilation_max = 1` the block on `Z` is the identity; otherwise it is a
/// random operator with singular values drawn uniformly from
/// `[1, dilation_max]`.
pub fn synth_agsp<T: Real>(
    z: &Subspace<T>,
    shrink: T,
    dilation_max: T,
    rng_seed: u64,
) -> Result<Agsp<T>> {
    if shrink.as_f64().is_nan() || shrink < T::zero() {
        return Err(Error::Parameter(format!(
            "shrink {shrink} must be non-negative"
        )));
    }
    if dilation_max.as_f64().is_nan() || dilation_max < T::one() {
        return Err(Error::Parameter(format!(
            "dilation_max {dilation_max} must be at least 1"
        )));
    }
    if z.dim() == 0 {
        return Err(Error::UndefinedOverlap);
    }
    let mut rng = seeded_rng(derive_seed(rng_seed, 0xA65, 0));
    let (n, k) = (z.ambient_dim(), z.dim());
    let perp = z.complement();
    let m = n - k;

    let block_z = if dilation_max == T::one() {
        CMatrix::<T>::identity(k, k)
    } else {
        let u = haar_unitary::<T, _>(&mut rng, k);
        let w = haar_unitary::<T, _>(&mut rng, k);
        let span = dilation_max - T::one();
        let diag = CVector::<T>::from_iterator(
            k,
            (0..k).map(|_| real(T::one() + span * T::lit(rng.random::<f64>()))),
        );
        u * CMatrix::<T>::from_diagonal(&diag) * w.adjoint()
    };

    let block_perp = if m == 0 || shrink == T::zero() {
        DMatrix::zeros(m, m)
    } else {
        let g = gaussian_matrix::<T, _>(&mut rng, m, m);
        let top = spectral_norm(&g);
        g * real(shrink.sqrt() / top)
    };

    // A = Z A_Z Z† + Z⊥ A_⊥ Z⊥†.
    let operator = z.basis() * block_z * z.basis().adjoint()
        + perp.basis() * block_perp * perp.basis().adjoint();
    validate_agsp(operator, z.clone())
}

/// Chebyshev polynomial of the first kind by the three-term recurrence.
pub fn chebyshev_t<T: Real>(degree: usize, y: T) -> T {
    let (mut prev, mut cur) = (T::one(), y);
    if degree == 0 {
        return prev;
    }
    let two = T::lit(2.0);
    for _ in 1..degree {
        let next = two * y * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `4 exp(−4k √(gap/top))`, the standard decay estimate for the squared
/// shrink of the degree-`k` Chebyshev AGSP on a spectrum `[gap, top]`.
pub fn chebyshev_shrink_estimate<T: Real>(gap: T, top: T, degree: usize) -> T {
    T::lit(4.0) * (-(T::lit(4.0 * degree as f64)) * (gap / top).sqrt()).exp()
}

/// Spectral AGSP `p(H)` with `p` the degree-`degree` Chebyshev polynomial
/// normalized to 1 on the ground energy and bounded by `t` on `[gap, top]`.
pub fn chebyshev_agsp<T: Real>(h: &CMatrix<T>, z: &Subspace<T>, degree: usize) -> Result<Agsp<T>> {
    let t = tol::<T>();
    check_dim("chebyshev_agsp", z.ambient_dim(), h.nrows())?;
    if !is_hermitian(h, t.num) {
        return Err(Error::Parameter("Hamiltonian must be Hermitian".into()));
    }
    let (n, d) = (h.nrows(), z.dim());
    if d == 0 {
        return Err(Error::UndefinedOverlap);
    }
    let (values, vectors) = hermitian_eigen(h);
    let lowest = Subspace::from_columns(&vectors.columns(0, d).into_owned(), T::zero());
    let fit = compare(z, &lowest)?;
    if fit.delta > t.cover {
        return Err(Error::Precondition(format!(
            "target is not the lowest eigenspace (viability error {:e})",
            fit.delta.as_f64()
        )));
    }
    let ground = values[0];
    let mut weights = vec![T::one(); n];
    if d < n {
        let gap = values[d] - ground;
        if gap < t.cover {
            return Err(Error::DegenerateGap { gap: gap.as_f64() });
        }
        let top = values[n - 1] - ground;
        let width = top - gap;
        if width <= t.num * top {
            // Single excited level: any degree ≥ 1 annihilates it.
            let w = if degree == 0 { T::one() } else { T::zero() };
            weights[d..].iter_mut().for_each(|x| *x = w);
        } else {
            let map = |x: T| (top + gap - T::lit(2.0) * x) / width;
            let norm = chebyshev_t(degree, map(T::zero()));
            for (w, &lam) in weights.iter_mut().zip(values.iter()).skip(d) {
                *w = chebyshev_t(degree, map(lam - ground)) / norm;
            }
        }
    }
    let diag = CVector::<T>::from_iterator(n, weights.into_iter().map(real));
    let operator = &vectors * CMatrix::<T>::from_diagonal(&diag) * vectors.adjoint();
    validate_agsp(operator, z.clone())
}

/// `A(V)`, rank-truncated at the default relative threshold.
pub fn apply_to_subspace<T: Real>(a: &Agsp<T>, v: &Subspace<T>) -> Result<Subspace<T>> {
    check_dim("apply_to_subspace", a.ambient_dim(), v.ambient_dim())?;
    Ok(Subspace::from_columns(
        &(a.operator() * v.basis()),
        tol::<T>().rank,
    ))
}

/// Before/after parameters of one AGSP application.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReduction<T: Real> {
    pub mu_before: T,
    pub delta_before: T,
    pub epsilon_before: T,
    pub mu_after: T,
    pub delta_after: T,
    pub epsilon_after: T,
    /// Dimension of `A(V)`, which may be smaller than `dim V`.
    pub dim_after: usize,
    /// Both `ε′ ≤ Δ ε` and `δ′ ≤ Δ δ / μ` hold within `tol_num`.
    pub bound_holds: bool,
}

pub fn error_reduction_check<T: Real>(a: &Agsp<T>, v: &Subspace<T>) -> Result<ErrorReduction<T>> {
    let z = a.target();
    let before = compare(z, v)?;
    if !before.covers {
        return Err(Error::NoCover {
            mu: before.mu.as_f64(),
        });
    }
    let image = apply_to_subspace(a, v)?;
    let after = compare(z, &image)?;
    let slack = tol::<T>().num;
    let shrink = a.shrink();
    let ratio_ok = after.epsilon <= shrink * before.epsilon + slack;
    let viability_ok = after.delta <= shrink * before.delta / before.mu + slack;
    Ok(ErrorReduction {
        mu_before: before.mu,
        delta_before: before.delta,
        epsilon_before: before.epsilon,
        mu_after: after.mu,
        delta_after: after.delta,
        epsilon_after: after.epsilon,
        dim_after: image.dim(),
        bound_holds: ratio_ok && viability_ok,
    })
}

/// An AGSP together with its operator-Schmidt decomposition across a cut.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteAgsp<T: Real> {
    pub base: Agsp<T>,
    pub dims: Bipartition,
    /// All operator-Schmidt singular values, non-increasing.
    pub schmidt_values: Vec<T>,
    /// Number of values above `tol_rank_op × max`.
    pub rank_exact: usize,
    /// `σ_r L_r` for the first `rank_exact` terms, each `dL × dL`.
    pub left_factors: Vec<CMatrix<T>>,
    /// `R_r`, each `dR × dR`, so that `A = Σ_r left_r ⊗ right_r`.
    pub right_factors: Vec<CMatrix<T>>,
}

impl<T: Real> BipartiteAgsp<T> {
    /// `Σ_r left_r ⊗ right_r`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.dims.total();
        self.left_factors
            .iter()
            .zip(&self.right_factors)
            .fold(DMatrix::zeros(n, n), |acc, (l, r)| acc + l.kronecker(r))
    }

    /// Count of Schmidt values above `rel_tol × max`; a reported metric only.
    pub fn numeric_rank(&self, rel_tol: T) -> usize {
        let top = self.schmidt_values.first().copied().unwrap_or_else(T::zero);
        self.schmidt_values
            .iter()
            .filter(|&&s| top > T::zero() && s > rel_tol * top)
            .count()
    }
}

/// Reshuffles `A[(l,r),(l′,r′)]` into `M[(l,l′),(r,r′)]` and takes its SVD.
pub fn operator_schmidt<T: Real>(a: &Agsp<T>, dims: Bipartition) -> Result<BipartiteAgsp<T>> {
    check_dim("operator_schmidt", a.ambient_dim(), dims.total())?;
    let (dl, dr) = (dims.left, dims.right);
    let op = a.operator();
    let reshuffled = DMatrix::from_fn(dl * dl, dr * dr, |row, col| {
        let (l, lp) = (row / dl, row % dl);
        let (r, rp) = (col / dr, col % dr);
        op[(l * dr + r, lp * dr + rp)]
    });
    let svd = thin_svd(&reshuffled);
    let top = svd.sigma.first().copied().unwrap_or_else(T::zero);
    let cutoff = tol::<T>().rank_op * top;
    let rank_exact = svd
        .sigma
        .iter()
        .filter(|&&s| top > T::zero() && s > cutoff)
        .count();
    let left_factors = (0..rank_exact)
        .map(|k| DMatrix::from_fn(dl, dl, |l, lp| svd.u[(l * dl + lp, k)] * real(svd.sigma[k])))
        .collect();
    let right_factors = (0..rank_exact)
        .map(|k| DMatrix::from_fn(dr, dr, |r, rp| svd.v_t[(k, r * dr + rp)]))
        .collect();
    Ok(BipartiteAgsp {
        base: a.clone(),
        dims,
        schmidt_values: svd.sigma,
        rank_exact,
        left_factors,
        right_factors,
    })
}

/// A space of left-factor operators, Hilbert–Schmidt orthonormal.
#[derive(Clone, Debug, PartialEq)]
pub struct Pap<T: Real> {
    pub left_factors: Vec<CMatrix<T>>,
    pub dim_pap: usize,
    pub left_dim: usize,
    /// Shrink factor of the AGSP the space was extracted from.
    pub shrink: T,
}

impl<T: Real> Pap<T> {
    /// Span of arbitrary `left_dim × left_dim` operators with a stated shrink.
    pub fn from_factors(left_dim: usize, factors: &[CMatrix<T>], shrink: T) -> Result<Self> {
        for f in factors {
            if f.shape() != (left_dim, left_dim) {
                return Err(Error::DimensionMismatch {
                    context: "Pap::from_factors",
                    expected: left_dim,
                    found: f.nrows(),
                });
            }
        }
        let n2 = left_dim * left_dim;
        let cols: Vec<CVector<T>> = factors
            .iter()
            .map(|f| {
                CVector::<T>::from_iterator(n2, (0..n2).map(|i| f[(i / left_dim, i % left_dim)]))
            })
            .collect();
        let span = if cols.is_empty() {
            Subspace::zero(n2)
        } else {
            Subspace::from_columns(&CMatrix::<T>::from_columns(&cols), tol::<T>().rank)
        };
        let left_factors: Vec<CMatrix<T>> = (0..span.dim())
            .map(|k| {
                DMatrix::from_fn(left_dim, left_dim, |i, j| {
                    span.basis()[(i * left_dim + j, k)]
                })
            })
            .collect();
        Ok(Self {
            dim_pap: left_factors.len(),
            left_factors,
            left_dim,
            shrink,
        })
    }
}

pub fn pap_from_agsp<T: Real>(b: &BipartiteAgsp<T>) -> Pap<T> {
    Pap::from_factors(b.dims.left, &b.left_factors, b.base.shrink())
        .expect("operator-Schmidt factors have the left dimension")
}

/// `K V = span{κ|v⟩ : κ ∈ K, |v⟩ ∈ V}`.
pub fn pap_apply<T: Real>(k: &Pap<T>, v: &Subspace<T>) -> Result<Subspace<T>> {
    check_dim("pap_apply", k.left_dim, v.ambient_dim())?;
    if k.dim_pap == 0 || v.dim() == 0 {
        return Ok(Subspace::zero(k.left_dim));
    }
    let blocks: Vec<CMatrix<T>> = k.left_factors.iter().map(|f| f * v.basis()).collect();
    let cols: Vec<CVector<T>> = blocks
        .iter()
        .flat_map(|b| b.column_iter().map(|c| c.into_owned()))
        .collect();
    Ok(Subspace::from_columns(
        &CMatrix::<T>::from_columns(&cols),
        tol::<T>().rank,
    ))
}
