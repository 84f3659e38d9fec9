//! Subspace geometry: orthonormal bases, transition maps, principal angles,
//! overlaps, lifting operators and approximate equality of subspaces.
//!
//! Conventions: `compare(z, v)` reports the overlap of `v` *onto* `z`, i.e.
//! `min_{|z⟩ ∈ S(Z)} ⟨z|P_V|z⟩`. The transition map from `Z` to `V` is the
//! matrix `V† Z` in the stored bases.

use nalgebra::DMatrix;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{
    derive_seed, gaussian_matrix, haar_unitary, max_abs, real, seeded_rng, singular_values,
    spectral_norm, thin_svd, CMatrix, CVector,
};
use crate::scalar::{tol, Real};

/// A linear subspace stored through a column-orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T: Real> {
    basis: CMatrix<T>,
}

impl<T: Real> Subspace<T> {
    /// The zero subspace of `C^ambient`.
    pub fn zero(ambient: usize) -> Self {
        Self {
            basis: DMatrix::zeros(ambient, 0),
        }
    }

    /// The whole space `C^ambient` with the standard basis.
    pub fn full(ambient: usize) -> Self {
        Self {
            basis: DMatrix::identity(ambient, ambient),
        }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Result<Self> {
        let mut basis = DMatrix::zeros(ambient, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            if i >= ambient {
                return Err(Error::Parameter(format!(
                    "coordinate index {i} outside ambient {ambient}"
                )));
            }
            basis[(i, j)] = real(T::one());
        }
        Self::from_orthonormal(basis)
    }

    /// Wraps a basis that is already column-orthonormal within `tol_ortho`.
    pub fn from_orthonormal(basis: CMatrix<T>) -> Result<Self> {
        let k = basis.ncols();
        if k > basis.nrows() {
            return Err(Error::AmbientTooSmall {
                ambient: basis.nrows(),
                dim: k,
            });
        }
        let defect = max_abs(&(basis.adjoint() * &basis - CMatrix::<T>::identity(k, k)));
        if defect > tol::<T>().ortho {
            return Err(Error::Parameter(format!(
                "basis is not orthonormal (Gram defect {:e})",
                defect.as_f64()
            )));
        }
        Ok(Self { basis })
    }

    /// Orthonormal basis for the column span of `m`, truncated at `tol_rank`
    /// relative to the largest singular value.
    pub fn from_columns(m: &CMatrix<T>, tol_rank: T) -> Self {
        let svd = thin_svd(m);
        let top = svd.sigma.first().copied().unwrap_or_else(T::zero);
        let rank = if top > T::zero() {
            svd.sigma
                .iter()
                .take_while(|&&s| s > tol_rank * top)
                .count()
        } else {
            0
        };
        Self {
            basis: svd.u.columns(0, rank).into_owned(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix<T> {
        &self.basis
    }

    pub fn into_basis(self) -> CMatrix<T> {
        self.basis
    }

    /// Basis vector `i` as an ambient vector.
    pub fn vector(&self, i: usize) -> CVector<T> {
        self.basis.column(i).into_owned()
    }

    /// The orthogonal projector `P = B B†` as an ambient matrix.
    pub fn projector(&self) -> CMatrix<T> {
        &self.basis * self.basis.adjoint()
    }

    /// Applies `P` to each column of `m`.
    pub fn project(&self, m: &CMatrix<T>) -> CMatrix<T> {
        &self.basis * (self.basis.adjoint() * m)
    }

    pub fn project_vector(&self, v: &CVector<T>) -> CVector<T> {
        &self.basis * (self.basis.adjoint() * v)
    }

    /// Euclidean distance from `v` to the subspace.
    pub fn distance(&self, v: &CVector<T>) -> T {
        (v - self.project_vector(v)).norm()
    }

    /// Maps coordinates in this basis to an ambient vector.
    pub fn embed(&self, coords: &CVector<T>) -> CVector<T> {
        &self.basis * coords
    }

    /// Orthogonal complement in the ambient space.
    pub fn complement(&self) -> Self {
        let n = self.ambient_dim();
        let perp = CMatrix::<T>::identity(n, n) - self.projector();
        // Singular values of a projector are 0 or 1, so a cut at 1/2 is exact.
        Self::from_columns(&perp, T::lit(0.5))
    }

    /// Right-multiplies the basis by a unitary of the subspace dimension.
    /// The span is unchanged.
    pub fn rebased(&self, unitary: &CMatrix<T>) -> Result<Self> {
        check_dim("rebased", self.dim(), unitary.nrows())?;
        Self::from_orthonormal(&self.basis * unitary)
    }

    /// Largest entry of `B†B − I`.
    pub fn orthogonality_defect(&self) -> T {
        let k = self.dim();
        max_abs(&(self.basis.adjoint() * &self.basis - CMatrix::<T>::identity(k, k)))
    }

    /// Re-orthonormalizes the basis once; used after subspace arithmetic.
    pub fn reorthonormalized(&self) -> Self {
        Self::from_columns(&self.basis, tol::<T>().rank)
    }
}

/// Span of `vectors` in `C^ambient` with numerical rank cut at
/// `tol_rank × σ_max`. Empty input gives the zero subspace.
pub fn orthonormalize<T: Real>(
    ambient: usize,
    vectors: &[CVector<T>],
    tol_rank: T,
) -> Result<Subspace<T>> {
    for v in vectors {
        check_dim("orthonormalize", ambient, v.len())?;
    }
    if vectors.is_empty() {
        return Ok(Subspace::zero(ambient));
    }
    let m = CMatrix::<T>::from_columns(vectors);
    Ok(Subspace::from_columns(&m, tol_rank))
}

/// Matrix of the restricted projection `Z → V` in the stored bases.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMap<T: Real> {
    pub matrix: CMatrix<T>,
}

impl<T: Real> TransitionMap<T> {
    pub fn singular_values(&self) -> Vec<T> {
        singular_values(&self.matrix)
    }

    pub fn norm(&self) -> T {
        spectral_norm(&self.matrix)
    }
}

pub fn transition_map<T: Real>(from: &Subspace<T>, to: &Subspace<T>) -> Result<TransitionMap<T>> {
    check_dim("transition_map", from.ambient_dim(), to.ambient_dim())?;
    Ok(TransitionMap {
        matrix: to.basis.adjoint() * &from.basis,
    })
}

/// Overlap, viability error, error ratio and principal angles of one subspace
/// onto another.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapReport<T: Real> {
    pub mu: T,
    pub delta: T,
    /// `delta / mu`; `+∞` when `mu = 0`.
    pub epsilon: T,
    /// One angle per dimension of the target, largest first.
    pub angles: Vec<T>,
    pub covers: bool,
}

impl<T: Real> OverlapReport<T> {
    /// Assembles a report from the transition matrix `t` (codomain × target
    /// dimension) and the residual `P_{V⊥}` applied to the target basis.
    ///
    /// `mu` is read from the smallest singular value of `t` when it is small
    /// and `delta` from the residual norm otherwise, so the smaller of the two
    /// keeps full relative precision; `delta = 1 − mu` holds exactly.
    pub(crate) fn from_maps(t: &CMatrix<T>, residual: &CMatrix<T>) -> Self {
        let target_dim = t.ncols();
        let mut cosines: Vec<T> = singular_values(t)
            .into_iter()
            .map(|s| s.min(T::one()))
            .collect();
        cosines.resize(target_dim, T::zero());
        let sigma_min = cosines.last().copied().unwrap_or_else(T::zero);
        let mu_direct = sigma_min * sigma_min;
        let half = T::lit(0.5);
        let (mu, delta) = if mu_direct <= half {
            (mu_direct, T::one() - mu_direct)
        } else {
            let r = spectral_norm(residual);
            let delta = (r * r).min(T::one());
            (T::one() - delta, delta)
        };
        let epsilon = if mu > T::zero() {
            delta / mu
        } else {
            T::infinity()
        };
        // Pair cosines (descending) with sines (ascending) so that small and
        // large angles both come out accurately from atan2.
        let mut sines = singular_values(residual);
        sines.resize(target_dim, T::zero());
        sines.reverse();
        let mut angles: Vec<T> = cosines
            .iter()
            .zip(&sines)
            .map(|(&c, &s)| s.min(T::one()).atan2(c.max(T::zero())))
            .collect();
        angles.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Self {
            mu,
            delta,
            epsilon,
            angles,
            covers: mu > tol::<T>().cover,
        }
    }

    pub fn max_angle(&self) -> T {
        self.angles.first().copied().unwrap_or_else(T::zero)
    }
}

/// Overlap of `v` onto `z`.
pub fn compare<T: Real>(z: &Subspace<T>, v: &Subspace<T>) -> Result<OverlapReport<T>> {
    check_dim("compare", z.ambient_dim(), v.ambient_dim())?;
    if z.dim() == 0 {
        return Err(Error::UndefinedOverlap);
    }
    let t = v.basis.adjoint() * &z.basis;
    let residual = &z.basis - &v.basis * &t;
    Ok(OverlapReport::from_maps(&t, &residual))
}

/// Both directed overlaps of a pair of subspaces.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryCheck<T: Real> {
    /// Overlap of `V` onto `Z`.
    pub mu_vz: T,
    /// Overlap of `Z` onto `V`.
    pub mu_zv: T,
    /// `None` unless both overlaps exceed the covering threshold.
    pub symmetric: Option<bool>,
}

pub fn overlap_symmetry_check<T: Real>(
    z: &Subspace<T>,
    v: &Subspace<T>,
) -> Result<SymmetryCheck<T>> {
    let mu_vz = compare(z, v)?.mu;
    let mu_zv = compare(v, z)?.mu;
    let t = tol::<T>();
    let symmetric = (mu_vz > t.cover && mu_zv > t.cover).then(|| (mu_vz - mu_zv).abs() <= t.num);
    Ok(SymmetryCheck {
        mu_vz,
        mu_zv,
        symmetric,
    })
}

/// `P_V(Z)`, re-orthonormalized.
pub fn projected_image<T: Real>(v: &Subspace<T>, z: &Subspace<T>) -> Result<Subspace<T>> {
    check_dim("projected_image", v.ambient_dim(), z.ambient_dim())?;
    Ok(Subspace::from_columns(
        &v.project(&z.basis),
        tol::<T>().rank,
    ))
}

/// The lifting operator `W_{V←Z}`: the right inverse of the restricted
/// projection `V → Z`, as a map from `Z`-coordinates into the ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftingOperator<T: Real> {
    pub matrix: CMatrix<T>,
}

impl<T: Real> LiftingOperator<T> {
    pub fn norm(&self) -> T {
        spectral_norm(&self.matrix)
    }

    /// `‖Z† W − I‖₂`, the failure of the lifting property.
    pub fn lifting_residual(&self, z: &Subspace<T>) -> T {
        let k = z.dim();
        spectral_norm(&(z.basis().adjoint() * &self.matrix - CMatrix::<T>::identity(k, k)))
    }

    /// `‖P_{Z⊥} W‖₂`.
    pub fn perp_norm(&self, z: &Subspace<T>) -> T {
        spectral_norm(&(&self.matrix - z.project(&self.matrix)))
    }

    /// `‖P_{V⊥} W‖₂`; zero when the columns lie in `V`.
    pub fn leakage(&self, v: &Subspace<T>) -> T {
        spectral_norm(&(&self.matrix - v.project(&self.matrix)))
    }
}

pub fn lifting_operator<T: Real>(z: &Subspace<T>, v: &Subspace<T>) -> Result<LiftingOperator<T>> {
    check_dim("lifting_operator", z.ambient_dim(), v.ambient_dim())?;
    if z.dim() == 0 {
        return Err(Error::UndefinedOverlap);
    }
    if v.dim() < z.dim() {
        return Err(Error::NoCover { mu: 0.0 });
    }
    // Restricted projection V → Z in coordinates: M = Z† V = U Σ Wᵗ.
    let m = z.basis.adjoint() * &v.basis;
    let svd = thin_svd(&m);
    let sigma_min = svd.sigma.last().copied().unwrap_or_else(T::zero);
    let mu = sigma_min * sigma_min;
    if mu <= tol::<T>().cover {
        return Err(Error::NoCover { mu: mu.as_f64() });
    }
    // M† (M M†)^{-1} = W Σ^{-1} U†.
    let mut inv = svd.v_t.adjoint();
    for (j, s) in svd.sigma.iter().enumerate() {
        let mut col = inv.column_mut(j);
        col /= real(*s);
    }
    let coords = inv * svd.u.adjoint();
    Ok(LiftingOperator {
        matrix: &v.basis * coords,
    })
}

/// Whether `a` and `b` are mutually `(1 − delta)`-overlapping.
pub fn delta_close<T: Real>(a: &Subspace<T>, b: &Subspace<T>, delta: T) -> Result<bool> {
    check_dim("delta_close ambient", a.ambient_dim(), b.ambient_dim())?;
    check_dim("delta_close dimension", a.dim(), b.dim())?;
    if a.dim() == 0 {
        return Ok(true);
    }
    let floor = T::one() - delta - tol::<T>().num;
    Ok(compare(a, b)?.mu >= floor && compare(b, a)?.mu >= floor)
}

/// Rotates `z` by the angle `arcsin √delta` into random directions of its
/// complement, giving a subspace mutually `(1 − delta)`-overlapping with `z`.
///
/// When the complement is large enough every direction is rotated by the same
/// angle; otherwise as many directions as the complement allows.
pub fn rotate_subspace<T: Real>(z: &Subspace<T>, delta: T, rng_seed: u64) -> Result<Subspace<T>> {
    if !(delta >= T::zero() && delta < T::one()) {
        return Err(Error::Parameter(format!(
            "rotation delta {delta} outside [0, 1)"
        )));
    }
    let (n, k) = (z.ambient_dim(), z.dim());
    if k == 0 {
        return Err(Error::Parameter("cannot rotate the zero subspace".into()));
    }
    if n < k + 1 {
        return Err(Error::AmbientTooSmall { ambient: n, dim: k });
    }
    if delta == T::zero() {
        return Ok(z.clone());
    }
    let mut rng = seeded_rng(derive_seed(rng_seed, 0x0507, 0));
    let frame = z.basis() * haar_unitary::<T, _>(&mut rng, k);
    let perp = z.complement();
    let r = k.min(n - k);
    let mix = Subspace::from_columns(&gaussian_matrix::<T, _>(&mut rng, perp.dim(), r), T::zero());
    let targets = perp.basis() * mix.basis();
    let c = (T::one() - delta).sqrt();
    let s = delta.sqrt();
    let mut basis = frame.clone();
    for j in 0..r {
        let col = frame.column(j) * real(c) + targets.column(j) * real(s);
        basis.set_column(j, &col);
    }
    Subspace::from_orthonormal(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cplx, gaussian_vector, hermitian_eigen};
    use nalgebra::Complex;
    use proptest::prelude::*;

    type S = Subspace<f64>;

    fn vec_of(xs: &[f64]) -> CVector<f64> {
        CVector::<f64>::from_iterator(xs.len(), xs.iter().map(|&x| real(x)))
    }

    fn random_subspace(n: usize, k: usize, seed: u64) -> S {
        let mut rng = seeded_rng(seed);
        S::from_columns(&gaussian_matrix(&mut rng, n, k), 1e-10)
    }

    /// Rank by Gaussian elimination with partial pivoting.
    fn rank_by_row_reduction(mut m: CMatrix<f64>, tol: f64) -> usize {
        let (rows, cols) = m.shape();
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let (p, best) = (rank..rows)
                .map(|r| (r, m[(r, c)].norm()))
                .fold((rank, -1.0), |a, b| if b.1 > a.1 { b } else { a });
            if best <= tol {
                continue;
            }
            m.swap_rows(rank, p);
            let pivot = m[(rank, c)];
            for r in rank + 1..rows {
                let f = m[(r, c)] / pivot;
                for cc in c..cols {
                    let v = m[(rank, cc)];
                    m[(r, cc)] -= f * v;
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn collinear_vectors_span_a_line() {
        let s = orthonormalize(2, &[vec_of(&[1.0, 0.0]), vec_of(&[2.0, 0.0])], 1e-10).unwrap();
        assert_eq!(s.dim(), 1);
        assert!((s.basis()[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(s.basis()[(1, 0)].norm() < 1e-14);
    }

    #[test]
    fn standard_basis_spans_full_space() {
        let s = orthonormalize(2, &[vec_of(&[1.0, 0.0]), vec_of(&[0.0, 1.0])], 1e-10).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.orthogonality_defect() < 1e-14);
    }

    #[test]
    fn random_vectors_rank_matches_row_reduction() {
        let mut rng = seeded_rng(17);
        let vs: Vec<CVector<f64>> = (0..5).map(|_| gaussian_vector(&mut rng, 8)).collect();
        let s = orthonormalize(8, &vs, 1e-10).unwrap();
        let oracle = rank_by_row_reduction(CMatrix::from_columns(&vs), 1e-12);
        assert_eq!(oracle, 5);
        assert_eq!(s.dim(), oracle);
        assert!(s.orthogonality_defect() < 1e-10);
    }

    #[test]
    fn orthonormalize_errors_and_empty() {
        let e = orthonormalize(3, &[vec_of(&[1.0, 0.0])], 1e-10).unwrap_err();
        assert!(matches!(e, Error::DimensionMismatch { .. }));
        assert_eq!(orthonormalize::<f64>(3, &[], 1e-10).unwrap().dim(), 0);
        assert_eq!(
            orthonormalize(3, &[vec_of(&[0.0, 0.0, 0.0])], 1e-10)
                .unwrap()
                .dim(),
            0
        );
    }

    #[test]
    fn transition_map_examples() {
        let e0 = S::coordinate(2, &[0]).unwrap();
        let t = transition_map(&e0, &e0).unwrap();
        assert!((t.matrix[(0, 0)] - real(1.0)).norm() < 1e-15);
        let h = 0.5f64.sqrt();
        let diag = orthonormalize(2, &[vec_of(&[h, h])], 1e-10).unwrap();
        let t = transition_map(&e0, &diag).unwrap();
        assert!((t.matrix[(0, 0)].norm() - h).abs() < 1e-15);
        let bad = S::full(3);
        assert!(transition_map(&e0, &bad).is_err());
    }

    #[test]
    fn transition_singular_values_match_projector_spectrum() {
        let z = random_subspace(10, 3, 1);
        let v = random_subspace(10, 4, 2);
        let mut sv = transition_map(&z, &v).unwrap().singular_values();
        // Oracle: eigenvalues of P_Z P_V P_Z restricted to Z are cos² of the angles.
        let restricted = z.basis().adjoint() * v.projector() * z.basis();
        let (eig, _) = hermitian_eigen(&restricted);
        let mut cos: Vec<f64> = eig.iter().map(|x| x.max(0.0).sqrt()).collect();
        cos.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in sv.iter().zip(&cos) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn compare_sharp_instance() {
        let z = S::coordinate(2, &[0]).unwrap();
        let eps = 1.0f64;
        let n = (1.0 + eps).sqrt();
        let v = orthonormalize(2, &[vec_of(&[1.0 / n, eps.sqrt() / n])], 1e-10).unwrap();
        let r = compare(&z, &v).unwrap();
        assert!((r.mu - 0.5).abs() < 1e-15);
        assert!((r.epsilon - 1.0).abs() < 1e-14);
        assert!(r.covers);
    }

    #[test]
    fn compare_identity_and_orthogonal() {
        let z = random_subspace(6, 2, 5);
        let r = compare(&z, &z).unwrap();
        assert!((r.mu - 1.0).abs() < 1e-14 && r.delta < 1e-14 && r.epsilon < 1e-14);
        let z = S::coordinate(4, &[0, 1]).unwrap();
        let v = S::coordinate(4, &[2, 3]).unwrap();
        let r = compare(&z, &v).unwrap();
        assert_eq!(r.mu, 0.0);
        assert!(!r.covers);
        assert!(r.epsilon.is_infinite());
        assert_eq!(
            compare(&S::zero(4), &v).unwrap_err(),
            Error::UndefinedOverlap
        );
    }

    #[test]
    fn report_invariants_hold() {
        let z = random_subspace(9, 3, 11);
        let v = random_subspace(9, 5, 12);
        let r = compare(&z, &v).unwrap();
        assert_eq!(r.angles.len(), 3);
        assert!(r.angles.windows(2).all(|w| w[0] >= w[1]));
        assert!((r.max_angle().cos().powi(2) - r.mu).abs() < 1e-9);
        assert!((r.delta - (1.0 - r.mu)).abs() < 1e-15);
        assert!((r.epsilon - r.delta / r.mu).abs() < 1e-12);
    }

    #[test]
    fn symmetry_examples() {
        let z = S::coordinate(2, &[0]).unwrap();
        let h = 0.5f64.sqrt();
        let v = orthonormalize(2, &[vec_of(&[h, h])], 1e-10).unwrap();
        let s = overlap_symmetry_check(&z, &v).unwrap();
        assert!((s.mu_vz - 0.5).abs() < 1e-15 && (s.mu_zv - 0.5).abs() < 1e-15);
        assert_eq!(s.symmetric, Some(true));

        let big = S::coordinate(2, &[0, 1]).unwrap();
        let s = overlap_symmetry_check(&z, &big).unwrap();
        assert!((s.mu_vz - 1.0).abs() < 1e-15);
        assert_eq!(s.mu_zv, 0.0);
        assert_eq!(s.symmetric, None);
    }

    #[test]
    fn symmetry_on_random_covering_pair() {
        let z = random_subspace(12, 3, 21);
        let v = random_subspace(12, 3, 22);
        // Independent route: spectra of M†M and MM† for the two transition maps.
        let a = transition_map(&z, &v).unwrap().matrix;
        let b = transition_map(&v, &z).unwrap().matrix;
        let (ea, _) = hermitian_eigen(&(a.adjoint() * &a));
        let (eb, _) = hermitian_eigen(&(b.adjoint() * &b));
        assert!((ea[0] - eb[0]).abs() < 1e-10);
        let s = overlap_symmetry_check(&z, &v).unwrap();
        assert!((s.mu_vz - ea[0]).abs() < 1e-10);
        assert_eq!(s.symmetric, Some(true));
    }

    #[test]
    fn projected_image_examples() {
        let z = random_subspace(6, 2, 31);
        let v = S::from_columns(
            &CMatrix::from_columns(&[
                z.vector(0),
                z.vector(1),
                random_subspace(6, 1, 32).vector(0),
            ]),
            1e-10,
        );
        let y = projected_image(&v, &z).unwrap();
        assert_eq!(y.dim(), 2);
        assert!((compare(&z, &y).unwrap().mu - 1.0).abs() < 1e-12);

        let z = S::coordinate(2, &[0]).unwrap();
        let n = 2f64.sqrt();
        let v = orthonormalize(2, &[vec_of(&[1.0 / n, 1.0 / n])], 1e-10).unwrap();
        let y = projected_image(&v, &z).unwrap();
        assert!((compare(&v, &y).unwrap().mu - 1.0).abs() < 1e-12);
        assert!((compare(&z, &y).unwrap().mu - 0.5).abs() < 1e-12);
        assert!((compare(&y, &z).unwrap().mu - 0.5).abs() < 1e-12);

        let z = random_subspace(10, 3, 33);
        let v = random_subspace(10, 5, 34);
        let y = projected_image(&v, &z).unwrap();
        let a = compare(&y, &z).unwrap().mu;
        let b = compare(&z, &y).unwrap().mu;
        assert!((a - b).abs() < 1e-10);
        assert!((b - compare(&z, &v).unwrap().mu).abs() < 1e-10);
    }

    #[test]
    fn lifting_identity_and_sharp_instance() {
        let z = random_subspace(5, 2, 41);
        let w = lifting_operator(&z, &z).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-12);
        assert!(max_abs(&(&w.matrix - z.basis())) < 1e-12);

        // μ = 1/2 geometry: ‖W‖ = 1/cos(π/4) = √2 exactly.
        let z = S::coordinate(2, &[0]).unwrap();
        let h = 0.5f64.sqrt();
        let v = orthonormalize(2, &[vec_of(&[h, h])], 1e-10).unwrap();
        let w = lifting_operator(&z, &v).unwrap();
        assert!((w.norm() - 2f64.sqrt()).abs() < 1e-12);
        assert!(w.lifting_residual(&z) < 1e-14);
    }

    #[test]
    fn lifting_random_instance() {
        let z = random_subspace(16, 4, 51);
        let v = random_subspace(16, 7, 52);
        let r = compare(&z, &v).unwrap();
        let w = lifting_operator(&z, &v).unwrap();
        assert!(w.lifting_residual(&z) < 1e-10);
        assert!(w.norm() <= r.mu.powf(-0.5) + 1e-9);
        assert!(w.leakage(&v) < 1e-9);
        assert!(w.perp_norm(&z) <= r.epsilon.sqrt() + 1e-9);
    }

    #[test]
    fn lifting_requires_cover() {
        let z = S::coordinate(4, &[0, 1]).unwrap();
        let v = S::coordinate(4, &[0, 2]).unwrap();
        assert!(matches!(
            lifting_operator(&z, &v),
            Err(Error::NoCover { .. })
        ));
        let v = S::coordinate(4, &[0]).unwrap();
        assert!(matches!(
            lifting_operator(&z, &v),
            Err(Error::NoCover { .. })
        ));
    }

    #[test]
    fn delta_close_examples() {
        let a = random_subspace(6, 2, 61);
        assert!(delta_close(&a, &a, 0.0).unwrap());
        let o = S::coordinate(4, &[0]).unwrap();
        let p = S::coordinate(4, &[1]).unwrap();
        assert!(!delta_close(&o, &p, 0.999).unwrap());
        assert!(delta_close(&o, &p, 1.0).unwrap());
        assert!(delta_close(&a, &random_subspace(6, 3, 1), 0.5).is_err());

        // Rotation by θ in a 2-plane: δ-close exactly for δ ≥ sin²θ.
        let theta = 0.3f64;
        let r = orthonormalize(2, &[vec_of(&[theta.cos(), theta.sin()])], 1e-10).unwrap();
        let line = S::coordinate(2, &[0]).unwrap();
        let s2 = theta.sin().powi(2);
        assert!(delta_close(&line, &r, s2).unwrap());
        assert!(delta_close(&line, &r, s2 + 1e-3).unwrap());
        assert!(!delta_close(&line, &r, s2 - 1e-6).unwrap());
    }

    #[test]
    fn rotate_subspace_examples() {
        let z = random_subspace(6, 2, 71);
        assert_eq!(rotate_subspace(&z, 0.0, 3).unwrap(), z);

        let line = S::coordinate(2, &[0]).unwrap();
        let r = rotate_subspace(&line, 0.25, 9).unwrap();
        assert!((compare(&line, &r).unwrap().mu - 0.75).abs() < 1e-12);
        let angle = compare(&line, &r).unwrap().max_angle();
        assert!((angle - std::f64::consts::FRAC_PI_6).abs() < 1e-9);

        let a = rotate_subspace(&z, 0.1, 5).unwrap();
        let b = rotate_subspace(&z, 0.1, 5).unwrap();
        assert_eq!(a.basis(), b.basis());
        assert!((compare(&z, &a).unwrap().mu - 0.9).abs() < 1e-9);
        assert!((compare(&a, &z).unwrap().mu - 0.9).abs() < 1e-9);

        // Complement smaller than the subspace: only one direction moves.
        let z3 = random_subspace(4, 3, 72);
        let r3 = rotate_subspace(&z3, 0.2, 1).unwrap();
        assert!((compare(&z3, &r3).unwrap().mu - 0.8).abs() < 1e-9);
        assert!(matches!(
            rotate_subspace(&S::full(3), 0.1, 0),
            Err(Error::AmbientTooSmall { .. })
        ));
        assert!(rotate_subspace(&z, 1.0, 0).is_err());
    }

    #[test]
    fn complement_is_orthogonal() {
        let z = random_subspace(7, 3, 81);
        let c = z.complement();
        assert_eq!(c.dim(), 4);
        assert!(max_abs(&(z.basis().adjoint() * c.basis())) < 1e-12);
    }

    #[test]
    fn single_precision_compare() {
        let z = Subspace::<f32>::coordinate(2, &[0]).unwrap();
        let h = 0.5f32.sqrt();
        let v = Subspace::<f32>::from_columns(
            &CMatrix::<f32>::from_column_slice(2, 1, &[Complex::new(h, 0.0), Complex::new(h, 0.0)]),
            1e-5,
        );
        let r = compare(&z, &v).unwrap();
        assert!((r.mu - 0.5).abs() < 1e-6);
    }

    fn unitary(k: usize, seed: u64) -> CMatrix<f64> {
        haar_unitary(&mut seeded_rng(seed), k)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn overlaps_are_symmetric_when_mutual(n in 4usize..12, k in 1usize..4, seed in 0u64..10_000) {
            let z = random_subspace(n, k, seed);
            let v = random_subspace(n, k, seed + 1);
            let s = overlap_symmetry_check(&z, &v).unwrap();
            prop_assume!(s.symmetric.is_some());
            prop_assert!((s.mu_vz - s.mu_zv).abs() <= 1e-10);
        }

        #[test]
        fn lifting_identities(n in 4usize..14, k in 1usize..4, extra in 0usize..4, seed in 0u64..10_000) {
            let z = random_subspace(n, k, seed);
            let v = random_subspace(n, (k + extra).min(n), seed + 7);
            let r = compare(&z, &v).unwrap();
            prop_assume!(r.covers);
            let w = lifting_operator(&z, &v).unwrap();
            // Matrix identities, relative to the size of W.
            let scale = w.norm().max(1.0);
            prop_assert!(w.lifting_residual(&z) <= 1e-9 * scale);
            prop_assert!(w.leakage(&v) <= 1e-9 * scale);
            prop_assert!(w.norm() <= r.mu.powf(-0.5) + 1e-9 * scale);
            prop_assert!(w.perp_norm(&z) <= r.epsilon.sqrt() + 1e-9 * scale);
        }

        #[test]
        fn projected_image_is_mutual(n in 4usize..12, k in 1usize..4, seed in 0u64..10_000) {
            let z = random_subspace(n, k, seed);
            let v = random_subspace(n, (k + 2).min(n), seed + 3);
            let mu = compare(&z, &v).unwrap().mu;
            prop_assume!(mu > 1e-6);
            let y = projected_image(&v, &z).unwrap();
            prop_assert!((compare(&y, &z).unwrap().mu - mu).abs() <= 1e-9);
            prop_assert!((compare(&z, &y).unwrap().mu - mu).abs() <= 1e-9);
        }

        #[test]
        fn compare_is_basis_independent(n in 3usize..10, kz in 1usize..4, kv in 1usize..5, seed in 0u64..10_000) {
            let z = random_subspace(n, kz.min(n), seed);
            let v = random_subspace(n, kv.min(n), seed + 1);
            let a = compare(&z, &v).unwrap();
            let z2 = z.rebased(&unitary(z.dim(), seed + 2)).unwrap();
            let v2 = v.rebased(&unitary(v.dim(), seed + 3)).unwrap();
            let b = compare(&z2, &v2).unwrap();
            prop_assert!((a.mu - b.mu).abs() <= 1e-10);
            prop_assert!((a.delta - b.delta).abs() <= 1e-10);
            if a.epsilon.is_finite() {
                prop_assert!((a.epsilon - b.epsilon).abs() <= 1e-10 * a.epsilon.max(1.0));
            }
            for (x, y) in a.angles.iter().zip(&b.angles) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
            prop_assert_eq!(a.covers, b.covers);
        }

        #[test]
        fn principal_angles_symmetric(n in 3usize..10, k in 1usize..4, seed in 0u64..10_000) {
            let k = k.min(n);
            let z = random_subspace(n, k, seed);
            let v = random_subspace(n, k, seed + 1);
            let a = compare(&z, &v).unwrap().angles;
            let b = compare(&v, &z).unwrap().angles;
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn cplx_helper_roundtrip() {
        let z: Complex<f64> = cplx(1.5, -2.0);
        assert_eq!(z, Complex::new(1.5, -2.0));
    }
}
