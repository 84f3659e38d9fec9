//! Dense complex linear-algebra helpers. Matrices are nalgebra types; SVDs
//! and Hermitian eigensolves run in double precision through faer.

use faer::{c64, Mat, Side};
use nalgebra::{Complex, ComplexField, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::Real;

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Deterministic generator used for every randomized routine.
pub type LabRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent seed for `(stream, index)` from a root seed.
///
/// SplitMix64 finalizer over a mixed key; stable across platforms.
pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    let mut z = root
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03).rotate_left(17);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Standard complex Gaussian entries with `E|z|² = 1`.
pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> CMatrix<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cplx(re * s, im * s)
    })
}

pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVector<T> {
    let m = gaussian_matrix::<T, R>(rng, len, 1);
    m.column(0).into_owned()
}

/// Haar-distributed unitary via QR of a Gaussian matrix with phase correction.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix<T> {
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let qr = gaussian_matrix::<T, R>(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let m = d.modulus();
        if m > T::zero() {
            let phase = d / real(m);
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}

fn to_faer<T: Real>(m: &CMatrix<T>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        c64::new(z.re.as_f64(), z.im.as_f64())
    })
}

fn from_faer<T: Real>(m: faer::MatRef<'_, c64>) -> CMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        Complex::new(T::lit(z.re), T::lit(z.im))
    })
}

/// Singular values in non-increasing order. Empty matrices have none.
pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m)
        .singular_values()
        .expect("svd converges")
        .into_iter()
        .map(T::lit)
        .collect()
}

/// Thin SVD `m = U Σ V†` with singular values sorted non-increasingly.
pub struct ThinSvd<T: Real> {
    pub u: CMatrix<T>,
    pub sigma: Vec<T>,
    pub v_t: CMatrix<T>,
}

pub fn thin_svd<T: Real>(m: &CMatrix<T>) -> ThinSvd<T> {
    let (r, c) = m.shape();
    if r.min(c) == 0 {
        return ThinSvd {
            u: DMatrix::zeros(r, 0),
            sigma: Vec::new(),
            v_t: DMatrix::zeros(0, c),
        };
    }
    let svd = to_faer(m).thin_svd().expect("svd converges");
    ThinSvd {
        u: from_faer(svd.U()),
        sigma: svd
            .S()
            .column_vector()
            .iter()
            .map(|s| T::lit(s.re))
            .collect(),
        v_t: from_faer::<T>(svd.V()).adjoint(),
    }
}

/// Operator 2-norm; zero for empty matrices.
pub fn spectral_norm<T: Real>(m: &CMatrix<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Diagonal inputs are decomposed directly without an iterative solver.
pub fn hermitian_eigen<T: Real>(h: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let n = h.nrows();
    let zero = Complex::new(T::zero(), T::zero());
    let is_diagonal = (0..n).all(|j| (0..n).all(|i| i == j || h[(i, j)] == zero));
    let (values, vectors): (Vec<T>, CMatrix<T>) = if is_diagonal {
        (
            (0..n).map(|i| h[(i, i)].re).collect(),
            DMatrix::identity(n, n),
        )
    } else {
        let eig = to_faer(h)
            .self_adjoint_eigen(Side::Lower)
            .expect("eigensolver converges");
        (
            eig.S()
                .column_vector()
                .iter()
                .map(|s| T::lit(s.re))
                .collect(),
            from_faer(eig.U()),
        )
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    (sorted_values, sorted_vectors)
}

/// Largest absolute entry, used for Hermiticity and Gram checks.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max((*z).modulus()))
}

pub fn is_hermitian<T: Real>(h: &CMatrix<T>, tol: T) -> bool {
    h.is_square() && max_abs(&(h - h.adjoint())) <= tol
}

/// Kronecker product with the left factor as the major index.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

/// Converts a complex matrix between precisions or copies an `f64` one.
pub fn convert_matrix<T: Real>(m: &DMatrix<Complex<f64>>) -> CMatrix<T> {
    m.map(|z| cplx(z.re, z.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = seeded_rng(3);
        let u: CMatrix<f64> = haar_unitary(&mut rng, 6);
        let err = max_abs(&(u.adjoint() * &u - CMatrix::<f64>::identity(6, 6)));
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(0, 1, 2);
        let b = derive_seed(0, 2, 1);
        let c = derive_seed(1, 1, 2);
        assert!(a != b && a != c && b != c);
        assert_eq!(a, derive_seed(0, 1, 2));
    }

    #[test]
    fn eigen_sorted_and_diagonal_shortcut() {
        let h = CMatrix::<f64>::from_diagonal(&DVector::from_vec(vec![
            real(3.0),
            real(-1.0),
            real(2.0),
        ]));
        let (vals, vecs) = hermitian_eigen(&h);
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
        assert_eq!(vecs[(1, 0)], real(1.0));
        let mut rng = seeded_rng(9);
        let g: CMatrix<f64> = gaussian_matrix(&mut rng, 5, 5);
        let h = &g + g.adjoint();
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = CMatrix::<f64>::from_diagonal(&DVector::from_iterator(
            5,
            vals.iter().map(|&x| real(x)),
        ));
        assert!(max_abs(&(&vecs * d * vecs.adjoint() - h)) < 1e-10);
    }

    #[test]
    fn thin_svd_reconstructs() {
        let mut rng = seeded_rng(1);
        let m: CMatrix<f64> = gaussian_matrix(&mut rng, 7, 3);
        let s = thin_svd(&m);
        let sig = CMatrix::<f64>::from_diagonal(&DVector::from_iterator(
            3,
            s.sigma.iter().map(|&x| real(x)),
        ));
        assert!(max_abs(&(&s.u * sig * &s.v_t - &m)) < 1e-12);
        assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
    }
}
