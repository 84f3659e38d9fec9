//! Bipartite utilities: Schmidt decomposition, entanglement entropy, left
//! overlaps, the Schmidt tail check and the dyadic entropy bound.
//!
//! A vector of `H_L ⊗ H_R` is indexed as `l · dR + r`.

use nalgebra::DMatrix;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{thin_svd, CMatrix, CVector};
use crate::scalar::{tol, Real};
use crate::subspace::{OverlapReport, Subspace};

/// Dimensions `(dL, dR)` of a bipartition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    pub left: usize,
    pub right: usize,
}

impl Bipartition {
    pub const fn new(left: usize, right: usize) -> Self {
        Self { left, right }
    }

    pub const fn total(&self) -> usize {
        self.left * self.right
    }

    /// Splits `ambient` with the given left dimension.
    pub fn with_left(ambient: usize, left: usize) -> Result<Self> {
        if left == 0 || !ambient.is_multiple_of(left) {
            return Err(Error::DimensionMismatch {
                context: "bipartition",
                expected: left,
                found: ambient,
            });
        }
        Ok(Self::new(left, ambient / left))
    }

    /// A chain of `n` sites of dimension `d`, cut after `left_sites`.
    pub fn chain(n: usize, d: usize, left_sites: usize) -> Self {
        Self::new(d.pow(left_sites as u32), d.pow((n - left_sites) as u32))
    }
}

/// `(dL × dR)` coefficient matrix of a bipartite vector.
pub fn as_matrix<T: Real>(psi: &CVector<T>, dims: Bipartition) -> CMatrix<T> {
    DMatrix::from_fn(dims.left, dims.right, |l, r| psi[l * dims.right + r])
}

pub fn from_matrix<T: Real>(m: &CMatrix<T>) -> CVector<T> {
    let (dl, dr) = m.shape();
    CVector::<T>::from_iterator(dl * dr, (0..dl * dr).map(|i| m[(i / dr, i % dr)]))
}

/// Schmidt decomposition `ψ = Σ √λ_i |x_i⟩|y_i⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtData<T: Real> {
    /// Squared coefficients, non-increasing.
    pub lambdas: Vec<T>,
    pub left_vectors: Vec<CVector<T>>,
    pub right_vectors: Vec<CVector<T>>,
}

impl<T: Real> SchmidtData<T> {
    /// `Σ_{i ≥ keep} λ_i`: the weight outside the leading `keep` terms.
    pub fn tail(&self, keep: usize) -> T {
        self.lambdas
            .iter()
            .skip(keep)
            .fold(T::zero(), |a, &b| a + b)
    }

    pub fn entropy(&self) -> T {
        let floor = tol::<T>().schmidt_floor;
        shannon_entropy(
            self.lambdas
                .iter()
                .map(|&l| if l < floor { T::zero() } else { l }),
        )
    }

    pub fn reconstruct(&self) -> CVector<T> {
        let dl = self.left_vectors.first().map_or(0, |v| v.len());
        let dr = self.right_vectors.first().map_or(0, |v| v.len());
        let mut m = CMatrix::<T>::zeros(dl, dr);
        for ((lam, x), y) in self
            .lambdas
            .iter()
            .zip(&self.left_vectors)
            .zip(&self.right_vectors)
        {
            m += x * y.transpose() * crate::linalg::real(lam.sqrt());
        }
        from_matrix(&m)
    }
}

fn check_unit<T: Real>(psi: &CVector<T>) -> Result<()> {
    let norm = psi.norm();
    if (norm - T::one()).abs() > tol::<T>().num {
        return Err(Error::Normalization {
            norm: norm.as_f64(),
        });
    }
    Ok(())
}

pub fn schmidt<T: Real>(psi: &CVector<T>, dims: Bipartition) -> Result<SchmidtData<T>> {
    check_dim("schmidt", dims.total(), psi.len())?;
    check_unit(psi)?;
    let svd = thin_svd(&as_matrix(psi, dims));
    Ok(SchmidtData {
        lambdas: svd.sigma.iter().map(|&s| s * s).collect(),
        left_vectors: svd.u.column_iter().map(|c| c.into_owned()).collect(),
        right_vectors: svd.v_t.row_iter().map(|r| r.transpose()).collect(),
    })
}

/// `h(x) = x log₂(1/x)` with `h(0) = 0`.
pub fn entropy_term<T: Real>(x: T) -> T {
    if x <= T::lit(1e-300) {
        T::zero()
    } else {
        -x * x.log2()
    }
}

/// Shannon entropy in bits of a (sub-)probability sequence.
pub fn shannon_entropy<T: Real, I: IntoIterator<Item = T>>(weights: I) -> T {
    weights
        .into_iter()
        .fold(T::zero(), |acc, x| acc + entropy_term(x))
}

/// Entanglement entropy of `ψ` across the cut, in bits.
pub fn entanglement_entropy<T: Real>(psi: &CVector<T>, dims: Bipartition) -> Result<T> {
    Ok(schmidt(psi, dims)?.entropy())
}

/// Overlap of `V ⊗ H_R` onto `Z`, computed without forming `V ⊗ H_R`.
pub fn left_compare<T: Real>(v: &Subspace<T>, z: &Subspace<T>) -> Result<OverlapReport<T>> {
    let dims = Bipartition::with_left(z.ambient_dim(), v.ambient_dim())?;
    if z.dim() == 0 {
        return Err(Error::UndefinedOverlap);
    }
    let (dv, dr) = (v.dim(), dims.right);
    let mut t = CMatrix::<T>::zeros(dv * dr, z.dim());
    let mut residual = CMatrix::<T>::zeros(dims.total(), z.dim());
    for j in 0..z.dim() {
        let m = as_matrix(&z.vector(j), dims);
        let coords = v.basis().adjoint() * &m;
        let rest = &m - v.basis() * &coords;
        for a in 0..dv {
            for r in 0..dr {
                t[(a * dr + r, j)] = coords[(a, r)];
            }
        }
        residual.set_column(j, &from_matrix(&rest));
    }
    Ok(OverlapReport::from_maps(&t, &residual))
}

/// Outcome of the Schmidt tail check for one state.
#[derive(Clone, Debug, PartialEq)]
pub struct TailCheck<T: Real> {
    /// `Σ_{i > dim V} λ_i`.
    pub tail: T,
    /// `√δ` with `δ` the left viability error of `V` onto `Z`.
    pub bound: T,
    pub delta: T,
    pub holds: bool,
}

pub fn tail_bound_check<T: Real>(
    z: &Subspace<T>,
    v: &Subspace<T>,
    psi: &CVector<T>,
) -> Result<TailCheck<T>> {
    check_dim("tail_bound_check", z.ambient_dim(), psi.len())?;
    let dims = Bipartition::with_left(z.ambient_dim(), v.ambient_dim())?;
    let distance = z.distance(psi);
    if distance > tol::<T>().num {
        return Err(Error::Membership {
            distance: distance.as_f64(),
        });
    }
    let report = left_compare(v, z)?;
    if report.delta >= T::one() {
        return Err(Error::NoCover {
            mu: report.mu.as_f64(),
        });
    }
    let tail = schmidt(psi, dims)?.tail(v.dim());
    let bound = report.delta.sqrt();
    Ok(TailCheck {
        tail,
        bound,
        delta: report.delta,
        holds: tail <= bound + tol::<T>().num,
    })
}

/// Consecutive index blocks `I_0, I_1, …` with mass bounds for `n ≥ 1`.
///
/// `gammas[n - 1]` bounds the total weight of block `n`; block `0` carries no
/// mass bound of its own. Every block, `I_0` included, needs at least three
/// indices: with `|I_0| = 1` and `λ_1 = 1/2` the head term `log₂|I_0| = 0`
/// is already below `h(1/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyPartition<T: Real> {
    block_sizes: Vec<usize>,
    gammas: Vec<T>,
}

impl<T: Real> EntropyPartition<T> {
    pub fn new(block_sizes: Vec<usize>, gammas: Vec<T>) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::Parameter("partition has no blocks".into()));
        }
        if gammas.len() + 1 != block_sizes.len() {
            return Err(Error::Parameter(format!(
                "expected {} mass bounds, got {}",
                block_sizes.len() - 1,
                gammas.len()
            )));
        }
        if let Some((n, &s)) = block_sizes.iter().enumerate().find(|(_, &s)| s < 3) {
            return Err(Error::Precondition(format!("block {n} has size {s} < 3")));
        }
        if let Some(g) = gammas.iter().find(|&&g| !(g >= T::zero() && g <= T::one())) {
            return Err(Error::Parameter(format!("mass bound {g} outside [0, 1]")));
        }
        Ok(Self {
            block_sizes,
            gammas,
        })
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn gammas(&self) -> &[T] {
        &self.gammas
    }

    /// Total number of indices covered.
    pub fn len(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether every block `n ≥ 1` of `lambdas` has weight at most `γ_n`.
    /// Entries past the partition must be zero.
    pub fn admits(&self, lambdas: &[T]) -> bool {
        let mut start = self.block_sizes[0];
        for (size, &g) in self.block_sizes.iter().skip(1).zip(&self.gammas) {
            let end = (start + size).min(lambdas.len());
            let mass = lambdas[start.min(end)..end]
                .iter()
                .fold(T::zero(), |a, &b| a + b);
            if mass > g {
                return false;
            }
            start += size;
        }
        lambdas.iter().skip(self.len()).all(|&l| l == T::zero())
    }
}

/// `log₂|I_0| + Σ_{n≥1} (γ_n log₂|I_n| + h(γ_n))`.
pub fn dyadic_entropy_bound<T: Real>(p: &EntropyPartition<T>) -> T {
    let head = T::lit(p.block_sizes[0] as f64).log2();
    p.block_sizes
        .iter()
        .skip(1)
        .zip(&p.gammas)
        .fold(head, |acc, (&size, &g)| {
            acc + g * T::lit(size as f64).log2() + entropy_term(g)
        })
}
