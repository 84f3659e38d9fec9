//! Toy Hamiltonians with degenerate ground spaces, and exact diagonalization.

use crate::error::{Error, Result};
use crate::linalg::{gaussian_matrix, hermitian_eigen, is_hermitian, real, seeded_rng, CMatrix};
use crate::scalar::{tol, Real};
use crate::subspace::Subspace;

/// Largest supported ising chain (qubits).
pub const N_MAX: usize = 12;

/// Relative clustering threshold for degenerate eigenvalues.
pub const TOL_CLUSTER: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelInfo {
    pub name: String,
    /// Number of sites, when the model is a chain.
    pub sites: Option<usize>,
    pub local_dim: usize,
}

#[derive(Clone, Debug)]
pub struct ToyHamiltonian<T: Real> {
    pub matrix: CMatrix<T>,
    pub ground_space: Subspace<T>,
    pub ground_energy: T,
    pub gap: T,
    pub info: ModelInfo,
}

impl<T: Real> ToyHamiltonian<T> {
    pub fn degeneracy(&self) -> usize {
        self.ground_space.dim()
    }

    /// Rayleigh quotients on the ground basis are within `tol_num` of the
    /// ground energy, the ground basis is orthonormal and the gap is positive.
    pub fn check_invariants(&self) -> Result<()> {
        let t = tol::<T>();
        if !is_hermitian(&self.matrix, t.num) {
            return Err(Error::Precondition("matrix is not hermitian".into()));
        }
        if self.gap.as_f64().is_nan() || self.gap <= T::zero() {
            return Err(Error::DegenerateGap {
                gap: self.gap.as_f64(),
            });
        }
        if self.ground_space.orthogonality_defect() > t.ortho {
            return Err(Error::Precondition(
                "ground basis is not orthonormal".into(),
            ));
        }
        let hz = &self.matrix * self.ground_space.basis();
        for j in 0..self.ground_space.dim() {
            let v = self.ground_space.vector(j);
            let q = v.dotc(&hz.column(j)).re;
            if (q - self.ground_energy).abs() > t.num {
                return Err(Error::Precondition(format!(
                    "ground vector {j} has energy {q}, expected {}",
                    self.ground_energy
                )));
            }
        }
        Ok(())
    }
}

/// Number of domain walls in the bit string `s` of an `n`-site chain.
fn domain_walls(s: usize, n: usize) -> usize {
    ((s ^ (s >> 1)) & ((1 << (n - 1)) - 1)).count_ones() as usize
}

/// `H = Σ_i (1 − Z_i Z_{i+1}) / 2` on `n` qubits, site 0 most significant.
pub fn ising_chain<T: Real>(n: usize) -> Result<ToyHamiltonian<T>> {
    if !(2..=N_MAX).contains(&n) {
        return Err(Error::Parameter(format!(
            "chain length {n} outside 2..={N_MAX}"
        )));
    }
    let dim = 1usize << n;
    let mut matrix = CMatrix::<T>::zeros(dim, dim);
    for s in 0..dim {
        matrix[(s, s)] = real(T::lit(domain_walls(s, n) as f64));
    }
    Ok(ToyHamiltonian {
        matrix,
        ground_space: Subspace::coordinate(dim, &[0, dim - 1])?,
        ground_energy: T::zero(),
        gap: T::one(),
        info: ModelInfo {
            name: "ising".into(),
            sites: Some(n),
            local_dim: 2,
        },
    })
}

/// The bond term `(1 − Z_i Z_{i+1}) / 2` as a diagonal, for `0 ≤ i < n − 1`.
pub fn ising_local_term<T: Real>(n: usize, i: usize) -> CMatrix<T> {
    let dim = 1usize << n;
    let mut m = CMatrix::<T>::zeros(dim, dim);
    for s in 0..dim {
        let a = (s >> (n - 1 - i)) & 1;
        let b = (s >> (n - 2 - i)) & 1;
        if a != b {
            m[(s, s)] = real(T::one());
        }
    }
    m
}

/// `H = I − P_Z` for a Haar-random `D`-dimensional `Z` in `dL · dR` dimensions.
pub fn random_degenerate_target<T: Real>(
    dl: usize,
    dr: usize,
    d: usize,
    rng_seed: u64,
) -> Result<ToyHamiltonian<T>> {
    let n = dl * dr;
    if d == 0 || d >= n {
        return Err(Error::Parameter(format!(
            "degeneracy {d} must lie in 1..{n}"
        )));
    }
    let g = gaussian_matrix::<T, _>(&mut seeded_rng(rng_seed), n, d);
    let z = Subspace::from_columns(&g, T::zero());
    if z.dim() != d {
        return Err(Error::Precondition(
            "sampled basis is rank deficient".into(),
        ));
    }
    let matrix = CMatrix::<T>::identity(n, n) - z.projector();
    Ok(ToyHamiltonian {
        matrix,
        ground_space: z,
        ground_energy: T::zero(),
        gap: T::one(),
        info: ModelInfo {
            name: "random-target".into(),
            sites: None,
            local_dim: dl,
        },
    })
}

/// Lowest eigenspace and gap, clustering at `TOL_CLUSTER` times the range.
pub fn ground_space<T: Real>(h: &CMatrix<T>, hint: Option<usize>) -> Result<(Subspace<T>, T)> {
    ground_space_with_threshold(h, hint, T::lit(TOL_CLUSTER))
}

/// As [`ground_space`] with an explicit relative threshold.
///
/// Eigenvalues within `rel * range` of the minimum form the cluster. An
/// eigenvalue farther than the numerical noise floor but closer than the
/// threshold is ambiguous and is reported unless `hint` fixes the dimension.
pub fn ground_space_with_threshold<T: Real>(
    h: &CMatrix<T>,
    hint: Option<usize>,
    rel: T,
) -> Result<(Subspace<T>, T)> {
    let n = h.nrows();
    if n == 0 || h.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "ground_space",
            expected: n,
            found: h.ncols(),
        });
    }
    if !is_hermitian(h, tol::<T>().num) {
        return Err(Error::Precondition("matrix is not hermitian".into()));
    }
    let (vals, vecs) = hermitian_eigen(h);
    let range = (vals[n - 1] - vals[0]).max(T::default_epsilon());
    let d = match hint {
        Some(d) if d == 0 || d > n => {
            return Err(Error::Parameter(format!("hint {d} outside 1..={n}")))
        }
        Some(d) => d,
        None => {
            let noise = T::lit(64.0) * T::default_epsilon() * range.max(vals[0].abs());
            let threshold = rel * range;
            let e0 = vals[0];
            let d = vals.iter().take_while(|&&v| v - e0 <= noise).count();
            let near: Vec<f64> = vals
                .iter()
                .skip(d)
                .take_while(|&&v| v - e0 <= threshold)
                .map(|v| v.as_f64())
                .collect();
            if !near.is_empty() {
                let mut edge: Vec<f64> = vals[..d].iter().map(|v| v.as_f64()).collect();
                edge.extend(near);
                if let Some(&next) = vals.get(edge.len()) {
                    edge.push(next.as_f64());
                }
                return Err(Error::AmbiguousClustering { near_edge: edge });
            }
            d
        }
    };
    let gap = if d < n {
        vals[d] - vals[d - 1]
    } else {
        T::infinity()
    };
    let basis = vecs.columns(0, d).into_owned();
    Ok((Subspace::from_orthonormal(basis)?, gap))
}

/// Named model plus parameters, as referenced from experiment configs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    Ising {
        sites: usize,
    },
    RandomTarget {
        left: usize,
        right: usize,
        degeneracy: usize,
        seed: u64,
    },
}

impl ModelSpec {
    pub const NAMES: [&'static str; 2] = ["ising", "random-target"];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ising { .. } => "ising",
            Self::RandomTarget { .. } => "random-target",
        }
    }

    pub fn build<T: Real>(&self) -> Result<ToyHamiltonian<T>> {
        match *self {
            Self::Ising { sites } => ising_chain(sites),
            Self::RandomTarget {
                left,
                right,
                degeneracy,
                seed,
            } => random_degenerate_target(left, right, degeneracy, seed),
        }
    }
}
