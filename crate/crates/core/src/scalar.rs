//! Scalar abstraction shared by every numerical module.
//!
//! All geometry is carried out over complex matrices whose real part is a
//! [`Real`]. Tolerances are attached to the scalar type so that `f32`
//! instantiations use thresholds appropriate to single precision.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::ToPrimitive;

/// Numerical thresholds used by the library.
///
/// Every threshold is relative to unit-norm bases unless stated otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    /// Maximum entry of `B†B − I` accepted for an orthonormal basis.
    pub ortho: T,
    /// Generic numerical slack for identities and inequalities.
    pub num: T,
    /// Overlap threshold above which one subspace is said to cover another.
    pub cover: T,
    /// Certificate threshold for commutation and dilation of an AGSP.
    pub agsp: T,
    /// Relative singular-value cutoff for spans of vectors.
    pub rank: T,
    /// Relative singular-value cutoff for operator-Schmidt ranks.
    pub rank_op: T,
    /// Schmidt weights below this are treated as zero in entropies.
    pub schmidt_floor: T,
}

/// Real scalar usable by the library: `f64` (the reference precision) or `f32`.
pub trait Real: RealField + Copy + ToPrimitive + Debug + Display {
    /// Default thresholds for this precision.
    fn tolerances() -> Tolerances<Self>;

    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Lossy conversion back to `f64`, for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn infinity() -> Self {
        Self::lit(f64::INFINITY)
    }
}

impl Real for f64 {
    fn tolerances() -> Tolerances<f64> {
        Tolerances {
            ortho: 1e-10,
            num: 1e-9,
            cover: 1e-8,
            agsp: 1e-8,
            rank: 1e-10,
            rank_op: 1e-10,
            schmidt_floor: 1e-14,
        }
    }
}

impl Real for f32 {
    fn tolerances() -> Tolerances<f32> {
        Tolerances {
            ortho: 1e-4,
            num: 1e-3,
            cover: 1e-3,
            agsp: 1e-3,
            rank: 1e-5,
            rank_op: 1e-5,
            schmidt_floor: 1e-7,
        }
    }
}

/// Shorthand for `T::tolerances()`.
#[inline]
pub fn tol<T: Real>() -> Tolerances<T> {
    T::tolerances()
}
