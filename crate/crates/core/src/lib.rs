//! Numerical laboratory for subspace geometry and approximate ground space
//! projectors (AGSPs).
//!
//! The crate covers overlaps and principal angles between subspaces, AGSP
//! validation and synthesis, sharp error reduction, operator-Schmidt ranks and
//! partial approximate projectors, Schmidt tail and dyadic entropy bounds,
//! random dimension reduction, the bootstrap loop, and the explicit
//! degenerate-case entanglement bound. Everything is dense and generic over
//! the real scalar ([`Real`]); the `*64` aliases fix `f64`.

pub mod agsp;
pub mod bipartite;
pub mod bootstrap;
pub mod error;
pub mod hamiltonians;
pub mod linalg;
pub mod scalar;
pub mod subspace;

pub use agsp::{
    apply_to_subspace, chebyshev_agsp, error_reduction_check, operator_schmidt, pap_apply,
    pap_from_agsp, synth_agsp, validate_agsp, Agsp, BipartiteAgsp, ErrorReduction, Pap,
};
pub use bipartite::{
    dyadic_entropy_bound, entanglement_entropy, left_compare, schmidt, tail_bound_check,
    Bipartition, EntropyPartition, SchmidtData, TailCheck,
};
pub use bootstrap::{
    bootstrap_run, dimension_constant, epsilon_m, explicit_bound, frustrated_run, haar_subspace,
    max_entropy_estimate, randlem_params, reduce_dimension, reduced_dimension, BootstrapError,
    BootstrapParams, BootstrapTrace, BoundBreakdown, BoundParams, DeltaSequence, DimensionRule,
    EntropyEstimate, FrustratedParams, FrustratedReport, Target,
};
pub use error::{Error, Result};
pub use hamiltonians::{
    ground_space, ising_chain, random_degenerate_target, ModelSpec, ToyHamiltonian,
};
pub use linalg::{CMatrix, CVector};
pub use scalar::{Real, Tolerances};
pub use subspace::{
    compare, delta_close, lifting_operator, orthonormalize, overlap_symmetry_check,
    projected_image, rotate_subspace, transition_map, LiftingOperator, OverlapReport, Subspace,
    SymmetryCheck, TransitionMap,
};

pub type Subspace64 = Subspace<f64>;
pub type Subspace32 = Subspace<f32>;
pub type OverlapReport64 = OverlapReport<f64>;
pub type Agsp64 = Agsp<f64>;
pub type BipartiteAgsp64 = BipartiteAgsp<f64>;
pub type Pap64 = Pap<f64>;
pub type CMatrix64 = CMatrix<f64>;
pub type CVector64 = CVector<f64>;
pub type BootstrapTrace64 = BootstrapTrace<f64>;
pub type ToyHamiltonian64 = ToyHamiltonian<f64>;
