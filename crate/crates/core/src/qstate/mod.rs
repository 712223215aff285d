//! Qubit states, ensembles, POVMs and minimum-error discrimination.

mod coherence;
mod discrimination;
mod matrix;
mod states;

pub use coherence::{coherence_measures, Coherence};
pub use discrimination::{
    mdep_bruteforce, mdep_helstrom, mdep_solve, success_probability, MdepSolution,
};
pub use matrix::{Eigh, Mat2};
pub use states::{
    bb84_ensemble, classical_bit_distribution, ensemble_average, Basis, Bb84Label, DensityMatrix,
    EmbeddingParams, Ensemble, Povm, PureState,
};

/// Tolerance for Hermiticity, trace and normalization checks.
pub const STATE_TOL: f64 = 1e-12;
/// Tolerance for POVM positivity and completeness.
pub const POVM_TOL: f64 = 1e-10;
