//! Single-mode bosonic states in a truncated number basis.
//!
//! Quadratures follow `x̂ = (â + â†)/2`, `p̂ = (â − â†)/(2i)`, so the vacuum
//! variance is [`VACUUM_VARIANCE`] and a coherent state `|β⟩` is a Gaussian
//! centred at `Re β` in position and `Im β` in momentum.

mod fock;
mod postselect;
mod quadrature;

pub use fock::{auto_cutoff, coherent_fock, pascs_fock, pascs_normalization, Amplitude, FockVector, StateKind};
pub use postselect::{postselect_b92, postselect_e4, PostSelectOutcome, PostSelectStatus};
pub use quadrature::{
    quadrature_moments, quadrature_pdf, sample_quadrature, QuadratureSampler, QuadratureSetting,
    PDF_TABLE_POINTS, PDF_TABLE_SPAN,
};

/// Quadrature variance of the vacuum under the convention above.
pub const VACUUM_VARIANCE: f64 = 0.25;
