use alloc::vec::Vec;

use super::{Eavesdropper, EveObservation, EveStrategy};
use crate::qstate::{bb84_ensemble, mdep_solve, EmbeddingParams};
use crate::stats::chi_squared_gof;
use crate::{Error, Result};

/// Expected count per cell required under the uniform null.
const MIN_EXPECTED_PER_CELL: u64 = 10;

/// Outcome of one steganalysis test.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectionReport {
    /// Eve's outcome histogram over `|0⟩, |1⟩, |+⟩, |−⟩`.
    pub state_counts: [u64; 4],
    /// Outcomes grouped by the classical bit they encode.
    pub bit_counts: [u64; 2],
    pub chi2_statistic: f64,
    pub p_value: f64,
    /// `(n₀ − n₁)/(n₀ + n₁)` over Eve's outcome bits.
    pub raw_rate: f64,
    /// Rate estimate corrected for Eve's measurement confusion, in `[−1, 1]`.
    pub estimated_rate: f64,
    pub verdict: bool,
    pub significance: f64,
    pub induced_qber: Option<f64>,
    pub samples: u64,
    pub strategy: EveStrategy,
}

/// Moment inversion of the bit distribution `((1+E)/2, (1−E)/2)`.
pub fn estimate_embedding_rate(n0: u64, n1: u64) -> Result<f64> {
    let total = n0 + n1;
    if total == 0 {
        return Err(Error::InsufficientSamples { total: 0, required: 1 });
    }
    Ok((n0 as f64 - n1 as f64) / total as f64)
}

/// Pearson test of `counts` against the uniform distribution over its cells.
pub fn chi_squared_uniform(counts: &[u64]) -> Result<(f64, f64)> {
    let total: u64 = counts.iter().sum();
    let required = MIN_EXPECTED_PER_CELL * counts.len() as u64;
    if total < required {
        return Err(Error::InsufficientSamples { total, required });
    }
    let uniform: Vec<f64> = counts.iter().map(|_| 1.0 / counts.len() as f64).collect();
    chi_squared_gof(counts, &uniform)
}

/// Tests Eve's outcome histogram against the uniform distribution expected
/// from honest BB84 traffic.
pub fn steganalyze(observations: &[EveObservation], eve: &Eavesdropper, significance: f64) -> Result<DetectionReport> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::param("significance", "must lie in (0, 1)"));
    }
    let mut state_counts = [0u64; 4];
    for o in observations {
        state_counts[o.outcome] += 1;
    }
    let (chi2_statistic, p_value) = chi_squared_uniform(&state_counts)?;
    let bit_counts = [state_counts[0] + state_counts[2], state_counts[1] + state_counts[3]];
    let raw_rate = estimate_embedding_rate(bit_counts[0], bit_counts[1])?;

    // Outcome-bit moment as an affine function of E (bias 1), from the
    // confusion table: r(E) = r(0) + E·(r(1) − r(0)).
    let confusion = eve.confusion();
    let moment = |rate: f64| {
        let priors = EmbeddingParams { rate, bias: 1.0 }.bb84_priors();
        let q0: f64 = (0..4).map(|i| priors[i] * (confusion[i][0] + confusion[i][2])).sum();
        2.0 * q0 - 1.0
    };
    let (r0, r1) = (moment(0.0), moment(1.0));
    let estimated_rate = if (r1 - r0).abs() > 1e-9 {
        ((raw_rate - r0) / (r1 - r0)).clamp(-1.0, 1.0)
    } else {
        raw_rate
    };

    Ok(DetectionReport {
        state_counts,
        bit_counts,
        chi2_statistic,
        p_value,
        raw_rate,
        estimated_rate,
        verdict: p_value < significance,
        significance,
        induced_qber: None,
        samples: observations.len() as u64,
        strategy: *eve.strategy(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MdepPoint {
    pub rate: f64,
    pub mdep: f64,
    pub converged: bool,
}

/// Minimum discrimination error of the embedded BB84 ensemble along `rates`.
pub fn mdep_curve(rates: &[f64], bias: f64, tolerance: f64, max_iterations: usize) -> Result<Vec<MdepPoint>> {
    rates
        .iter()
        .map(|&rate| {
            let params = EmbeddingParams::new(rate, bias)?;
            let s = mdep_solve(&bb84_ensemble(params), tolerance, max_iterations)?;
            Ok(MdepPoint {
                rate,
                mdep: s.error,
                converged: s.converged,
            })
        })
        .collect()
}
