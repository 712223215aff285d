#[allow(unused_imports)]
use num_traits::Float;

use super::DensityMatrix;

/// Coherence of a qubit state in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coherence {
    /// Sum of absolute off-diagonal entries.
    pub l1: f64,
    /// `S(Δ(ρ)) − S(ρ)` in bits, `Δ` the dephasing map.
    pub relative_entropy: f64,
}

fn entropy_bits(eigenvalues: [f64; 2]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&x| x > 1e-15)
        .map(|&x| -x * x.log2())
        .sum()
}

pub fn coherence_measures(rho: &DensityMatrix) -> Coherence {
    let m = &rho.matrix().0;
    let l1 = m[0][1].norm() + m[1][0].norm();
    let diag = [m[0][0].re, m[1][1].re];
    let relative_entropy = (entropy_bits(diag) - entropy_bits(rho.matrix().eigenvalues())).max(0.0);
    Coherence {
        l1,
        relative_entropy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{bb84_ensemble, ensemble_average, EmbeddingParams, PureState};
    use proptest::prelude::*;

    #[test]
    fn incoherent_and_maximally_coherent() {
        let c = coherence_measures(&PureState::zero().density());
        assert_eq!((c.l1, c.relative_entropy), (0.0, 0.0));
        let c = coherence_measures(&PureState::plus().density());
        assert!((c.l1 - 1.0).abs() < 1e-15);
        assert!((c.relative_entropy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embedded_average_state() {
        let avg = ensemble_average(&bb84_ensemble(EmbeddingParams::new(0.6, 1.0).unwrap()));
        assert!((coherence_measures(&avg).l1 - 0.3).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn l1_tracks_half_the_rate(rate in 0.0..=1.0f64) {
            let avg = ensemble_average(&bb84_ensemble(EmbeddingParams::new(rate, 1.0).unwrap()));
            let c = coherence_measures(&avg);
            prop_assert!((c.l1 - rate / 2.0).abs() < 1e-12);
            prop_assert!(c.relative_entropy >= 0.0);
        }
    }
}
