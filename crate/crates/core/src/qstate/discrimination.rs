//! Minimum-error discrimination of qubit ensembles.
//!
//! Three independent routes to the optimal error probability:
//! the two-state closed form ([`mdep_helstrom`]), a damped fixed-point
//! iteration on the Lagrange operator that also yields the measurement
//! ([`mdep_solve`]), and a grid search over the dual problem
//! ([`mdep_bruteforce`]) used as a reference oracle.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{DensityMatrix, Ensemble, Mat2, Povm};
use crate::{Error, Result};

const DAMPING: f64 = 0.5;

/// Result of [`mdep_solve`].
#[derive(Debug, Clone)]
pub struct MdepSolution {
    pub povm: Povm,
    pub success: f64,
    pub error: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// `Σᵢ pᵢ Tr(Mᵢ ρᵢ)` for effects paired index-by-index with the ensemble.
pub fn success_probability(ensemble: &Ensemble, effects: &[Mat2]) -> f64 {
    ensemble
        .states()
        .iter()
        .zip(ensemble.priors())
        .zip(effects)
        .map(|((rho, p), m)| p * (*m * *rho.matrix()).trace().re)
        .sum()
}

/// Two-state minimum error probability, `½(1 − ‖p₀ρ₀ − p₁ρ₁‖₁)`.
pub fn mdep_helstrom(
    state0: &DensityMatrix,
    p0: f64,
    state1: &DensityMatrix,
    p1: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p0) || !(0.0..=1.0).contains(&p1) || (p0 + p1 - 1.0).abs() > 1e-12 {
        return Err(Error::param("priors", "two-state priors must be probabilities summing to 1"));
    }
    let gamma = state0.matrix().scale(p0) - state1.matrix().scale(p1);
    Ok((0.5 * (1.0 - gamma.trace_norm())).max(0.0))
}

/// Optimal measurement by damped fixed-point iteration.
///
/// Each step forms `R² = Σᵢ ρ′ᵢ Mᵢ ρ′ᵢ` with `ρ′ᵢ = pᵢρᵢ` and maps
/// `Mᵢ ↦ R⁻¹ ρ′ᵢ Mᵢ ρ′ᵢ R⁻¹`, which keeps every effect PSD and the set
/// complete; the new iterate is the even mix of old and mapped effects.
/// Fixed points satisfy the stationarity conditions of the Lagrange operator
/// `Γ = Σᵢ ρ′ᵢ Mᵢ`. Iteration stops when the success probability moves by
/// less than `tolerance` between steps.
///
/// On hitting `max_iterations` the last iterate is returned with
/// `converged = false`.
pub fn mdep_solve(ensemble: &Ensemble, tolerance: f64, max_iterations: usize) -> Result<MdepSolution> {
    if !(tolerance > 0.0) {
        return Err(Error::param("tolerance", "must be positive"));
    }
    let n = ensemble.len();
    let weighted: Vec<Mat2> = ensemble
        .states()
        .iter()
        .zip(ensemble.priors())
        .map(|(rho, p)| rho.matrix().scale(*p))
        .collect();

    let mut effects = vec![Mat2::IDENTITY.scale(1.0 / n as f64); n];
    let mut success = success_probability(ensemble, &effects);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iterations {
        iterations += 1;
        let sandwiched: Vec<Mat2> = weighted
            .iter()
            .zip(&effects)
            .map(|(w, m)| (*w * *m * *w).hermitian_part())
            .collect();
        let r2: Mat2 = sandwiched.iter().copied().sum();
        let scale = r2.trace().re.abs().max(f64::MIN_POSITIVE);
        let r_inv = r2.map_spectrum(|x| if x > 1e-14 * scale { 1.0 / x.sqrt() } else { 0.0 });

        let mut mapped: Vec<Mat2> = sandwiched
            .iter()
            .map(|s| (r_inv * *s * r_inv).hermitian_part())
            .collect();
        // R² can be rank deficient; hand the uncovered subspace out evenly.
        let covered: Mat2 = mapped.iter().copied().sum();
        let deficit = (Mat2::IDENTITY - covered).scale(1.0 / n as f64);
        for m in &mut mapped {
            *m += deficit;
        }

        for (m, next) in effects.iter_mut().zip(&mapped) {
            *m = (m.scale(1.0 - DAMPING) + next.scale(DAMPING)).hermitian_part();
        }
        let next_success = success_probability(ensemble, &effects);
        let delta = (next_success - success).abs();
        success = next_success;
        if delta < tolerance {
            converged = true;
            break;
        }
    }

    let povm = Povm::new(effects)?;
    let success = success.clamp(0.0, 1.0);
    Ok(MdepSolution {
        povm,
        success,
        error: 1.0 - success,
        converged,
        iterations,
    })
}

/// Reference minimum error probability by grid search.
///
/// Searches the dual of the success maximization: for a Hermitian bound
/// `Y = y₀I + y·σ` dominating every `pᵢρᵢ`, the optimal trace reduces to
/// `min_z maxᵢ (pᵢ + |pᵢrᵢ − z|)` over `z ∈ ℝ³`, with `rᵢ` the Bloch vectors.
/// That objective is convex, so a `resolution³` grid over the unit cube
/// refined around the incumbent converges to it. Every grid value bounds the
/// optimal success from above, so the returned error never exceeds the true
/// optimum and falls short of it only by the residual grid error.
pub fn mdep_bruteforce(ensemble: &Ensemble, resolution: usize) -> Result<f64> {
    if resolution < 8 {
        return Err(Error::param("resolution", "must be at least 8"));
    }
    let points: Vec<(f64, [f64; 3])> = ensemble
        .states()
        .iter()
        .zip(ensemble.priors())
        .map(|(rho, p)| {
            let r = rho.bloch();
            (*p, [p * r[0], p * r[1], p * r[2]])
        })
        .collect();
    let objective = |z: [f64; 3]| -> f64 {
        points
            .iter()
            .map(|(p, v)| {
                let d = [v[0] - z[0], v[1] - z[1], v[2] - z[2]];
                p + (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let mut center = [0.0; 3];
    let mut half = 1.0;
    let mut best = objective(center);
    let step = |half: f64| 2.0 * half / (resolution - 1) as f64;
    for _ in 0..60 {
        let h = step(half);
        let origin = center;
        for i in 0..resolution {
            for j in 0..resolution {
                for k in 0..resolution {
                    let z = [
                        origin[0] - half + i as f64 * h,
                        origin[1] - half + j as f64 * h,
                        origin[2] - half + k as f64 * h,
                    ];
                    let v = objective(z);
                    if v < best {
                        best = v;
                        center = z;
                    }
                }
            }
        }
        half = 2.0 * h;
        if half < 1e-13 {
            break;
        }
    }
    Ok((1.0 - best).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{bb84_ensemble, EmbeddingParams, PureState};

    // (1 − 1/√2)/2
    const ZERO_PLUS_MDEP: f64 = 0.146_446_609_406_726_24;

    fn pair(a: PureState, pa: f64, b: PureState, pb: f64) -> Ensemble {
        Ensemble::from_pure(&[a, b], vec![pa, pb]).unwrap()
    }

    #[test]
    fn helstrom_examples() {
        let (z, o, p) = (
            PureState::zero().density(),
            PureState::one().density(),
            PureState::plus().density(),
        );
        assert!(mdep_helstrom(&z, 0.5, &o, 0.5).unwrap().abs() < 1e-15);
        assert!((mdep_helstrom(&z, 0.5, &p, 0.5).unwrap() - ZERO_PLUS_MDEP).abs() < 1e-15);
        assert!(mdep_helstrom(&z, 1.0, &p, 0.0).unwrap().abs() < 1e-15);
        assert!(mdep_helstrom(&z, 0.7, &p, 0.7).is_err());
    }

    #[test]
    fn solver_examples() {
        let s = mdep_solve(&pair(PureState::zero(), 0.5, PureState::one(), 0.5), 1e-13, 100_000).unwrap();
        assert!(s.converged);
        assert!(s.error.abs() < 1e-6, "{}", s.error);

        let e0 = bb84_ensemble(EmbeddingParams::new(0.0, 1.0).unwrap());
        let s = mdep_solve(&e0, 1e-13, 100_000).unwrap();
        assert!((s.error - 0.5).abs() < 1e-6, "{}", s.error);

        let e1 = bb84_ensemble(EmbeddingParams::new(1.0, 1.0).unwrap());
        let s = mdep_solve(&e1, 1e-13, 100_000).unwrap();
        assert!((s.error - ZERO_PLUS_MDEP).abs() < 1e-6, "{}", s.error);
        assert_eq!(s.success + s.error, 1.0);
    }

    #[test]
    fn solver_reports_non_convergence() {
        let e = bb84_ensemble(EmbeddingParams::new(0.5, 1.0).unwrap());
        let s = mdep_solve(&e, 1e-15, 2).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iterations, 2);
        assert!(mdep_solve(&e, 0.0, 10).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        let v = mdep_bruteforce(&pair(PureState::zero(), 0.5, PureState::one(), 0.5), 16).unwrap();
        assert!(v.abs() < 1e-3);
        let v = mdep_bruteforce(&pair(PureState::zero(), 0.5, PureState::plus(), 0.5), 16).unwrap();
        assert!((v - 0.1464).abs() < 1e-3);
        let e = bb84_ensemble(EmbeddingParams::new(0.5, 1.0).unwrap());
        let solved = mdep_solve(&e, 1e-13, 100_000).unwrap().error;
        assert!((mdep_bruteforce(&e, 16).unwrap() - solved).abs() < 1e-3);
        assert!(mdep_bruteforce(&e, 4).is_err());
    }
}
