use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Truncated norm a coherent expansion must retain.
const NORM_FLOOR: f64 = 1.0 - 1e-10;
/// Largest admissible weight on the top number state.
const TAIL_LIMIT: f64 = 1e-10;

/// Complex field amplitude `α`; `μ = |α|²` is the mean photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Amplitude(C64);

impl Amplitude {
    pub fn new(value: C64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::param("alpha", format!("{value} is not finite")));
        }
        Ok(Amplitude(value))
    }

    pub fn real(re: f64) -> Result<Self> {
        Amplitude::new(C64::new(re, 0.0))
    }

    pub fn value(&self) -> C64 {
        self.0
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.0.norm_sqr()
    }
}

/// How a [`FockVector`] was built; lets samplers use exact distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    Coherent(Amplitude),
    Pascs(Amplitude),
    Generic,
}

/// Number-basis amplitudes `c₀ … c_cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coefficients: Vec<C64>,
    kind: StateKind,
}

impl FockVector {
    /// Wraps arbitrary coefficients after checking norm and tail.
    pub fn new(coefficients: Vec<C64>) -> Result<Self> {
        let v = FockVector {
            coefficients,
            kind: StateKind::Generic,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut coefficients = vec![C64::new(0.0, 0.0); cutoff + 1];
        coefficients[0] = C64::new(1.0, 0.0);
        FockVector {
            coefficients,
            kind: StateKind::Coherent(Amplitude(C64::new(0.0, 0.0))),
        }
    }

    fn validate(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidState(format!("fock vector has squared norm {norm}")));
        }
        let tail = self.coefficients.last().map_or(0.0, |c| c.norm_sqr());
        if tail >= TAIL_LIMIT {
            return Err(Error::InvalidState(format!("fock tail weight {tail:e} too large")));
        }
        Ok(())
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn cutoff(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ n |cₙ|²`
    pub fn mean_photon_number(&self) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }
}

/// Cutoff large enough for a coherent state of amplitude `alpha`:
/// `⌈μ + 10√(μ+1) + 20⌉`.
pub fn auto_cutoff(alpha: Amplitude) -> usize {
    let mu = alpha.mean_photon_number();
    (mu + 10.0 * (mu + 1.0).sqrt() + 20.0).ceil() as usize
}

/// Unnormalized-by-truncation Poisson amplitudes `e^{−μ/2} αⁿ/√n!`.
fn poisson_amplitudes(alpha: C64, cutoff: usize) -> Vec<C64> {
    let mut c = Vec::with_capacity(cutoff + 1);
    let mut current = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    c.push(current);
    for n in 1..=cutoff {
        current = current * alpha / (n as f64).sqrt();
        c.push(current);
    }
    c
}

/// Coherent state `|α⟩` truncated at `cutoff` and renormalized.
pub fn coherent_fock(alpha: Amplitude, cutoff: usize) -> Result<FockVector> {
    let raw = poisson_amplitudes(alpha.value(), cutoff);
    let kept: f64 = raw.iter().map(|c| c.norm_sqr()).sum();
    let tail = raw[cutoff].norm_sqr();
    if kept < NORM_FLOOR || tail >= TAIL_LIMIT {
        return Err(Error::CutoffTooSmall {
            given: cutoff,
            required: auto_cutoff(alpha).max(cutoff + 1),
        });
    }
    let s = 1.0 / kept.sqrt();
    Ok(FockVector {
        coefficients: raw.into_iter().map(|c| c * s).collect(),
        kind: StateKind::Coherent(alpha),
    })
}

/// `N_α = |α|⁴ + 3|α|² + 1`
pub fn pascs_normalization(alpha: Amplitude) -> f64 {
    let mu = alpha.mean_photon_number();
    mu * mu + 3.0 * mu + 1.0
}

/// Photon-added-then-subtracted coherent state `N_α^{-1/2} â â† |α⟩`.
///
/// The coherent expansion is taken at `cutoff − 2`, raised by `â†` and
/// lowered by `â` explicitly. Returns the state and the numerically computed
/// `⟨α|â â† â â†|α⟩`, which should equal [`pascs_normalization`].
pub fn pascs_fock(alpha: Amplitude, cutoff: usize) -> Result<(FockVector, f64)> {
    let too_small = || Error::CutoffTooSmall {
        given: cutoff,
        required: auto_cutoff(alpha) + 2,
    };
    if cutoff < 2 {
        return Err(too_small());
    }
    let base = coherent_fock(alpha, cutoff - 2).map_err(|_| too_small())?;
    let zero = C64::new(0.0, 0.0);

    // â†: |n⟩ → √(n+1)|n+1⟩
    let mut raised = vec![zero; cutoff + 1];
    for (n, c) in base.coefficients.iter().enumerate() {
        raised[n + 1] = *c * ((n + 1) as f64).sqrt();
    }
    // â: |n+1⟩ → √(n+1)|n⟩
    let mut lowered = vec![zero; cutoff + 1];
    for n in 0..cutoff {
        lowered[n] = raised[n + 1] * ((n + 1) as f64).sqrt();
    }

    let normalization: f64 = lowered.iter().map(|c| c.norm_sqr()).sum();
    let s = 1.0 / normalization.sqrt();
    let state = FockVector {
        coefficients: lowered.into_iter().map(|c| c * s).collect(),
        kind: StateKind::Pascs(alpha),
    };
    state.validate()?;
    Ok((state, normalization))
}
