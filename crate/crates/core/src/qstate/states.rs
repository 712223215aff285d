use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

#[allow(unused_imports)]
use num_traits::Float;

use super::{Mat2, POVM_TOL, STATE_TOL};
use crate::{Error, Result, C64};

/// Normalized qubit ket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amplitudes: [C64; 2],
}

impl PureState {
    pub fn new(a0: C64, a1: C64) -> Result<Self> {
        let norm = a0.norm_sqr() + a1.norm_sqr();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("ket has squared norm {norm}")));
        }
        Ok(PureState {
            amplitudes: [a0, a1],
        })
    }

    /// Normalizes `(a0, a1)`; fails only for the zero vector.
    pub fn normalized(a0: C64, a1: C64) -> Result<Self> {
        let n = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize ket of norm {n}")));
        }
        Ok(PureState {
            amplitudes: [a0 / n, a1 / n],
        })
    }

    pub fn zero() -> Self {
        PureState {
            amplitudes: [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        }
    }

    pub fn one() -> Self {
        PureState {
            amplitudes: [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        }
    }

    pub fn plus() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        PureState { amplitudes: [h, h] }
    }

    pub fn minus() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        PureState {
            amplitudes: [h, -h],
        }
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.amplitudes
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &PureState) -> f64 {
        let [a0, a1] = self.amplitudes;
        let [b0, b1] = other.amplitudes;
        (a0.conj() * b0 + a1.conj() * b1).norm_sqr()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix(Mat2::outer(self.amplitudes, self.amplitudes))
    }
}

/// Valid qubit density operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        if !m.is_hermitian(STATE_TOL) {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("density matrix has trace {tr}")));
        }
        let lo = m.eigenvalues()[0];
        if lo < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix has negative eigenvalue {lo}"
            )));
        }
        Ok(DensityMatrix(m))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Mat2::IDENTITY.scale(0.5))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// Bloch vector `(x, y, z)` with `ρ = (I + r·σ)/2`.
    pub fn bloch(&self) -> [f64; 3] {
        let m = &self.0 .0;
        [2.0 * m[0][1].re, -2.0 * m[0][1].im, m[0][0].re - m[1][1].re]
    }
}

impl From<PureState> for DensityMatrix {
    fn from(s: PureState) -> Self {
        s.density()
    }
}

/// Probability-weighted set of states `{ρᵢ, pᵢ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    states: Vec<DensityMatrix>,
    priors: Vec<f64>,
}

impl Ensemble {
    pub fn new(states: Vec<DensityMatrix>, priors: Vec<f64>) -> Result<Self> {
        if states.is_empty() || states.len() != priors.len() {
            return Err(Error::InvalidState(format!(
                "ensemble needs matching non-empty lists, got {} states and {} priors",
                states.len(),
                priors.len()
            )));
        }
        if let Some(p) = priors.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidState(format!("prior {p} outside [0, 1]")));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("priors sum to {total}")));
        }
        Ok(Ensemble { states, priors })
    }

    pub fn from_pure(states: &[PureState], priors: Vec<f64>) -> Result<Self> {
        Ensemble::new(states.iter().map(|s| s.density()).collect(), priors)
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Positive operator-valued measure on a qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<Mat2>,
}

impl Povm {
    pub fn new(effects: Vec<Mat2>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidState("POVM has no effects".into()));
        }
        for (k, e) in effects.iter().enumerate() {
            if !e.is_psd(POVM_TOL) {
                return Err(Error::InvalidState(format!("POVM effect {k} is not PSD")));
            }
        }
        let total: Mat2 = effects.iter().copied().sum();
        let gap = total.max_abs_diff(&Mat2::IDENTITY);
        if gap > POVM_TOL {
            return Err(Error::InvalidState(format!(
                "POVM effects miss identity by {gap:e}"
            )));
        }
        Ok(Povm { effects })
    }

    pub fn effects(&self) -> &[Mat2] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Born-rule outcome probabilities for `rho`, clamped at zero and
    /// renormalized against rounding.
    pub fn outcome_probabilities(&self, rho: &DensityMatrix) -> Vec<f64> {
        let mut p: Vec<f64> = self
            .effects
            .iter()
            .map(|e| (*e * *rho.matrix()).trace().re.max(0.0))
            .collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        p
    }
}

/// Embedding rate `E` and message bias `b` (probability a stego bit is '0').
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingParams {
    pub rate: f64,
    pub bias: f64,
}

impl EmbeddingParams {
    pub fn new(rate: f64, bias: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::param("rate", format!("{rate} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&bias) {
            return Err(Error::param("bias", format!("{bias} outside [0, 1]")));
        }
        Ok(EmbeddingParams { rate, bias })
    }

    /// No embedding.
    pub fn none() -> Self {
        EmbeddingParams {
            rate: 0.0,
            bias: 1.0,
        }
    }

    /// Priors over `|0⟩, |1⟩, |+⟩, |−⟩`.
    ///
    /// The '1' prior is taken as `1/2 − p₀`, which makes each basis pair sum
    /// to exactly one half in floating point, so the four priors add up to
    /// exactly one.
    pub fn bb84_priors(&self) -> [f64; 4] {
        let p0 = ((1.0 - self.rate) / 4.0 + self.rate * self.bias / 2.0).clamp(0.0, 0.5);
        let p1 = 0.5 - p0;
        [p0, p1, p0, p1]
    }
}

/// BB84 preparation / measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Basis {
    /// `{|0⟩, |1⟩}`
    Rectilinear,
    /// `{|+⟩, |−⟩}`
    Diagonal,
}

/// Index of a BB84 signal state in the order `|0⟩, |1⟩, |+⟩, |−⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Bb84Label {
    Zero = 0,
    One = 1,
    Plus = 2,
    Minus = 3,
}

impl Bb84Label {
    pub const ALL: [Bb84Label; 4] = [
        Bb84Label::Zero,
        Bb84Label::One,
        Bb84Label::Plus,
        Bb84Label::Minus,
    ];

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Classical bit carried by the state: '0' for `|0⟩, |+⟩`.
    pub fn bit(self) -> bool {
        matches!(self, Bb84Label::One | Bb84Label::Minus)
    }

    pub fn basis(self) -> Basis {
        match self {
            Bb84Label::Zero | Bb84Label::One => Basis::Rectilinear,
            Bb84Label::Plus | Bb84Label::Minus => Basis::Diagonal,
        }
    }

    pub fn from_parts(basis: Basis, bit: bool) -> Self {
        match (basis, bit) {
            (Basis::Rectilinear, false) => Bb84Label::Zero,
            (Basis::Rectilinear, true) => Bb84Label::One,
            (Basis::Diagonal, false) => Bb84Label::Plus,
            (Basis::Diagonal, true) => Bb84Label::Minus,
        }
    }

    /// The orthogonal partner in the same basis.
    pub fn flipped(self) -> Self {
        Bb84Label::from_parts(self.basis(), !self.bit())
    }

    pub fn state(self) -> PureState {
        match self {
            Bb84Label::Zero => PureState::zero(),
            Bb84Label::One => PureState::one(),
            Bb84Label::Plus => PureState::plus(),
            Bb84Label::Minus => PureState::minus(),
        }
    }
}

pub fn bb84_ensemble(params: EmbeddingParams) -> Ensemble {
    let states = Bb84Label::ALL.iter().map(|l| l.state().density()).collect();
    Ensemble {
        states,
        priors: params.bb84_priors().to_vec(),
    }
}

/// Distribution `(P('0'), P('1'))` of the classical bits under embedding.
pub fn classical_bit_distribution(params: EmbeddingParams) -> (f64, f64) {
    let [p0, p1, _, _] = params.bb84_priors();
    (2.0 * p0, 2.0 * p1)
}

/// `Σᵢ pᵢ ρᵢ`
pub fn ensemble_average(ensemble: &Ensemble) -> DensityMatrix {
    let m = ensemble
        .states
        .iter()
        .zip(&ensemble.priors)
        .map(|(s, p)| s.matrix().scale(*p))
        .sum::<Mat2>()
        .hermitian_part();
    DensityMatrix(m)
}
