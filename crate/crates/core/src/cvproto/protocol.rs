use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::cv::{auto_cutoff, coherent_fock, pascs_fock, quadrature_moments, Amplitude, FockVector, QuadratureSetting};
use crate::{Error, Result, C64};

/// Means closer to zero than this count as carrying no sign.
const SIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CvProtocol {
    O4,
    E4,
    NState,
    CvBb84Pascs,
    CvB92,
}

impl CvProtocol {
    pub fn name(self) -> &'static str {
        match self {
            CvProtocol::O4 => "O4",
            CvProtocol::E4 => "E4",
            CvProtocol::NState => "N-state",
            CvProtocol::CvBb84Pascs => "CV-BB84-PASCS",
            CvProtocol::CvB92 => "CV-B92",
        }
    }

    /// Whether conclusive results come from the one-sided rule with a
    /// receiver-side flip rather than the symmetric threshold.
    pub fn one_sided(self) -> bool {
        self == CvProtocol::CvB92
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "amplitude", rename_all = "snake_case"))]
pub enum SignalState {
    Coherent(Amplitude),
    Pascs(Amplitude),
}

impl SignalState {
    pub fn amplitude(&self) -> Amplitude {
        match self {
            SignalState::Coherent(a) | SignalState::Pascs(a) => *a,
        }
    }

    pub fn fock(&self) -> Result<FockVector> {
        match self {
            SignalState::Coherent(a) => coherent_fock(*a, auto_cutoff(*a)),
            SignalState::Pascs(a) => pascs_fock(*a, auto_cutoff(*a) + 2).map(|(s, _)| s),
        }
    }
}

/// A state and the bit it carries in each quadrature, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StateEncoding {
    pub state: SignalState,
    pub position: Option<bool>,
    pub momentum: Option<bool>,
}

impl StateEncoding {
    pub fn bit(&self, setting: QuadratureSetting) -> Option<bool> {
        match setting {
            QuadratureSetting::Position => self.position,
            QuadratureSetting::Momentum => self.momentum,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CvProtocolSpec {
    pub protocol: CvProtocol,
    pub states: Vec<StateEncoding>,
    pub n_signals: usize,
    pub alpha: f64,
    pub x0: f64,
}

fn coherent(re: f64, im: f64) -> Result<SignalState> {
    Ok(SignalState::Coherent(Amplitude::new(C64::new(re, im))?))
}

fn pascs(re: f64, im: f64) -> Result<SignalState> {
    Ok(SignalState::Pascs(Amplitude::new(C64::new(re, im))?))
}

fn enc(state: SignalState, position: Option<bool>, momentum: Option<bool>) -> StateEncoding {
    StateEncoding {
        state,
        position,
        momentum,
    }
}

impl CvProtocolSpec {
    /// `|±α⟩` read in position, `|±iα⟩` in momentum; positive side is 1.
    pub fn o4(alpha: f64, x0: f64, n_signals: usize) -> Result<Self> {
        let a = alpha;
        Self::checked(
            CvProtocol::O4,
            vec![
                enc(coherent(a, 0.0)?, Some(true), None),
                enc(coherent(-a, 0.0)?, Some(false), None),
                enc(coherent(0.0, a)?, None, Some(true)),
                enc(coherent(0.0, -a)?, None, Some(false)),
            ],
            n_signals,
            alpha,
            x0,
        )
    }

    /// `|α(1+i)⟩, |α(1−i)⟩, |−α(1+i)⟩, |−α(1−i)⟩`, each carrying a bit in
    /// both quadratures.
    pub fn e4(alpha: f64, x0: f64, n_signals: usize) -> Result<Self> {
        let a = alpha;
        Self::checked(
            CvProtocol::E4,
            vec![
                enc(coherent(a, a)?, Some(true), Some(true)),
                enc(coherent(a, -a)?, Some(true), Some(false)),
                enc(coherent(-a, -a)?, Some(false), Some(false)),
                enc(coherent(-a, a)?, Some(false), Some(true)),
            ],
            n_signals,
            alpha,
            x0,
        )
    }

    /// O4 layout over photon-added-then-subtracted states.
    pub fn cv_bb84_pascs(alpha: f64, x0: f64, n_signals: usize) -> Result<Self> {
        let a = alpha;
        Self::checked(
            CvProtocol::CvBb84Pascs,
            vec![
                enc(pascs(a, 0.0)?, Some(true), None),
                enc(pascs(-a, 0.0)?, Some(false), None),
                enc(pascs(0.0, a)?, None, Some(true)),
                enc(pascs(0.0, -a)?, None, Some(false)),
            ],
            n_signals,
            alpha,
            x0,
        )
    }

    /// `ψ(α)` carries 1 and `ψ(iα)` carries 0 in either quadrature.
    pub fn cvb92(alpha: f64, x0: f64, n_signals: usize) -> Result<Self> {
        let a = alpha;
        Self::checked(
            CvProtocol::CvB92,
            vec![
                enc(pascs(a, 0.0)?, Some(true), Some(true)),
                enc(pascs(0.0, a)?, Some(false), Some(false)),
            ],
            n_signals,
            alpha,
            x0,
        )
    }

    /// Arbitrary state set with a per-quadrature encoding.
    pub fn n_state(states: Vec<StateEncoding>, alpha: f64, x0: f64, n_signals: usize) -> Result<Self> {
        Self::checked(CvProtocol::NState, states, n_signals, alpha, x0)
    }

    fn checked(protocol: CvProtocol, states: Vec<StateEncoding>, n_signals: usize, alpha: f64, x0: f64) -> Result<Self> {
        let spec = CvProtocolSpec {
            protocol,
            states,
            n_signals,
            alpha,
            x0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn label(&self) -> String {
        format!("{} ({} states)", self.protocol.name(), self.states.len())
    }

    /// Checks ranges and that every encoded bit matches the state.
    ///
    /// Under the symmetric threshold a bit must agree with the sign of the
    /// state's mean in that quadrature. Under the one-sided rule each state
    /// must carry the same bit in both quadratures.
    pub fn validate(&self) -> Result<()> {
        if self.n_signals == 0 {
            return Err(Error::param("n_signals", "must be at least 1"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha", format!("{} is not a finite non-negative number", self.alpha)));
        }
        if !(self.x0 >= 0.0 && self.x0.is_finite()) {
            return Err(Error::param("x0", format!("{} is not a finite non-negative number", self.x0)));
        }
        if self.states.is_empty() {
            return Err(Error::Configuration("empty state set".into()));
        }
        for (i, e) in self.states.iter().enumerate() {
            if self.protocol.one_sided() {
                match (e.position, e.momentum) {
                    (Some(a), Some(b)) if a == b => {}
                    _ => {
                        return Err(Error::Configuration(format!(
                            "state {i} must carry one bit in both quadratures"
                        )))
                    }
                }
                continue;
            }
            let fock = e.state.fock()?;
            for setting in QuadratureSetting::BOTH {
                let Some(bit) = e.bit(setting) else { continue };
                let (mean, _) = quadrature_moments(&fock, setting);
                if mean.abs() > SIGN_TOL && (mean > 0.0) != bit {
                    return Err(Error::Configuration(format!(
                        "state {i} encodes {} in {setting:?} but its mean there is {mean:.4}",
                        u8::from(bit)
                    )));
                }
            }
        }
        Ok(())
    }
}
