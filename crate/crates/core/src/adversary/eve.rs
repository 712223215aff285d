use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::qstate::{bb84_ensemble, mdep_solve, Basis, Bb84Label, EmbeddingParams, Povm};
use crate::{Error, Result};

/// How Eve measures intercepted BB84 signals.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum EveMeasurement {
    /// Minimum-error POVM for the BB84 ensemble she assumes is being sent.
    OptimalPovm { hypothesis: EmbeddingParams },
    /// Projective measurement in a uniformly random BB84 basis.
    RandomBb84Basis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EveStrategy {
    pub intercept_fraction: f64,
    pub measurement: EveMeasurement,
}

impl EveStrategy {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.intercept_fraction) {
            return Err(Error::param(
                "intercept_fraction",
                format!("{} outside [0, 1]", self.intercept_fraction),
            ));
        }
        Ok(())
    }
}

/// One intercepted signal: where, which outcome Eve saw, what she resent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EveObservation {
    pub position: usize,
    /// Outcome index in `0..4`, aligned with `|0⟩, |1⟩, |+⟩, |−⟩`.
    pub outcome: usize,
    pub resent: Bb84Label,
}

#[derive(Debug, Clone)]
enum Measurement {
    Povm {
        povm: Povm,
        /// `table[true label][outcome]`
        table: [[f64; 4]; 4],
        resend: [Bb84Label; 4],
    },
    RandomBasis,
}

/// An [`EveStrategy`] with its measurement precomputed.
#[derive(Debug, Clone)]
pub struct Eavesdropper {
    strategy: EveStrategy,
    measurement: Measurement,
}

impl Eavesdropper {
    pub fn new(strategy: EveStrategy) -> Result<Self> {
        strategy.validate()?;
        let measurement = match strategy.measurement {
            EveMeasurement::RandomBb84Basis => Measurement::RandomBasis,
            EveMeasurement::OptimalPovm { hypothesis } => {
                let ensemble = bb84_ensemble(hypothesis);
                let solution = mdep_solve(&ensemble, 1e-13, 200_000)?;
                let povm = solution.povm;
                let mut table = [[0.0; 4]; 4];
                for label in Bb84Label::ALL {
                    let p = povm.outcome_probabilities(&label.state().density());
                    table[label.index()].copy_from_slice(&p);
                }
                // Resend the state with the largest posterior for each outcome.
                let priors = ensemble.priors();
                let mut resend = [Bb84Label::Zero; 4];
                for (k, slot) in resend.iter_mut().enumerate() {
                    let best = (0..4)
                        .max_by(|&i, &j| {
                            (priors[i] * table[i][k])
                                .total_cmp(&(priors[j] * table[j][k]))
                                .then(j.cmp(&i))
                        })
                        .unwrap_or(0);
                    *slot = Bb84Label::ALL[best];
                }
                Measurement::Povm { povm, table, resend }
            }
        };
        Ok(Eavesdropper {
            strategy,
            measurement,
        })
    }

    pub fn strategy(&self) -> &EveStrategy {
        &self.strategy
    }

    pub fn povm(&self) -> Option<&Povm> {
        match &self.measurement {
            Measurement::Povm { povm, .. } => Some(povm),
            Measurement::RandomBasis => None,
        }
    }

    /// `P(outcome | true label)` as a 4×4 row-stochastic table.
    pub fn confusion(&self) -> [[f64; 4]; 4] {
        match &self.measurement {
            Measurement::Povm { table, .. } => *table,
            Measurement::RandomBasis => {
                let mut t = [[0.0; 4]; 4];
                for label in Bb84Label::ALL {
                    for out in Bb84Label::ALL {
                        t[label.index()][out.index()] = if label.basis() == out.basis() {
                            if label == out { 0.5 } else { 0.0 }
                        } else {
                            0.25
                        };
                    }
                }
                t
            }
        }
    }

    /// Measures one signal, returning `(outcome, resent state)`.
    pub fn measure<R: Rng + ?Sized>(&self, symbol: Bb84Label, rng: &mut R) -> (usize, Bb84Label) {
        match &self.measurement {
            Measurement::Povm { table, resend, .. } => {
                let row = &table[symbol.index()];
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut outcome = 3;
                for (k, p) in row.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        outcome = k;
                        break;
                    }
                }
                (outcome, resend[outcome])
            }
            Measurement::RandomBasis => {
                let basis = if rng.random::<bool>() {
                    Basis::Diagonal
                } else {
                    Basis::Rectilinear
                };
                let bit = if basis == symbol.basis() {
                    symbol.bit()
                } else {
                    rng.random()
                };
                let found = Bb84Label::from_parts(basis, bit);
                (found.index(), found)
            }
        }
    }
}

/// Intercepts each symbol with probability `f`, measures and resends.
/// Symbols left alone pass through unchanged.
pub fn intercept_resend<R: Rng + ?Sized>(
    stream: &[Bb84Label],
    eve: &Eavesdropper,
    rng: &mut R,
) -> (Vec<EveObservation>, Vec<Bb84Label>) {
    let f = eve.strategy.intercept_fraction;
    let mut observations = Vec::new();
    let mut forwarded = Vec::with_capacity(stream.len());
    for (position, &symbol) in stream.iter().enumerate() {
        let hit = f >= 1.0 || (f > 0.0 && rng.random::<f64>() < f);
        if hit {
            let (outcome, resent) = eve.measure(symbol, rng);
            observations.push(EveObservation {
                position,
                outcome,
                resent,
            });
            forwarded.push(resent);
        } else {
            forwarded.push(symbol);
        }
    }
    (observations, forwarded)
}
