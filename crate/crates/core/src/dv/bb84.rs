use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::adversary::{intercept_resend, ChannelModel, Eavesdropper, EveObservation};
use crate::qstate::{Basis, Bb84Label, EmbeddingParams};
use crate::{Error, Result};

/// Padding `⌈m/10⌉ + 10`.
pub fn default_delta(m: usize) -> usize {
    m.div_ceil(10) + 10
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DvConfig {
    /// Half the sifted length a run must reach.
    pub m: usize,
    pub delta: usize,
    pub abort_qber: f64,
    pub channel: ChannelModel,
}

impl DvConfig {
    pub fn new(m: usize) -> Result<Self> {
        let c = DvConfig {
            m,
            delta: default_delta(m),
            abort_qber: 0.11,
            channel: ChannelModel::Lossless,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_channel(mut self, channel: ChannelModel) -> Self {
        self.channel = channel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::param("m", format!("{} < 2", self.m)));
        }
        if !(0.0..=1.0).contains(&self.abort_qber) {
            return Err(Error::param("abort_qber", format!("{} outside [0, 1]", self.abort_qber)));
        }
        self.channel.validate()
    }

    /// Qubits sent per run, `4(m + δ)`.
    pub fn signals(&self) -> usize {
        4 * (self.m + self.delta)
    }
}

/// Distribution the sending party prepares from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Preparation {
    #[default]
    Uniform,
    /// Bits skewed by multi-bit direct embedding; bases stay uniform.
    Embedded(EmbeddingParams),
}

impl Preparation {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Bb84Label {
        match self {
            Preparation::Uniform => {
                let basis = if rng.random::<bool>() {
                    Basis::Diagonal
                } else {
                    Basis::Rectilinear
                };
                Bb84Label::from_parts(basis, rng.random())
            }
            Preparation::Embedded(params) => {
                let p = params.bb84_priors();
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (i, w) in p.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        return Bb84Label::ALL[i];
                    }
                }
                // u landed in rounding slack above the cumulative total.
                Bb84Label::ALL[p.iter().rposition(|w| *w > 0.0).unwrap_or(0)]
            }
        }
    }
}

/// Complete record of one BB84 run.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub prepared: Vec<Bb84Label>,
    /// Receiver's basis and outcome per position.
    pub measured: Vec<(Basis, bool)>,
    /// Positions where the bases matched, ascending.
    pub sift_positions: Vec<usize>,
    pub sifted_key_sender: Vec<bool>,
    pub sifted_key_receiver: Vec<bool>,
    /// Public announcements, as transmission positions in announcement order.
    pub announcements: Vec<usize>,
    /// Transmission positions sacrificed for error estimation, ascending.
    pub check_positions: Vec<usize>,
    pub aborted: bool,
    /// Error rate over `check_positions`, once compared.
    pub qber: Option<f64>,
}

impl Transcript {
    pub fn sift_len(&self) -> usize {
        self.sift_positions.len()
    }

    /// Sifted slot of a transmission position, if it was sifted.
    pub fn slot_of(&self, position: usize) -> Option<usize> {
        self.sift_positions.binary_search(&position).ok()
    }

    /// Error rate over the whole sifted key.
    pub fn sifted_error_rate(&self) -> Option<f64> {
        if self.sift_positions.is_empty() {
            return None;
        }
        let errors = self
            .sifted_key_sender
            .iter()
            .zip(&self.sifted_key_receiver)
            .filter(|(a, b)| a != b)
            .count();
        Some(errors as f64 / self.sift_len() as f64)
    }
}

fn measure<R: Rng + ?Sized>(symbol: Bb84Label, rng: &mut R) -> (Basis, bool) {
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
    (basis, bit)
}

pub(crate) fn run_inner<R: Rng + ?Sized>(
    config: &DvConfig,
    preparation: &Preparation,
    eve: Option<&Eavesdropper>,
    rng: &mut R,
) -> Result<(Transcript, Vec<EveObservation>)> {
    config.validate()?;
    let n = config.signals();
    let prepared: Vec<Bb84Label> = (0..n).map(|_| preparation.draw(rng)).collect();

    let (observations, in_flight) = match eve {
        Some(eve) => intercept_resend(&prepared, eve, rng),
        None => (Vec::new(), prepared.clone()),
    };
    let arrived: Vec<Bb84Label> = in_flight.into_iter().map(|s| config.channel.transmit(s, rng)).collect();
    let measured: Vec<(Basis, bool)> = arrived.iter().map(|s| measure(*s, rng)).collect();

    let sift_positions: Vec<usize> = (0..n).filter(|&i| prepared[i].basis() == measured[i].0).collect();
    let sifted_key_sender = sift_positions.iter().map(|&i| prepared[i].bit()).collect();
    let sifted_key_receiver = sift_positions.iter().map(|&i| measured[i].1).collect();
    let aborted = sift_positions.len() < 2 * config.m;

    Ok((
        Transcript {
            prepared,
            measured,
            sift_positions,
            sifted_key_sender,
            sifted_key_receiver,
            announcements: Vec::new(),
            check_positions: Vec::new(),
            aborted,
            qber: None,
        },
        observations,
    ))
}

/// Prepares `4(m+δ)` signals, sends them through the channel, measures in
/// random bases and sifts. The transcript is marked aborted when fewer than
/// `2m` positions survive sifting.
pub fn bb84_run<R: Rng + ?Sized>(config: &DvConfig, preparation: &Preparation, rng: &mut R) -> Result<Transcript> {
    run_inner(config, preparation, None, rng).map(|(t, _)| t)
}

/// As [`bb84_run`], with `eve` intercepting between preparation and channel.
pub fn bb84_run_with_eve<R: Rng + ?Sized>(
    config: &DvConfig,
    preparation: &Preparation,
    eve: &Eavesdropper,
    rng: &mut R,
) -> Result<(Transcript, Vec<EveObservation>)> {
    run_inner(config, preparation, Some(eve), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_from_seed;

    #[test]
    fn noiseless_sifting_is_exact() {
        let config = DvConfig::new(256).unwrap();
        assert_eq!(config.delta, 36);
        let mut rng = stream_from_seed(9);
        let t = bb84_run(&config, &Preparation::Uniform, &mut rng).unwrap();
        assert_eq!(t.prepared.len(), 4 * (256 + 36));
        assert_eq!(t.sifted_key_sender, t.sifted_key_receiver);
        assert!(t.sift_positions.iter().all(|&i| t.prepared[i].basis() == t.measured[i].0));
        assert_eq!(t.sifted_error_rate(), Some(0.0));
        assert!(!t.aborted);
    }

    #[test]
    fn explicit_padding() {
        let mut config = DvConfig::new(256).unwrap();
        config.delta = 26;
        assert_eq!(config.signals(), 1128);
    }

    #[test]
    fn tiny_runs_can_abort() {
        let mut config = DvConfig::new(8).unwrap();
        config.delta = 0;
        let mut rng = stream_from_seed(1);
        let aborted = (0..500)
            .filter(|_| bb84_run(&config, &Preparation::Uniform, &mut rng).unwrap().aborted)
            .count();
        // P(sift < 16 | 32 fair trials) ≈ 0.43
        assert!(aborted > 150 && aborted < 280, "{aborted}");
    }

    #[test]
    fn config_validation() {
        assert!(DvConfig::new(1).is_err());
        let mut c = DvConfig::new(4).unwrap();
        c.abort_qber = 2.0;
        assert!(c.validate().is_err());
    }
}
