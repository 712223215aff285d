use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::protocol::{CvProtocol, CvProtocolSpec};
use crate::announce::{random_order, stego_order, wrap_displacement};
use crate::cv::{postselect_b92, postselect_e4, PostSelectOutcome, QuadratureSampler, QuadratureSetting};
use crate::{Error, Result};

/// Complete record of one CV run. Per-signal vectors are indexed by signal.
#[derive(Debug, Clone, PartialEq)]
pub struct CvTranscript {
    pub protocol: CvProtocol,
    /// Index into the protocol's state list.
    pub sent: Vec<usize>,
    pub settings: Vec<QuadratureSetting>,
    pub raw_values: Vec<f64>,
    /// Receiver-side post-selection before any flip.
    pub outcomes: Vec<PostSelectOutcome>,
    /// Sender's public confirmation that the quadrature carries a bit.
    pub basis_confirmations: Vec<bool>,
    /// Sender's bit for the announced quadrature, where one exists.
    pub sender_bits: Vec<Option<bool>>,
    /// Confirmed and conclusive signals, ascending.
    pub conclusive: Vec<usize>,
    /// Public announcement of `conclusive`, in announcement order.
    pub announced_conclusive: Vec<usize>,
    /// Keys over `conclusive`, the receiver's after any flip.
    pub key_sender: Vec<bool>,
    pub key_receiver: Vec<bool>,
}

impl CvTranscript {
    pub fn n_signals(&self) -> usize {
        self.sent.len()
    }

    /// Fraction of signals whose quadrature the sender confirmed.
    pub fn confirmed_fraction(&self) -> f64 {
        self.basis_confirmations.iter().filter(|c| **c).count() as f64 / self.n_signals() as f64
    }

    pub fn conclusive_fraction(&self) -> f64 {
        self.conclusive.len() as f64 / self.n_signals() as f64
    }

    /// Disagreement rate over the conclusive key, `None` without one.
    pub fn bit_error_rate(&self) -> Option<f64> {
        if self.conclusive.is_empty() {
            return None;
        }
        let wrong = self.key_sender.iter().zip(&self.key_receiver).filter(|(a, b)| a != b).count();
        Some(wrong as f64 / self.conclusive.len() as f64)
    }

    /// Receiver key bits indexed by signal; `None` off the conclusive set.
    pub fn receiver_bits(&self) -> Vec<Option<bool>> {
        let mut bits = alloc::vec![None; self.n_signals()];
        for (&i, &b) in self.conclusive.iter().zip(&self.key_receiver) {
            bits[i] = Some(b);
        }
        bits
    }
}

/// A protocol with its homodyne samplers built once for repeated runs.
#[derive(Debug, Clone)]
pub struct CvEngine {
    spec: CvProtocolSpec,
    samplers: Vec<[QuadratureSampler; 2]>,
}

impl CvEngine {
    pub fn new(spec: CvProtocolSpec) -> Result<Self> {
        spec.validate()?;
        let samplers = spec
            .states
            .iter()
            .map(|e| {
                let fock = e.state.fock()?;
                Ok([
                    QuadratureSampler::new(&fock, QuadratureSetting::Position),
                    QuadratureSampler::new(&fock, QuadratureSetting::Momentum),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CvEngine { spec, samplers })
    }

    pub fn spec(&self) -> &CvProtocolSpec {
        &self.spec
    }

    /// Runs `n_signals` signals and announces the conclusive set in a
    /// uniformly random order.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> CvTranscript {
        let n = self.spec.n_signals;
        let one_sided = self.spec.protocol.one_sided();
        let mut t = CvTranscript {
            protocol: self.spec.protocol,
            sent: Vec::with_capacity(n),
            settings: Vec::with_capacity(n),
            raw_values: Vec::with_capacity(n),
            outcomes: Vec::with_capacity(n),
            basis_confirmations: Vec::with_capacity(n),
            sender_bits: Vec::with_capacity(n),
            conclusive: Vec::new(),
            announced_conclusive: Vec::new(),
            key_sender: Vec::new(),
            key_receiver: Vec::new(),
        };
        for i in 0..n {
            let state = rng.random_range(0..self.spec.states.len());
            let setting = if rng.random::<bool>() {
                QuadratureSetting::Momentum
            } else {
                QuadratureSetting::Position
            };
            let value = self.samplers[state][setting as usize].sample(rng);
            let outcome = if one_sided {
                postselect_b92(value, self.spec.x0, setting)
            } else {
                postselect_e4(value, self.spec.x0)
            };
            let sender_bit = self.spec.states[state].bit(setting);

            t.sent.push(state);
            t.settings.push(setting);
            t.raw_values.push(value);
            t.outcomes.push(outcome);
            t.basis_confirmations.push(sender_bit.is_some());
            t.sender_bits.push(sender_bit);
            if let (Some(s), Some(r)) = (sender_bit, outcome.bit()) {
                t.conclusive.push(i);
                t.key_sender.push(s);
                t.key_receiver.push(r != one_sided);
            }
        }
        t.announced_conclusive = random_order(t.conclusive.len(), rng)
            .into_iter()
            .map(|k| t.conclusive[k])
            .collect();
        t
    }
}

fn run_expect<R: Rng + ?Sized>(spec: &CvProtocolSpec, expected: CvProtocol, rng: &mut R) -> Result<CvTranscript> {
    if spec.protocol != expected {
        return Err(Error::Configuration(format!(
            "{} spec passed to the {} runner",
            spec.protocol.name(),
            expected.name()
        )));
    }
    Ok(CvEngine::new(spec.clone())?.run(rng))
}

/// Runs any protocol spec.
pub fn cv_run<R: Rng + ?Sized>(spec: &CvProtocolSpec, rng: &mut R) -> Result<CvTranscript> {
    Ok(CvEngine::new(spec.clone())?.run(rng))
}

pub fn e4_run<R: Rng + ?Sized>(spec: &CvProtocolSpec, rng: &mut R) -> Result<CvTranscript> {
    run_expect(spec, CvProtocol::E4, rng)
}

pub fn o4_run<R: Rng + ?Sized>(spec: &CvProtocolSpec, rng: &mut R) -> Result<CvTranscript> {
    run_expect(spec, CvProtocol::O4, rng)
}

pub fn n_state_run<R: Rng + ?Sized>(spec: &CvProtocolSpec, rng: &mut R) -> Result<CvTranscript> {
    run_expect(spec, CvProtocol::NState, rng)
}

pub fn cv_bb84_pascs_run<R: Rng + ?Sized>(spec: &CvProtocolSpec, rng: &mut R) -> Result<CvTranscript> {
    run_expect(spec, CvProtocol::CvBb84Pascs, rng)
}

/// One-sided post-selection; the receiver flips every conclusive bit.
pub fn cvb92_run<R: Rng + ?Sized>(spec: &CvProtocolSpec, rng: &mut R) -> Result<CvTranscript> {
    run_expect(spec, CvProtocol::CvB92, rng)
}

/// Announces the conclusive positions in a uniformly random order whose
/// `d`-th entry (wrapped) carries `message` in the receiver's key.
pub fn reverse_embed_cv<R: Rng + ?Sized>(
    transcript: &CvTranscript,
    message: bool,
    d: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let order = stego_order(&transcript.key_receiver, message, d, rng)?;
    Ok(order.into_iter().map(|k| transcript.conclusive[k]).collect())
}

/// Reads the extractor's own bit at the `d`-th announced position (wrapped).
/// `own_bits` is indexed by signal.
pub fn reverse_extract_cv(announcement: &[usize], d: usize, own_bits: &[Option<bool>]) -> Result<bool> {
    if announcement.is_empty() {
        return Err(Error::Protocol("empty announcement".into()));
    }
    if d == 0 {
        return Err(Error::param("d", "displacement is 1-based"));
    }
    let pos = announcement[wrap_displacement(d, announcement.len()) - 1];
    own_bits
        .get(pos)
        .copied()
        .flatten()
        .ok_or_else(|| Error::Protocol(format!("no key bit at announced position {pos}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_from_seed;

    /// Conclusive agreement for `|mean| = 0.8`, σ = 0.5, threshold 0.4:
    /// `Φ(0.8) / (Φ(0.8) + Φ(−2.4))`.
    const AGREEMENT_08_04: f64 = 0.9897060126041229;

    fn agreement(t: &CvTranscript) -> f64 {
        1.0 - t.bit_error_rate().unwrap()
    }

    fn assert_gaussian_agreement(t: &CvTranscript) {
        let band = crate::stats::binomial_band_99(AGREEMENT_08_04, t.conclusive.len() as u64);
        assert!(band.contains(agreement(t)), "{} outside {band:?}", agreement(t));
    }

    #[test]
    fn e4_keeps_every_signal() {
        let spec = CvProtocolSpec::e4(0.8, 0.4, 10_000).unwrap();
        let t = e4_run(&spec, &mut stream_from_seed(1)).unwrap();
        assert_eq!(t.confirmed_fraction(), 1.0);
        assert_gaussian_agreement(&t);
        let mut sorted = t.announced_conclusive.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, t.conclusive);
    }

    #[test]
    fn large_threshold_kills_conclusive_results() {
        let spec = CvProtocolSpec::e4(0.8, 4.8, 10_000).unwrap();
        let t = e4_run(&spec, &mut stream_from_seed(1)).unwrap();
        assert!(t.conclusive_fraction() < 1e-3);
    }

    #[test]
    fn o4_discards_half() {
        let spec = CvProtocolSpec::o4(0.8, 0.4, 100_000).unwrap();
        let t = o4_run(&spec, &mut stream_from_seed(2)).unwrap();
        assert!((t.confirmed_fraction() - 0.5).abs() < 0.01);
        assert_gaussian_agreement(&t);
    }

    #[test]
    fn vacuum_carries_nothing() {
        let spec = CvProtocolSpec::o4(0.0, 0.4, 40_000).unwrap();
        let t = o4_run(&spec, &mut stream_from_seed(3)).unwrap();
        assert!((agreement(&t) - 0.5).abs() < 0.03);
    }

    #[test]
    fn n_state_reduces_to_e4() {
        let e4 = CvProtocolSpec::e4(0.8, 0.4, 2000).unwrap();
        let generic = CvProtocolSpec::n_state(e4.states.clone(), 0.8, 0.4, 2000).unwrap();
        let a = e4_run(&e4, &mut stream_from_seed(4)).unwrap();
        let b = n_state_run(&generic, &mut stream_from_seed(4)).unwrap();
        assert_eq!(a.raw_values, b.raw_values);
        assert_eq!(a.key_receiver, b.key_receiver);
        assert!(b.basis_confirmations.iter().all(|c| *c));
    }

    #[test]
    fn cvb92_flip_restores_agreement() {
        let spec = CvProtocolSpec::cvb92(1.2, 0.6, 10_000).unwrap();
        let t = cvb92_run(&spec, &mut stream_from_seed(5)).unwrap();
        assert!(agreement(&t) >= 0.99, "{}", agreement(&t));
        assert_eq!(t.confirmed_fraction(), 1.0);
        let anti = t
            .conclusive
            .iter()
            .zip(&t.key_sender)
            .filter(|(&i, &s)| t.outcomes[i].bit() != Some(s))
            .count();
        assert!(anti as f64 / t.conclusive.len() as f64 >= 0.99);
    }

    #[test]
    fn pascs_bb84_matches_o4_structure() {
        let spec = CvProtocolSpec::cv_bb84_pascs(1.2, 0.6, 20_000).unwrap();
        let t = cv_bb84_pascs_run(&spec, &mut stream_from_seed(6)).unwrap();
        assert!((t.confirmed_fraction() - 0.5).abs() < 0.015);
        assert!(agreement(&t) >= 0.99);
    }

    #[test]
    fn wrong_runner_is_a_configuration_error() {
        let spec = CvProtocolSpec::o4(0.8, 0.4, 10).unwrap();
        assert!(matches!(e4_run(&spec, &mut stream_from_seed(0)), Err(Error::Configuration(_))));
    }

    #[test]
    fn reverse_roundtrip() {
        let mut rng = stream_from_seed(7);
        for (spec, alpha) in [
            (CvProtocolSpec::e4(2.0, 1.0, 200).unwrap(), 2.0),
            (CvProtocolSpec::cvb92(2.0, 1.0, 2000).unwrap(), 2.0),
        ] {
            let engine = CvEngine::new(spec).unwrap();
            for i in 0..200 {
                let t = engine.run(&mut rng);
                let message = i % 2 == 0;
                let ann = reverse_embed_cv(&t, message, 1 + i, &mut rng).unwrap();
                assert_eq!(reverse_extract_cv(&ann, 1 + i, &t.sender_bits).unwrap(), message, "alpha {alpha}");
            }
        }
    }

    #[test]
    fn single_conclusive_result_wraps() {
        assert!(reverse_extract_cv(&[3], 17, &[None, None, None, Some(true)]).unwrap());
        assert!(reverse_extract_cv(&[], 1, &[]).is_err());
        assert!(reverse_extract_cv(&[0], 1, &[None]).is_err());
    }
}
