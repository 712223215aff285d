use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::bb84::{run_inner, DvConfig, Preparation, Transcript};
use crate::adversary::{Eavesdropper, EveObservation};
use crate::announce::{random_order, stego_order, wrap_displacement};
use crate::{Error, Result};

/// How the receiving party hides its bit in the sifting announcement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ReverseVariant {
    /// Sifted positions appended by a mismatched position `d` sifted slots
    /// to the right of the stego slot; both parties drop it.
    A,
    /// Sifted positions announced in an order whose `d`-th entry carries
    /// the bit.
    #[default]
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReverseRun {
    /// `announcements` holds the announcement as published.
    pub transcript: Transcript,
    pub variant: ReverseVariant,
    /// Displacement after wrapping onto the announcement length.
    pub displacement: usize,
    /// Mismatched position announced under variant A.
    pub decoy: Option<usize>,
}

impl ReverseRun {
    /// Key the message recipient keeps: its sifted bits over every announced
    /// position except the decoy, in transmission order.
    pub fn sender_key(&self) -> Vec<bool> {
        self.kept_positions()
            .into_iter()
            .map(|p| self.transcript.prepared[p].bit())
            .collect()
    }

    /// Key the announcing party keeps.
    pub fn receiver_key(&self) -> Vec<bool> {
        self.kept_positions()
            .into_iter()
            .map(|p| self.transcript.measured[p].1)
            .collect()
    }

    fn kept_positions(&self) -> Vec<usize> {
        let mut kept: Vec<usize> = self
            .transcript
            .announcements
            .iter()
            .copied()
            .filter(|p| Some(*p) != self.decoy)
            .collect();
        kept.sort_unstable();
        kept
    }
}

/// Uniform BB84 run in which the measuring party hides `message` in how it
/// announces the sifted positions. With `message = None` the announcement
/// is a plain random order and nothing is hidden.
///
/// Preparation is always uniform and happens before any embedding choice,
/// so the prepared sequence is the same with or without a message.
pub fn bb84_reverse_run<R: Rng + ?Sized>(
    config: &DvConfig,
    message: Option<bool>,
    d: usize,
    variant: ReverseVariant,
    rng: &mut R,
) -> Result<ReverseRun> {
    reverse_inner(config, None, message, d, variant, rng).map(|(run, _)| run)
}

/// As [`bb84_reverse_run`], with `eve` intercepting the quantum signals.
pub fn bb84_reverse_run_with_eve<R: Rng + ?Sized>(
    config: &DvConfig,
    eve: &Eavesdropper,
    message: Option<bool>,
    d: usize,
    variant: ReverseVariant,
    rng: &mut R,
) -> Result<(ReverseRun, Vec<EveObservation>)> {
    reverse_inner(config, Some(eve), message, d, variant, rng)
}

fn reverse_inner<R: Rng + ?Sized>(
    config: &DvConfig,
    eve: Option<&Eavesdropper>,
    message: Option<bool>,
    d: usize,
    variant: ReverseVariant,
    rng: &mut R,
) -> Result<(ReverseRun, Vec<EveObservation>)> {
    if d == 0 {
        return Err(Error::param("d", "displacement is 1-based"));
    }
    let (mut transcript, observations) = run_inner(config, &Preparation::Uniform, eve, rng)?;
    let n = transcript.sift_len();
    if n == 0 {
        return Err(Error::EmbeddingFailure("nothing sifted"));
    }
    let (announcements, displacement, decoy) = match (message, variant) {
        (None, _) => {
            let order = random_order(n, rng);
            (order.iter().map(|&s| transcript.sift_positions[s]).collect(), wrap_displacement(d, n), None)
        }
        (Some(bit), ReverseVariant::B) => {
            let order = stego_order(&transcript.sifted_key_receiver, bit, d, rng)?;
            (order.iter().map(|&s| transcript.sift_positions[s]).collect(), wrap_displacement(d, n), None)
        }
        (Some(bit), ReverseVariant::A) => {
            let d = wrap_displacement(d, n);
            let decoy = choose_decoy(&transcript, bit, d, rng)?;
            let mut ann: Vec<usize> = random_order(n, rng)
                .into_iter()
                .map(|s| transcript.sift_positions[s])
                .collect();
            ann.push(decoy);
            (ann, d, Some(decoy))
        }
    };
    transcript.announcements = announcements;
    let run = ReverseRun {
        transcript,
        variant,
        displacement,
        decoy,
    };
    Ok((run, observations))
}

fn choose_decoy<R: Rng + ?Sized>(t: &Transcript, bit: bool, d: usize, rng: &mut R) -> Result<usize> {
    // Mismatched positions whose d-th sifted predecessor carries `bit`.
    let mut candidates = Vec::new();
    let mut sifted_before = 0usize;
    for pos in 0..t.prepared.len() {
        if t.slot_of(pos).is_some() {
            sifted_before += 1;
        } else if sifted_before >= d && t.sifted_key_receiver[sifted_before - d] == bit {
            candidates.push(pos);
        }
    }
    if candidates.is_empty() {
        return Err(Error::EmbeddingFailure("no mismatched position lies at the displacement from a carrier"));
    }
    Ok(candidates[rng.random_range(0..candidates.len())])
}

/// Recovers the hidden bit from the preparing party's own key.
///
/// Variant B reads the `d`-th announced position. Variant A takes the last
/// announced position as the decoy and reads the `d`-th announced position
/// to its left.
pub fn bb84_reverse_extract(
    prepared_bits: &[bool],
    announcements: &[usize],
    d: usize,
    variant: ReverseVariant,
) -> Result<bool> {
    if d == 0 {
        return Err(Error::param("d", "displacement is 1-based"));
    }
    let bit_at = |p: usize| {
        prepared_bits
            .get(p)
            .copied()
            .ok_or_else(|| Error::Protocol(format!("announced position {p} out of range")))
    };
    match variant {
        ReverseVariant::B => {
            if announcements.is_empty() {
                return Err(Error::Protocol("empty announcement".into()));
            }
            bit_at(announcements[wrap_displacement(d, announcements.len()) - 1])
        }
        ReverseVariant::A => {
            let (&decoy, genuine) = announcements
                .split_last()
                .ok_or_else(|| Error::Protocol("empty announcement".into()))?;
            if genuine.is_empty() {
                return Err(Error::Protocol("no genuine announcements".into()));
            }
            let d = wrap_displacement(d, genuine.len());
            let mut left: Vec<usize> = genuine.iter().copied().filter(|&p| p < decoy).collect();
            left.sort_unstable();
            let p = left
                .len()
                .checked_sub(d)
                .map(|i| left[i])
                .ok_or_else(|| Error::Protocol(format!("fewer than {d} announced positions precede the decoy")))?;
            bit_at(p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_from_seed;

    fn sender_bits(t: &Transcript) -> Vec<bool> {
        t.prepared.iter().map(|s| s.bit()).collect()
    }

    #[test]
    fn variant_b_roundtrip() {
        let config = DvConfig::new(32).unwrap();
        let mut rng = stream_from_seed(21);
        for i in 0..300usize {
            let message = i % 2 == 1;
            let d = 1 + i % 150;
            let run = bb84_reverse_run(&config, Some(message), d, ReverseVariant::B, &mut rng).unwrap();
            let t = &run.transcript;
            assert_eq!(t.announcements.len(), t.sift_len());
            let got = bb84_reverse_extract(&sender_bits(t), &t.announcements, d, ReverseVariant::B).unwrap();
            assert_eq!(got, message);
            assert_eq!(run.sender_key(), run.receiver_key());
        }
    }

    #[test]
    fn variant_a_roundtrip_drops_decoy() {
        let config = DvConfig::new(32).unwrap();
        let mut rng = stream_from_seed(22);
        for i in 0..300usize {
            let message = i % 3 == 0;
            let d = 1 + i % 7;
            let run = bb84_reverse_run(&config, Some(message), d, ReverseVariant::A, &mut rng).unwrap();
            let t = &run.transcript;
            let decoy = run.decoy.unwrap();
            assert_eq!(*t.announcements.last().unwrap(), decoy);
            assert!(t.slot_of(decoy).is_none());
            let got = bb84_reverse_extract(&sender_bits(t), &t.announcements, d, ReverseVariant::A).unwrap();
            assert_eq!(got, message);
            let key = run.sender_key();
            assert_eq!(key, run.receiver_key());
            assert_eq!(key, t.sifted_key_sender);
        }
    }

    #[test]
    fn preparation_ignores_message() {
        let config = DvConfig::new(64).unwrap();
        for variant in [ReverseVariant::A, ReverseVariant::B] {
            let plain = bb84_reverse_run(&config, None, 4, variant, &mut stream_from_seed(77)).unwrap();
            for message in [false, true] {
                let run = bb84_reverse_run(&config, Some(message), 4, variant, &mut stream_from_seed(77)).unwrap();
                assert_eq!(run.transcript.prepared, plain.transcript.prepared);
                assert_eq!(run.transcript.measured, plain.transcript.measured);
            }
        }
    }

    #[test]
    fn zero_displacement_rejected() {
        let config = DvConfig::new(4).unwrap();
        assert!(bb84_reverse_run(&config, Some(true), 0, ReverseVariant::B, &mut stream_from_seed(1)).is_err());
        assert!(bb84_reverse_extract(&[true], &[0], 0, ReverseVariant::B).is_err());
    }
}
