use alloc::format;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use super::bb84::{bb84_run, DvConfig, Preparation, Transcript};
use crate::{Error, Result};

/// Displacement for the next run: `(p mod m) + 1`, or 1 when there was no
/// previous run.
pub fn displacement_next(previous_key_length: Option<usize>, m: usize) -> usize {
    debug_assert!(m >= 1);
    match previous_key_length {
        None => 1,
        Some(p) => p % m.max(1) + 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StegoPlanDirect {
    pub message_bit: bool,
    pub displacement: usize,
    /// Total check bits announced; the last one is the positioned pointer.
    pub check_count: usize,
}

impl StegoPlanDirect {
    pub fn new(message_bit: bool, displacement: usize, check_count: usize) -> Result<Self> {
        if displacement == 0 {
            return Err(Error::param("displacement", "must be at least 1"));
        }
        if check_count == 0 {
            return Err(Error::param("check_count", "must be at least 1"));
        }
        Ok(StegoPlanDirect {
            message_bit,
            displacement,
            check_count,
        })
    }
}

/// Chooses a stego slot carrying `plan.message_bit`, announces
/// `check_count − 1` random check positions and then the pointer check
/// `displacement` sifted slots to its left.
///
/// The returned announcement lists transmission positions in order.
pub fn mqs_embed_direct<R: Rng + ?Sized>(
    transcript: &Transcript,
    plan: &StegoPlanDirect,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if transcript.aborted {
        return Err(Error::Protocol("cannot embed into an aborted run".into()));
    }
    let n = transcript.sift_len();
    let d = plan.displacement;
    if d == 0 {
        return Err(Error::param("displacement", "must be at least 1"));
    }
    if plan.check_count + 1 > n {
        return Err(Error::Protocol(format!(
            "{} checks and a stego bit do not fit in {} sifted slots",
            plan.check_count, n
        )));
    }
    let candidates: Vec<usize> = (d..n)
        .filter(|&s| transcript.sifted_key_sender[s] == plan.message_bit)
        .collect();
    if candidates.is_empty() {
        return Err(Error::EmbeddingFailure("no sifted slot carries the message bit at this displacement"));
    }
    let stego = candidates[rng.random_range(0..candidates.len())];
    let pointer = stego - d;

    let pool: Vec<usize> = (0..n).filter(|&s| s != stego && s != pointer).collect();
    let mut announced: Vec<usize> = index::sample(rng, pool.len(), plan.check_count - 1)
        .into_iter()
        .map(|i| transcript.sift_positions[pool[i]])
        .collect();
    announced.push(transcript.sift_positions[pointer]);
    Ok(announced)
}

/// Reads the receiver's sifted bit `d` slots to the right of the last
/// announced check position.
pub fn mqs_extract_direct(transcript: &Transcript, announcements: &[usize], d: usize) -> Result<bool> {
    let last = *announcements
        .last()
        .ok_or_else(|| Error::Protocol("empty announcement".into()))?;
    let slot = transcript
        .slot_of(last)
        .ok_or_else(|| Error::Protocol(format!("announced position {last} is not sifted")))?;
    transcript
        .sifted_key_receiver
        .get(slot + d)
        .copied()
        .ok_or_else(|| Error::Protocol(format!("slot {} is past the sifted key", slot + d)))
}

/// Error rate over the announced checks, and whether it exceeds
/// `abort_qber`.
pub fn qber_check(transcript: &Transcript, announcements: &[usize], abort_qber: f64) -> Result<(f64, bool)> {
    if announcements.is_empty() {
        return Err(Error::Protocol("no check positions announced".into()));
    }
    let mut errors = 0usize;
    for &pos in announcements {
        let slot = transcript
            .slot_of(pos)
            .ok_or_else(|| Error::Protocol(format!("announced position {pos} is not sifted")))?;
        if transcript.sifted_key_sender[slot] != transcript.sifted_key_receiver[slot] {
            errors += 1;
        }
    }
    let qber = errors as f64 / announcements.len() as f64;
    Ok((qber, qber > abort_qber))
}

/// Sender and receiver keys: the sifted keys with every check slot removed.
pub fn final_key(transcript: &Transcript) -> (Vec<bool>, Vec<bool>) {
    let keep = |slot: &usize| transcript.check_positions.binary_search(&transcript.sift_positions[*slot]).is_err();
    let slots: Vec<usize> = (0..transcript.sift_len()).filter(keep).collect();
    (
        slots.iter().map(|&s| transcript.sifted_key_sender[s]).collect(),
        slots.iter().map(|&s| transcript.sifted_key_receiver[s]).collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct MqsOutcome {
    /// Transcript with announcements, checks and error rate filled in.
    pub transcript: Transcript,
    pub message_bit: bool,
    /// `None` when too few positions survived sifting to embed.
    pub recovered_bit: Option<bool>,
}

impl MqsOutcome {
    /// Whether the run stopped at sifting, before any announcement.
    pub fn sift_aborted(&self) -> bool {
        self.recovered_bit.is_none()
    }
}

/// One full direct-embedding run: transmit, sift, announce `m` checks with
/// the pointer last, compare them and extract.
///
/// Runs aborted at sifting come back with no recovered bit and no checks.
/// Runs aborted by the error-rate check still carry their recovered bit,
/// with `transcript.aborted` set.
pub fn mqs_run<R: Rng + ?Sized>(config: &DvConfig, message_bit: bool, d: usize, rng: &mut R) -> Result<MqsOutcome> {
    let mut transcript = bb84_run(config, &Preparation::Uniform, rng)?;
    if transcript.aborted {
        return Ok(MqsOutcome {
            transcript,
            message_bit,
            recovered_bit: None,
        });
    }
    let plan = StegoPlanDirect::new(message_bit, d, config.m)?;
    let announcements = mqs_embed_direct(&transcript, &plan, rng)?;
    let (qber, abort) = qber_check(&transcript, &announcements, config.abort_qber)?;
    let recovered_bit = mqs_extract_direct(&transcript, &announcements, d)?;

    let mut checks = announcements.clone();
    checks.sort_unstable();
    transcript.check_positions = checks;
    transcript.announcements = announcements;
    transcript.qber = Some(qber);
    transcript.aborted = abort;
    Ok(MqsOutcome {
        transcript,
        message_bit,
        recovered_bit: Some(recovered_bit),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::ChannelModel;
    use crate::seed::stream_from_seed;

    #[test]
    fn displacement_rule() {
        assert_eq!(displacement_next(None, 5), 1);
        assert_eq!(displacement_next(Some(7), 5), 3);
        assert_eq!(displacement_next(Some(10), 5), 1);
    }

    #[test]
    fn pointer_sits_d_slots_left_of_stego() {
        let config = DvConfig::new(64).unwrap();
        let mut rng = stream_from_seed(11);
        let t = bb84_run(&config, &Preparation::Uniform, &mut rng).unwrap();
        let plan = StegoPlanDirect::new(false, 3, 64).unwrap();
        let ann = mqs_embed_direct(&t, &plan, &mut rng).unwrap();
        assert_eq!(ann.len(), 64);
        let pointer = t.slot_of(*ann.last().unwrap()).unwrap();
        let stego = pointer + 3;
        assert!(!t.sifted_key_sender[stego]);
        assert!(!ann.contains(&t.sift_positions[stego]));
        let mut dedup = ann.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), ann.len());
    }

    #[test]
    fn noiseless_roundtrip_and_checks() {
        let config = DvConfig::new(32).unwrap();
        let mut rng = stream_from_seed(5);
        for i in 0..200 {
            let message = i % 3 == 0;
            let d = displacement_next(Some(i), config.m);
            let out = mqs_run(&config, message, d, &mut rng).unwrap();
            assert_eq!(out.recovered_bit, Some(message));
            assert_eq!(out.transcript.qber, Some(0.0));
            assert!(!out.transcript.aborted);
            let (a, b) = final_key(&out.transcript);
            assert_eq!(a, b);
            assert_eq!(a.len(), out.transcript.sift_len() - config.m);
        }
    }

    #[test]
    fn flipped_checks_abort() {
        let config = DvConfig::new(16).unwrap();
        let mut rng = stream_from_seed(2);
        let mut t = bb84_run(&config, &Preparation::Uniform, &mut rng).unwrap();
        for b in t.sifted_key_receiver.iter_mut() {
            *b = !*b;
        }
        let ann: Vec<usize> = t.sift_positions[..16].to_vec();
        assert_eq!(qber_check(&t, &ann, 0.11).unwrap(), (1.0, true));
        assert!(qber_check(&t, &[], 0.11).is_err());
    }

    #[test]
    fn depolarized_stego_bit_errs_at_channel_rate() {
        let config = DvConfig::new(16).unwrap().with_channel(ChannelModel::depolarizing(0.25).unwrap());
        let mut rng = stream_from_seed(8);
        let runs = 2000;
        let wrong = (0..runs)
            .filter(|i| {
                let out = mqs_run(&config, i % 2 == 0, 2, &mut rng).unwrap();
                out.recovered_bit != Some(out.message_bit)
            })
            .count();
        let rate = wrong as f64 / runs as f64;
        assert!((rate - 0.25).abs() < 0.04, "{rate}");
    }

    #[test]
    fn bad_plans_rejected() {
        assert!(StegoPlanDirect::new(true, 0, 4).is_err());
        let config = DvConfig::new(4).unwrap();
        let mut rng = stream_from_seed(2);
        let t = bb84_run(&config, &Preparation::Uniform, &mut rng).unwrap();
        let plan = StegoPlanDirect::new(true, 1, t.sift_len()).unwrap();
        assert!(mqs_embed_direct(&t, &plan, &mut rng).is_err());
        assert!(mqs_extract_direct(&t, &[], 1).is_err());
    }
}
