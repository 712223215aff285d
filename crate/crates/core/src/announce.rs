//! Ordering of public announcements, with and without a hidden bit.
//!
//! The reverse-communication layers all hide their bit the same way: the
//! announcing party publishes its usable positions as a random permutation
//! whose `d`-th entry carries a key bit equal to the message.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::{Error, Result};

/// Maps a 1-based displacement onto `1..=n` by wrapping: `((d − 1) mod n) + 1`.
pub fn wrap_displacement(d: usize, n: usize) -> usize {
    debug_assert!(d >= 1 && n >= 1);
    (d - 1) % n + 1
}

/// Uniform permutation of `0..n`.
pub fn random_order<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// Uniform permutation of `0..bits.len()` conditioned on the entry in slot
/// `d` (1-based, wrapped) pointing at an index whose bit equals `message`.
pub fn stego_order<R: Rng + ?Sized>(bits: &[bool], message: bool, d: usize, rng: &mut R) -> Result<Vec<usize>> {
    if bits.is_empty() {
        return Err(Error::EmbeddingFailure("nothing to announce"));
    }
    if d == 0 {
        return Err(Error::param("d", "displacement is 1-based"));
    }
    let slot = wrap_displacement(d, bits.len()) - 1;
    let candidates: Vec<usize> = (0..bits.len()).filter(|&i| bits[i] == message).collect();
    let chosen = *candidates
        .get(rng.random_range(0..candidates.len().max(1)))
        .ok_or(Error::EmbeddingFailure("no announceable position carries the message bit"))?;
    let mut rest: Vec<usize> = (0..bits.len()).filter(|&i| i != chosen).collect();
    rest.shuffle(rng);
    rest.insert(slot, chosen);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_from_seed;

    #[test]
    fn wrapping() {
        assert_eq!(wrap_displacement(1, 5), 1);
        assert_eq!(wrap_displacement(5, 5), 5);
        assert_eq!(wrap_displacement(6, 5), 1);
        assert_eq!(wrap_displacement(13, 1), 1);
    }

    #[test]
    fn stego_slot_carries_message() {
        let mut rng = stream_from_seed(3);
        let bits = [true, false, false, true, false];
        for d in 1..12 {
            for message in [false, true] {
                let order = stego_order(&bits, message, d, &mut rng).unwrap();
                let mut sorted = order.clone();
                sorted.sort();
                assert_eq!(sorted, (0..5).collect::<Vec<_>>());
                assert_eq!(bits[order[wrap_displacement(d, 5) - 1]], message);
            }
        }
    }

    #[test]
    fn missing_bit_value_fails() {
        let mut rng = stream_from_seed(3);
        assert!(matches!(
            stego_order(&[false, false], true, 1, &mut rng),
            Err(Error::EmbeddingFailure(_))
        ));
        assert!(stego_order(&[], true, 1, &mut rng).is_err());
    }
}
