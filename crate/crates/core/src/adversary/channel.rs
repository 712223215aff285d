use alloc::format;

use rand::Rng;

use crate::qstate::Bb84Label;
use crate::{Error, Result};

/// Per-symbol channel acting on BB84 signals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ChannelModel {
    #[default]
    Lossless,
    /// Replaces the signal by its orthogonal partner with `flip_probability`,
    /// so matched-basis measurements err at exactly that rate.
    Depolarizing { flip_probability: f64 },
}

impl ChannelModel {
    pub fn depolarizing(flip_probability: f64) -> Result<Self> {
        let c = ChannelModel::Depolarizing { flip_probability };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelModel::Lossless => Ok(()),
            ChannelModel::Depolarizing { flip_probability: q } if (0.0..=1.0).contains(&q) => Ok(()),
            ChannelModel::Depolarizing { flip_probability: q } => {
                Err(Error::param("flip_probability", format!("{q} outside [0, 1]")))
            }
        }
    }

    pub fn transmit<R: Rng + ?Sized>(&self, symbol: Bb84Label, rng: &mut R) -> Bb84Label {
        match *self {
            ChannelModel::Lossless => symbol,
            ChannelModel::Depolarizing { flip_probability } => {
                if rng.random::<f64>() < flip_probability {
                    symbol.flipped()
                } else {
                    symbol
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_from_seed;

    #[test]
    fn flip_rate_and_validation() {
        assert!(ChannelModel::depolarizing(1.5).is_err());
        let c = ChannelModel::depolarizing(0.25).unwrap();
        let mut rng = stream_from_seed(1);
        let flips = (0..100_000)
            .filter(|_| c.transmit(Bb84Label::Plus, &mut rng) == Bb84Label::Minus)
            .count();
        assert!((flips as f64 / 1e5 - 0.25).abs() < 0.005);
        assert_eq!(ChannelModel::Lossless.transmit(Bb84Label::One, &mut rng), Bb84Label::One);
    }
}
