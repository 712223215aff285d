use super::QuadratureSetting;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PostSelectStatus {
    Conclusive { bit: bool },
    Inconclusive,
}

/// Post-selected homodyne outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PostSelectOutcome {
    pub status: PostSelectStatus,
    pub raw_value: f64,
}

impl PostSelectOutcome {
    pub fn bit(&self) -> Option<bool> {
        match self.status {
            PostSelectStatus::Conclusive { bit } => Some(bit),
            PostSelectStatus::Inconclusive => None,
        }
    }

    pub fn is_conclusive(&self) -> bool {
        self.bit().is_some()
    }
}

/// Symmetric magnitude threshold. A conclusive `bit` is `true` on the
/// positive side; callers map sides to key bits through their encoding.
pub fn postselect_e4(value: f64, x0: f64) -> PostSelectOutcome {
    debug_assert!(x0 >= 0.0);
    let status = if value.abs() > x0 {
        PostSelectStatus::Conclusive { bit: value > 0.0 }
    } else {
        PostSelectStatus::Inconclusive
    };
    PostSelectOutcome {
        status,
        raw_value: value,
    }
}

/// One-sided rule: `x < −x₀ → 1`, `p < −x₀ → 0`, otherwise inconclusive.
pub fn postselect_b92(value: f64, x0: f64, setting: QuadratureSetting) -> PostSelectOutcome {
    debug_assert!(x0 >= 0.0);
    let status = if value < -x0 {
        PostSelectStatus::Conclusive {
            bit: setting == QuadratureSetting::Position,
        }
    } else {
        PostSelectStatus::Inconclusive
    };
    PostSelectOutcome {
        status,
        raw_value: value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e4_threshold() {
        assert_eq!(postselect_e4(0.3, 0.5).status, PostSelectStatus::Inconclusive);
        assert_eq!(postselect_e4(1.2, 0.5).bit(), Some(true));
        assert_eq!(postselect_e4(-1.2, 0.5).bit(), Some(false));
        assert_eq!(postselect_e4(0.5, 0.5).bit(), None);
        assert_eq!(postselect_e4(-0.3, 0.5).raw_value, -0.3);
    }

    #[test]
    fn b92_rule() {
        use QuadratureSetting::*;
        assert_eq!(postselect_b92(-0.8, 0.5, Position).bit(), Some(true));
        assert_eq!(postselect_b92(-0.8, 0.5, Momentum).bit(), Some(false));
        assert_eq!(postselect_b92(0.8, 0.5, Position).bit(), None);
        assert_eq!(postselect_b92(0.8, 0.5, Momentum).bit(), None);
        assert_eq!(postselect_b92(-0.5, 0.5, Position).bit(), None);
    }
}
