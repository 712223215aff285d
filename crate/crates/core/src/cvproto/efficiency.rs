use alloc::string::String;

use rand::Rng;

use super::engine::CvEngine;
use super::protocol::{CvProtocol, CvProtocolSpec};
use crate::{Error, Result};

/// Reference efficiencies: protocol label, state count, efficiency.
pub const EFFICIENCY_TABLE: [TableRow; 5] = [
    TableRow { label: "O4", states: 4, efficiency: 0.5 },
    TableRow { label: "E4", states: 4, efficiency: 1.0 },
    TableRow { label: "Three-state", states: 3, efficiency: 2.0 / 3.0 },
    TableRow { label: "Six-state", states: 6, efficiency: 2.0 / 3.0 },
    TableRow { label: "Eight-state", states: 8, efficiency: 0.75 },
];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TableRow {
    pub label: &'static str,
    pub states: usize,
    pub efficiency: f64,
}

/// Closed-form N-state efficiency `(2+N)/(2+2N)`.
pub fn n_state_formula(n: usize) -> f64 {
    (2.0 + n as f64) / (2.0 + 2.0 * n as f64)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EfficiencyReport {
    pub protocol: String,
    /// Reference value where the table lists this protocol.
    pub analytic_pe: Option<f64>,
    /// `(2+N)/(2+2N)` for generic N-state specs.
    pub formula_pe: Option<f64>,
    /// Fraction of signals whose quadrature the sender confirmed.
    pub empirical_pe: f64,
    pub trials: u64,
    pub conclusive_fraction: f64,
    pub bit_error_rate: Option<f64>,
}

/// Runs `trials` signals of `spec` and counts basis confirmations.
/// Post-selection losses are reported separately and do not lower
/// `empirical_pe`.
pub fn efficiency_measure<R: Rng + ?Sized>(spec: &CvProtocolSpec, trials: usize, rng: &mut R) -> Result<EfficiencyReport> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let mut spec = spec.clone();
    spec.n_signals = trials;
    let analytic_pe = match spec.protocol {
        CvProtocol::O4 => Some(EFFICIENCY_TABLE[0].efficiency),
        CvProtocol::E4 => Some(EFFICIENCY_TABLE[1].efficiency),
        _ => None,
    };
    let formula_pe = (spec.protocol == CvProtocol::NState).then(|| n_state_formula(spec.states.len()));
    let t = CvEngine::new(spec.clone())?.run(rng);
    Ok(EfficiencyReport {
        protocol: spec.label(),
        analytic_pe,
        formula_pe,
        empirical_pe: t.confirmed_fraction(),
        trials: trials as u64,
        conclusive_fraction: t.conclusive_fraction(),
        bit_error_rate: t.bit_error_rate(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_from_seed;

    #[test]
    fn formula_values() {
        assert_eq!(n_state_formula(4), 0.6);
        assert!((n_state_formula(2) - 2.0 / 3.0).abs() < 1e-15);
        assert!((n_state_formula(1) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn measured_efficiencies() {
        let mut rng = stream_from_seed(12);
        let e4 = efficiency_measure(&CvProtocolSpec::e4(0.8, 0.4, 1).unwrap(), 10_000, &mut rng).unwrap();
        assert_eq!(e4.empirical_pe, 1.0);
        assert_eq!(e4.analytic_pe, Some(1.0));
        let o4 = efficiency_measure(&CvProtocolSpec::o4(0.8, 0.4, 1).unwrap(), 100_000, &mut rng).unwrap();
        assert!((o4.empirical_pe - 0.5).abs() < 0.01);
        let b92 = efficiency_measure(&CvProtocolSpec::cvb92(1.2, 0.6, 1).unwrap(), 1000, &mut rng).unwrap();
        assert_eq!(b92.empirical_pe, 1.0);
        let o4_states = CvProtocolSpec::o4(0.8, 0.4, 1).unwrap().states;
        let generic = efficiency_measure(&CvProtocolSpec::n_state(o4_states, 0.8, 0.4, 1).unwrap(), 1000, &mut rng).unwrap();
        assert_eq!(generic.formula_pe, Some(0.6));
        assert!(efficiency_measure(&CvProtocolSpec::e4(0.8, 0.4, 1).unwrap(), 0, &mut rng).is_err());
    }
}
