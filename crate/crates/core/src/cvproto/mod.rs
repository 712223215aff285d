//! Discrete-modulation continuous-variable protocols and the
//! reverse-announcement stego layer over their conclusive results.
//!
//! Every protocol runs through one engine: per signal the sender draws a
//! state, the receiver draws a quadrature and a homodyne value, the sender
//! confirms whether that quadrature carries a bit for that state, and the
//! receiver post-selects. Randomness is consumed in that fixed order.

mod efficiency;
mod engine;
mod protocol;

pub use efficiency::{efficiency_measure, n_state_formula, EfficiencyReport, TableRow, EFFICIENCY_TABLE};
pub use engine::{
    cv_bb84_pascs_run, cv_run, cvb92_run, e4_run, n_state_run, o4_run, reverse_embed_cv, reverse_extract_cv,
    CvEngine, CvTranscript,
};
pub use protocol::{CvProtocol, CvProtocolSpec, SignalState, StateEncoding};
