//! Discrete-variable engine: BB84 transmission and sifting, the direct
//! check-bit stego layer, and reverse-announcement embedding.
//!
//! Positions in announcements are indices into the transmitted sequence;
//! displacements in the check-bit layer count sifted slots.

mod bb84;
mod mqs;
mod reverse;

pub use bb84::{bb84_run, bb84_run_with_eve, default_delta, DvConfig, Preparation, Transcript};
pub use mqs::{
    displacement_next, final_key, mqs_embed_direct, mqs_extract_direct, mqs_run, qber_check, MqsOutcome,
    StegoPlanDirect,
};
pub use reverse::{bb84_reverse_extract, bb84_reverse_run, bb84_reverse_run_with_eve, ReverseRun, ReverseVariant};
