//! Simulation core for QKD-embedded steganography.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation: qubit ensembles and minimum-error discrimination
//! ([`qstate`]), truncated number-basis states and homodyne sampling
//! ([`cv`]), discrete-variable BB84 runs with the check-bit stego layer
//! ([`dv`]), discrete-modulation CV protocols with reverse-announcement
//! embedding ([`cvproto`]), and the eavesdropper / steganalysis detector
//! ([`adversary`]).
//!
//! Every randomized operation takes an explicit `&mut R: Rng` stream, so a
//! run is a deterministic function of its seed. [`seed::derive_stream`]
//! gives independent per-trial streams for Monte Carlo sweeps.

#![no_std]
#![forbid(unsafe_code)]
// std provides the float methods inherently when linked, leaving `Float` imports unused.

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod adversary;
pub mod announce;
pub mod cv;
pub mod cvproto;
pub mod dv;
mod error;
pub mod qstate;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
