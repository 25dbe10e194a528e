//! One-shot classical data compression with quantum side information and
//! one-way secret-key distillation, simulated exactly on small
//! classical-quantum states.
//!
//! The crate is organised bottom-up:
//!
//! * [`quantum`]: states, partial traces, fidelities, cq states, purifications.
//! * [`sdp`]: a small primal-dual interior-point solver for Hermitian LMIs.
//! * [`entropy`]: conditional min-/max-entropies and their smoothed versions.
//! * [`hashing`]: 2-universal linear hash families over GF(2).
//! * [`coding`]: hash-and-PGM compression with quantum side information.
//! * [`distill`]: privacy amplification and key distillation.
//! * [`harness`]: state generators and the verification suites.
//!
//! Logarithms are base 2 throughout.

pub mod coding;
pub mod distill;
pub mod entropy;
pub mod error;
pub mod harness;
pub mod hashing;
pub mod linalg;
pub mod quantum;
pub mod sdp;

pub use error::{Error, Result};
