//! Simulation and numerical verification of a quantum-public-key
//! identification scheme built on bounded phase reference frames.
//!
//! Alice's private key is a tuple of phases `2πk/p`; the public key is a
//! bounded number of copies of `|0⟩ + e^{2πik/p}|1⟩`. Bob checks Alice with
//! an entangled challenge, a phase-basis measurement on her side and a SWAP
//! test on his. The [`adversary`] module computes the optimal cheating
//! probability of an impostor holding `t` key copies, and [`bounds`] turns
//! it into protocol-level break probabilities.

pub mod adversary;
pub mod binomial;
pub mod bounds;
pub mod error;
pub mod keys;
pub mod numfmt;
pub mod protocol;
pub mod qsim;
pub mod seed;
pub mod tolerance;
pub mod transport;

pub use error::{Error, Result};
