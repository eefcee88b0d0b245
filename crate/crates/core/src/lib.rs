//! Deterministic incoherent dictionaries over the prime field F_p.
//!
//! The Heisenberg dictionary comes from eigenbases of `π(l)` for the `p + 1`
//! lines of the plane; the oscillator dictionaries from eigenbases of Weil
//! operators `ρ(t)` for the maximal tori of `SL₂(F_p)`. The crate builds them as
//! explicit atoms, audits their coherence, and runs sparse recovery on them.

pub mod analysis;
pub mod cli;
pub mod dictionary;
pub mod error;
pub mod ff;
pub mod heisenberg;
pub mod io;
pub mod linalg;
pub mod selftest;
pub mod sparse;
pub mod symplectic;
pub mod weil;

pub use error::{Error, Result};
