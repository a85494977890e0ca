//! Stabilizer entropy of t-doped Clifford circuits, the cleansing map that
//! localizes their magic, and stabilizer-proxy bounds on subsystem purity.
//!
//! Logarithms are base 2 throughout.

pub mod circuit;
pub mod dense;
pub mod doped;
pub mod error;
pub mod gf2;
pub mod moments;
pub mod pauli;
pub mod phase;
pub mod protocol;
pub mod rng;
pub mod stabilizer;
pub mod tableau;

pub use circuit::{Circuit, Gate};
pub use error::{Error, Result};
pub use pauli::{Pauli1, PauliString, Region};
pub use stabilizer::{Dyadic, StabilizerMixedState};
pub use tableau::CliffordTableau;
