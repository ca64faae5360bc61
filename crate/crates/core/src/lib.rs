//! Entanglement decay of three-qubit GHZ and W states sent through Pauli and
//! depolarizing noise.

pub mod acceptance;
pub mod channels;
pub mod cli;
pub mod convexroof;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod qsys;
pub mod separability;

pub use error::{Error, Result};
