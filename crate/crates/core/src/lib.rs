//! Hybrid training engine for variational quantum circuits built from a
//! hardware-efficient block followed by a block of Pauli rotations drawn
//! from a polynomial-size dynamical Lie algebra (DLA).
//!
//! Gradients of the first block come from the parameter-shift rule on a
//! simulated quantum backend; gradients of the second block come from a
//! classical Heisenberg-picture simulation in the DLA basis, fed by measured
//! expectation values of the basis elements. Every quantum-circuit
//! evaluation is counted.

pub mod backend;
pub mod bench;
pub mod dla;
pub mod error;
pub mod gsim;
pub mod models;
pub mod pauli;
pub mod training;

pub use error::{Error, Result};
