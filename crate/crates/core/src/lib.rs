//! Quantum addition circuits: the reversible ripple-carry adder and the
//! Fourier-basis adder (exact and approximate), with a dense state-vector
//! simulator to run them and a time-slice scheduler to measure their depth.
//!
//! Qubit indexing is little-endian throughout: qubit 0 is the `2^0` bit of a
//! basis index.

pub mod adder;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod fourier;
pub mod gates;
pub mod ripple;
pub mod scheduler;
pub mod statevec;

pub use adder::{AddMode, AddOutcome};
pub use circuit::{Circuit, GateCounts, Register, RegisterLayout};
pub use error::{Error, Result};
pub use fourier::Cutoff;
pub use gates::{GateOp, UnitaryMatrix};
pub use scheduler::{Schedule, ScheduleCheck};
pub use statevec::{Amplitude, StateVector};
