//! Pauli-frame Monte Carlo simulation of fault-tolerant error correction
//! with the [[7,1,3]] Steane code.
//!
//! The crate tracks only the Pauli error accumulated on a register (the
//! "frame"), never the quantum state. Clifford gates conjugate the frame,
//! stochastic faults multiply onto it, and measurement outcomes reduce to
//! whether the frame anticommutes with the measured observable.

pub mod ancilla;
pub mod circuit;
pub mod code;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod pauli;
pub mod recovery;
pub mod sweep;

pub use ancilla::{AncillaKind, OnExhaust, SyndromeExtractor, VerificationPolicy};
pub use circuit::{Circuit, ErrorModel, Gate};
pub use code::{ErrorClass, Syndrome};
pub use error::Error;
pub use experiment::{Encoding, Estimate, Experiment, MetricsPoint, TrialConfig};
pub use pauli::{Pauli, PauliMask};
pub use recovery::{Recovery, RecoveryConfig};
