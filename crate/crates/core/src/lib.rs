//! Exact state-vector simulation of weak-measurement feed-forward protection
//! through an amplitude-damping channel, and of the protocols built on it:
//! Bell-pair generation, W-type state generation via economical cloning, and
//! teleportation of one of two non-orthogonal states.
//!
//! Registers are small (at most five qubits), so everything is dense and
//! exact; the jump / no-jump unraveling is enumerated, never sampled.
//!
//! ```
//! use qsim::channels::protect_unknown_qubit;
//! use qsim::qstate::cr;
//!
//! let h = std::f64::consts::FRAC_1_SQRT_2;
//! let report = protect_unknown_qubit(cr(h), cr(h), 0.8, std::f64::consts::LN_2).unwrap();
//! assert!((report.probabilities["success_path_prob"] - 0.1).abs() < 1e-12);
//! assert!(report.target_fidelity > 1.0 - 1e-12);
//! ```

pub mod channels;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod output;
pub mod protocols;
pub mod qstate;
pub mod report;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use report::{NormalizationMode, ProtocolReport};
