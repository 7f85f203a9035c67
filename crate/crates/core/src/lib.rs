//! Two distant two-level atoms with an effective Ising coupling, local
//! driving, spontaneous decay and homodyne-mediated feedback.
//!
//! The crate covers the coherent dynamics of the pair, the stationary states
//! of the open system with and without feedback, Wootters concurrence, and
//! the maximization of stationary concurrence over the feedback strength.
//!
//! All rates are in units of the atomic decay rate (γ = 1).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod entanglement;
pub mod error;
pub mod hamiltonian;
pub mod master_equation;
pub mod optimizer;
pub mod validation;

pub use algebra::{Operator, StateVector, Superoperator};
pub use entanglement::{concurrence, concurrence_pure, ConcurrenceResult};
pub use error::{Error, Result};
pub use hamiltonian::ModelParams;
pub use master_equation::DensityMatrix;
pub use optimizer::{OptimizationConfig, ScanRecord};
