//! Simulation of coupled double-well two-level systems driven through
//! avoided level crossings.
//!
//! The crate is organised bottom-up:
//!
//! * [`qmath`] dense complex matrices, Hermitian eigensolver, partial traces.
//! * [`model`] Hamiltonian, noise-operator and bias-schedule builders.
//! * [`dynamics`] fixed-step integration of closed, dissipative and
//!   hot-bath (sector-stacked) master equations.
//! * [`measures`] entanglement and overlap diagnostics.
//! * [`spectra`] level diagrams, avoided-crossing location and
//!   adiabaticity parameters.
//! * [`protocols`] end-to-end experiment runners.
//!
//! Sweeps over independent parameter points fan out through [`par`], which
//! uses rayon when the `parallel` feature is enabled (the default) and falls
//! back to a sequential loop otherwise. Output order never depends on the
//! execution mode.

// `!(x > 0.0)` style checks are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod measures;
pub mod model;
pub mod par;
pub mod protocols;
pub mod qmath;
pub mod spectra;

pub use error::{Error, Result};
pub use qmath::{ComplexMatrix, DensityMatrix, PureState, C64};
