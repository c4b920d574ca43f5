//! Dense complex linear algebra and quantum-state primitives.

mod eigen;
mod matrix;
pub mod pauli;
mod state;

pub use eigen::{hermitian_eigensystem, hermitian_eigenvalues, Eigensystem};
pub use matrix::{commutator, double_commutator, kron, kron_all, sandwich, ComplexMatrix, C64};
pub(crate) use matrix::{matmul_into, ZERO};
pub use state::{
    partial_trace, partial_trace_matrix, DensityMatrix, PureState, StateDiagnostics, HERMITIAN_TOL, NORM_TOL,
    POSITIVITY_TOL, TRACE_TOL,
};

/// Spectral spread `E_max − E_min` of a Hermitian matrix.
pub fn spectral_spread(h: &ComplexMatrix) -> crate::Result<f64> {
    let ev = hermitian_eigenvalues(h)?;
    Ok(ev.last().copied().unwrap_or(0.0) - ev.first().copied().unwrap_or(0.0))
}
