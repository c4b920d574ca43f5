use super::eigen::hermitian_eigenvalues;
use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-8;
pub const NORM_TOL: f64 = 1e-12;

/// Normalised state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
}

impl PureState {
    /// Accepts amplitudes whose norm² is 1 within `1e-12`.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if amps.is_empty() || (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amps })
    }

    /// Rescales to unit norm; fails only for the zero vector.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if amps.is_empty() || norm_sq == 0.0 || !norm_sq.is_finite() {
            return Err(Error::NotNormalized { norm_sq });
        }
        let inv = 1.0 / norm_sq.sqrt();
        amps.iter_mut().for_each(|a| *a *= inv);
        Ok(Self { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `|index⟩` in a `dim`-dimensional space.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range {dim}");
        let mut amps = vec![ZERO; dim];
        amps[index] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        PureState { amps }
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amps, &self.amps)
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

/// Deviations of a matrix from the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub hermitian_residual: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn of(m: &ComplexMatrix) -> Result<Self> {
        let hermitian_residual = m.hermitian_residual();
        let mut sym = m.clone();
        sym.symmetrize_in_place();
        let min_eigenvalue = hermitian_eigenvalues(&sym)?.first().copied().unwrap_or(0.0);
        Ok(Self { hermitian_residual, trace_error: (m.trace().re - 1.0).abs(), min_eigenvalue })
    }

    pub fn check(&self) -> Result<()> {
        if self.hermitian_residual > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("Hermiticity residual {:.3e}", self.hermitian_residual)));
        }
        if self.trace_error > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace error {:.3e}", self.trace_error)));
        }
        if self.min_eigenvalue < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {:.3e}", self.min_eigenvalue)));
        }
        Ok(())
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity at the crate tolerances.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        StateDiagnostics::of(&matrix)?.check()?;
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is Hermitian by construction (integrator output).
    /// Trace and positivity are left to the caller's diagnostics.
    pub(crate) fn from_hermitian_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { matrix: psi.projector() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    /// Diagonal state from real populations; they must sum to one.
    pub fn from_populations(p: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(p))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn diagnostics(&self) -> Result<StateDiagnostics> {
        StateDiagnostics::of(&self.matrix)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_of(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!("state dim {} vs ρ dim {}", psi.dim(), self.dim())));
        }
        Ok(self.matrix.expectation(psi.amplitudes(), psi.amplitudes()).re)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self { matrix: super::matrix::kron(&self.matrix, &other.matrix) }
    }
}

/// Partial trace of an arbitrary square matrix over a tensor-product space.
///
/// `dims` lists every factor's dimension, leftmost first. `keep` holds the
/// zero-based positions of the factors to keep; order of kept factors in the
/// result follows `dims`.
pub fn partial_trace_matrix(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || !m.is_square() || m.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "factor dims {dims:?} (product {total}) vs matrix {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::DimensionMismatch(format!("kept factor {k} out of {} factors", dims.len())));
        }
        kept[k] = true;
    }
    let kept_dims: Vec<usize> = dims.iter().zip(&kept).filter(|(_, &k)| k).map(|(&d, _)| d).collect();
    let out_dim: usize = kept_dims.iter().product();

    // Split every full index into (kept index, traced index).
    let split: Vec<(usize, usize)> = (0..total)
        .map(|idx| {
            let mut rem = idx;
            let mut digits = vec![0; dims.len()];
            for f in (0..dims.len()).rev() {
                digits[f] = rem % dims[f];
                rem /= dims[f];
            }
            let (mut ki, mut ti) = (0, 0);
            for f in 0..dims.len() {
                if kept[f] {
                    ki = ki * dims[f] + digits[f];
                } else {
                    ti = ti * dims[f] + digits[f];
                }
            }
            (ki, ti)
        })
        .collect();

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for i in 0..total {
        let (ki, ti) = split[i];
        for j in 0..total {
            let (kj, tj) = split[j];
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Reduced density matrix on the factors listed in `keep` (zero-based).
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    partial_trace_matrix(rho.matrix(), dims, keep).map(DensityMatrix::from_hermitian_unchecked)
}
