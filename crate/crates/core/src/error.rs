use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NonHermitianInput { residual: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("state is not normalized (norm² = {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("step too large: {0}")]
    StepTooLarge(String),
    #[error("degenerate level at t = {t}: gap {gap:.3e}")]
    DegenerateLevel { t: f64, gap: f64 },
    #[error("no avoided crossing between levels {lower} and {upper} on the sampled range")]
    NoMinimumFound { lower: usize, upper: usize },
    #[error("resonance gap {gap:.3e} too small to define an adiabaticity parameter")]
    DegenerateGap { gap: f64 },
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// True for failures of the numerical integration itself (as opposed to
    /// bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::StepTooLarge(_)
                | Error::InvalidState(_)
                | Error::DegenerateLevel { .. }
                | Error::DegenerateGap { .. }
                | Error::NoMinimumFound { .. }
        )
    }
}
