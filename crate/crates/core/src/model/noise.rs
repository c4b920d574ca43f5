use crate::error::{Error, Result};
use crate::qmath::pauli::{self, embed};
use crate::qmath::ComplexMatrix;

const HERMITIAN_TOL: f64 = 1e-12;

/// One dissipative coupling `−Γ[ζ,[ζ,ρ]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel {
    zeta: ComplexMatrix,
    gamma: f64,
    label: String,
}

impl NoiseChannel {
    pub fn new(zeta: ComplexMatrix, gamma: f64, label: impl Into<String>) -> Result<Self> {
        if !zeta.is_square() {
            return Err(Error::DimensionMismatch(format!("noise operator {}x{}", zeta.rows(), zeta.cols())));
        }
        let residual = zeta.hermitian_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NonHermitianInput { residual });
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("noise rate must be finite and >= 0, got {gamma}")));
        }
        Ok(Self { zeta, gamma, label: label.into() })
    }

    pub fn zeta(&self) -> &ComplexMatrix {
        &self.zeta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.zeta.rows()
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.zeta.clone(), gamma, self.label.clone())
    }

    /// `ζ² = 𝟙` within `1e-12`.
    pub fn is_involution(&self) -> bool {
        let sq = &self.zeta * &self.zeta;
        sq.max_abs_diff(&ComplexMatrix::identity(self.dim())) <= HERMITIAN_TOL
    }
}

fn check_site(site: usize, n: usize) -> Result<usize> {
    if site == 0 || site > n {
        return Err(Error::InvalidArgument(format!("site {site} outside 1..={n}")));
    }
    Ok(site - 1)
}

/// `|1⟩⟨1|` on `site` (1-based): bath sees only the left state.
pub fn left_projector_channel(site: usize, n: usize, gamma: f64) -> Result<NoiseChannel> {
    let s = check_site(site, n)?;
    NoiseChannel::new(embed(&pauli::left_projector(), s, n), gamma, format!("P1({site})"))
}

pub fn sigma_x_channel(site: usize, n: usize, gamma: f64) -> Result<NoiseChannel> {
    let s = check_site(site, n)?;
    NoiseChannel::new(embed(&pauli::x(), s, n), gamma, format!("X({site})"))
}

pub fn sigma_z_channel(site: usize, n: usize, gamma: f64) -> Result<NoiseChannel> {
    let s = check_site(site, n)?;
    NoiseChannel::new(embed(&pauli::z(), s, n), gamma, format!("Z({site})"))
}

pub fn identity_channel(n: usize, gamma: f64) -> Result<NoiseChannel> {
    NoiseChannel::new(ComplexMatrix::identity(1 << n), gamma, "I")
}

/// Single-qubit errors of the two-qubit encoding (information qubit first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorOperator {
    /// `σ_x ⊗ 𝟙`
    FlipInfo,
    /// `𝟙 ⊗ σ_x`
    FlipControl,
    /// `σ_z ⊗ 𝟙`
    PhaseInfo,
    /// `𝟙 ⊗ σ_z`
    PhaseControl,
}

impl ErrorOperator {
    pub const ALL: [ErrorOperator; 4] =
        [ErrorOperator::FlipInfo, ErrorOperator::FlipControl, ErrorOperator::PhaseInfo, ErrorOperator::PhaseControl];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            ErrorOperator::FlipInfo => embed(&pauli::x(), 0, 2),
            ErrorOperator::FlipControl => embed(&pauli::x(), 1, 2),
            ErrorOperator::PhaseInfo => embed(&pauli::z(), 0, 2),
            ErrorOperator::PhaseControl => embed(&pauli::z(), 1, 2),
        }
    }

    pub fn channel(self, gamma: f64) -> Result<NoiseChannel> {
        NoiseChannel::new(self.matrix(), gamma, self.name())
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorOperator::FlipInfo => "x1",
            ErrorOperator::FlipControl => "x2",
            ErrorOperator::PhaseInfo => "z1",
            ErrorOperator::PhaseControl => "z2",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

/// Scale every entry; used when Γ is swept on a fixed operator set.
pub fn rescale(channels: &[NoiseChannel], gamma: f64) -> Result<Vec<NoiseChannel>> {
    channels.iter().map(|c| c.with_gamma(gamma)).collect()
}
