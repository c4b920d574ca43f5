use crate::error::{Error, Result};
use crate::qmath::pauli::{self, embed, embed_pair};
use crate::qmath::{ComplexMatrix, C64};

use super::hamiltonians::AffineFamily;

/// Within-well excitation levels, each with its own tunnelling and coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct VerticalLevels {
    omegas: Vec<f64>,
    lambdas: Vec<Vec<f64>>,
    pub gamma: f64,
}

impl VerticalLevels {
    pub fn new(omegas: Vec<f64>, lambdas: Vec<Vec<f64>>, gamma: f64) -> Result<Self> {
        let n = omegas.len();
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one vertical level".into()));
        }
        if lambdas.len() != n || lambdas.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("coupling table must be {n}x{n}")));
        }
        for (i, row) in lambdas.iter().enumerate() {
            for (j, &l) in row.iter().enumerate() {
                if l != lambdas[j][i] {
                    return Err(Error::InvalidArgument(format!("coupling table not symmetric at ({i},{j})")));
                }
            }
        }
        if omegas.iter().chain(lambdas.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite level parameter".into()));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("flip rate must be finite and >= 0, got {gamma}")));
        }
        Ok(Self { omegas, lambdas, gamma })
    }

    /// `λ(E_i, E_j) = scale·√(ω(E_i)ω(E_j))`.
    pub fn geometric(omegas: Vec<f64>, scale: f64, gamma: f64) -> Result<Self> {
        let lambdas = omegas.iter().map(|&a| omegas.iter().map(|&b| scale * (a * b).sqrt()).collect()).collect();
        Self::new(omegas, lambdas, gamma)
    }

    pub fn n_levels(&self) -> usize {
        self.omegas.len()
    }

    pub fn omega_of(&self, level: usize) -> f64 {
        self.omegas[level]
    }

    pub fn lambda_of(&self, a: usize, b: usize) -> f64 {
        self.lambdas[a][b]
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.omegas.clone(), self.lambdas.clone(), gamma)
    }

    /// Horizontal Hamiltonian of the sector where particle `i` sits on level `v[i]`.
    pub fn sector_family(&self, v: &[usize]) -> AffineFamily {
        let n = v.len();
        let dim = 1usize << n;
        let mut base = ComplexMatrix::zeros(dim, dim);
        let mut slope = ComplexMatrix::zeros(dim, dim);
        for i in 0..n {
            base.axpy(C64::new(self.omega_of(v[i]), 0.0), &embed(&pauli::x(), i, n));
            slope.axpy(C64::new(1.0, 0.0), &embed(&pauli::z(), i, n));
            for j in (i + 1)..n {
                let l = self.lambda_of(v[i], v[j]);
                base.axpy(C64::new(l, 0.0), &embed_pair(&pauli::z(), i, &pauli::z(), j, n));
            }
        }
        AffineFamily::new(base, slope)
    }
}
