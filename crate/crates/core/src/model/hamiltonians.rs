use crate::error::{Error, Result};
use crate::qmath::pauli::{self, embed, embed_pair};
use crate::qmath::{kron, ComplexMatrix, C64};

use super::bias::BiasSchedule;

/// Hamiltonian family affine in the bias, `H(f) = base + f·slope`.
///
/// Every bias-controlled Hamiltonian in this crate has this form, which lets
/// the integrators refill `H(t)` without allocating.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFamily {
    pub base: ComplexMatrix,
    pub slope: ComplexMatrix,
}

impl AffineFamily {
    pub fn new(base: ComplexMatrix, slope: ComplexMatrix) -> Self {
        assert_eq!((base.rows(), base.cols()), (slope.rows(), slope.cols()));
        Self { base, slope }
    }

    pub fn dim(&self) -> usize {
        self.base.rows()
    }

    pub fn at(&self, f: f64) -> ComplexMatrix {
        let mut h = self.base.clone();
        self.fill(f, &mut h);
        h
    }

    /// `out = base + f·slope`.
    pub fn fill(&self, f: f64, out: &mut ComplexMatrix) {
        for ((o, b), s) in out.as_mut_slice().iter_mut().zip(self.base.as_slice()).zip(self.slope.as_slice()) {
            *o = b + s * f;
        }
    }

    /// `‖∂H/∂f‖` in the spectral-spread sense used for Lipschitz bounds.
    pub fn slope_norm(&self) -> f64 {
        crate::qmath::hermitian_eigenvalues(&self.slope)
            .map(|ev| ev.iter().fold(0.0f64, |m, e| m.max(e.abs())))
            .unwrap_or(f64::INFINITY)
    }
}

/// Parameters of one double well, `H₁ = E₀𝟙 + ωσ_x + f(t)σ_z`.
#[derive(Debug, Clone, PartialEq)]
pub struct WellParams {
    pub e0: f64,
    pub omega: f64,
    pub lambda: f64,
    pub bias: BiasSchedule,
}

impl WellParams {
    /// `E₀ = 0`; the offset only contributes a global phase.
    pub fn new(omega: f64, lambda: f64, bias: BiasSchedule) -> Self {
        Self { e0: 0.0, omega, lambda, bias }
    }

    /// The avoided-crossing structure of the coupled wells needs `ω ≲ 0.1 λ`.
    /// Returns false, and logs a warning, when that is violated.
    pub fn check_level_structure(&self) -> bool {
        level_structure_ok(self.omega, self.lambda)
    }
}

pub(crate) fn level_structure_ok(omega: f64, lambda: f64) -> bool {
    let ok = omega <= 0.1 * lambda;
    if !ok {
        log::warn!("omega = {omega} exceeds 0.1·lambda = {}; crossing structure may be lost", 0.1 * lambda);
    }
    ok
}

pub fn build_h1(p: &WellParams, t: f64) -> ComplexMatrix {
    let f = p.bias.value(t);
    let mut h = pauli::id().scale_real(p.e0);
    h.axpy(C64::new(p.omega, 0.0), &pauli::x());
    h.axpy(C64::new(f, 0.0), &pauli::z());
    h
}

/// `ω Σσ_x⁽ⁱ⁾ + f Σσ_z⁽ⁱ⁾ + λ Σ_{i<j} σ_z⁽ⁱ⁾σ_z⁽ʲ⁾` on `n` qubits (dimension 2ⁿ).
pub fn hn_full_family(n: usize, omega: f64, lambda: f64) -> Result<AffineFamily> {
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    let dim = 1usize << n;
    let mut base = ComplexMatrix::zeros(dim, dim);
    let mut slope = ComplexMatrix::zeros(dim, dim);
    for i in 0..n {
        base.axpy(C64::new(omega, 0.0), &embed(&pauli::x(), i, n));
        slope.axpy(C64::new(1.0, 0.0), &embed(&pauli::z(), i, n));
        for j in (i + 1)..n {
            base.axpy(C64::new(lambda, 0.0), &embed_pair(&pauli::z(), i, &pauli::z(), j, n));
        }
    }
    Ok(AffineFamily::new(base, slope))
}

pub fn build_hn_full(n: usize, omega: f64, lambda: f64, f: f64) -> Result<ComplexMatrix> {
    Ok(hn_full_family(n, omega, lambda)?.at(f))
}

pub fn h2_family(omega: f64, lambda: f64) -> AffineFamily {
    level_structure_ok(omega, lambda);
    hn_full_family(2, omega, lambda).expect("two qubits")
}

/// Two coupled wells in the basis `(|11⟩, |10⟩, |01⟩, |00⟩)`.
pub fn build_h2(omega: f64, lambda: f64, f: f64) -> ComplexMatrix {
    h2_family(omega, lambda).at(f)
}

/// Triplet block of `H₂` in the basis `(|11⟩, |Ψ⁺⟩, |00⟩)`. The singlet
/// `|Ψ⁻⟩` decouples with energy [`h2_singlet_energy`].
pub fn build_h2_sym(omega: f64, lambda: f64, f: f64) -> ComplexMatrix {
    build_hn_sym(2, omega, lambda, f).expect("two qubits")
}

pub fn h2_singlet_energy(_omega: f64, lambda: f64, _f: f64) -> f64 {
    -lambda
}

pub fn h3_family(omega: f64, lambda: f64) -> AffineFamily {
    level_structure_ok(omega, lambda);
    hn_full_family(3, omega, lambda).expect("three qubits")
}

pub fn build_h3(omega: f64, lambda: f64, f: f64) -> ComplexMatrix {
    h3_family(omega, lambda).at(f)
}

/// Symmetric block of `H₃` in the basis `(|111⟩, |W⟩₁₁₀, |W⟩₀₀₁, |000⟩)`.
pub fn build_h3_sym(omega: f64, lambda: f64, f: f64) -> ComplexMatrix {
    build_hn_sym(3, omega, lambda, f).expect("three qubits")
}

/// Totally symmetric sector of the `n`-qubit Hamiltonian.
///
/// Basis `|m⟩` = normalised symmetric state with `m` qubits in `|1⟩`, ordered
/// `m = n, n−1, …, 0`. Diagonal: `f(2m−n) + λ[C(m,2) + C(n−m,2) − m(n−m)]`;
/// off-diagonal `⟨m−1|H|m⟩ = ω√(m(n−m+1))`.
pub fn hn_sym_family(n: usize, omega: f64, lambda: f64) -> Result<AffineFamily> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("symmetric sector needs n >= 2, got {n}")));
    }
    level_structure_ok(omega, lambda);
    let dim = n + 1;
    let mut base = ComplexMatrix::zeros(dim, dim);
    let mut slope = ComplexMatrix::zeros(dim, dim);
    let pairs = |k: usize| (k * k.saturating_sub(1) / 2) as f64;
    for row in 0..dim {
        let m = n - row;
        let zz = pairs(m) + pairs(n - m) - (m * (n - m)) as f64;
        base[(row, row)] = C64::new(lambda * zz, 0.0);
        slope[(row, row)] = C64::new(2.0 * m as f64 - n as f64, 0.0);
        if m >= 1 {
            let c = omega * ((m * (n - m + 1)) as f64).sqrt();
            base[(row, row + 1)] = C64::new(c, 0.0);
            base[(row + 1, row)] = C64::new(c, 0.0);
        }
    }
    Ok(AffineFamily::new(base, slope))
}

pub fn build_hn_sym(n: usize, omega: f64, lambda: f64, f: f64) -> Result<ComplexMatrix> {
    Ok(hn_sym_family(n, omega, lambda)?.at(f))
}

/// Encoding Hamiltonian `2f σ_x⊗σ_x + σ_z⊗σ_z + 4(1−f) σ_z⊗𝟙`.
/// First factor carries the information qubit, second the control qubit.
pub fn h_ec_family() -> AffineFamily {
    let xx = kron(&pauli::x(), &pauli::x());
    let zz = kron(&pauli::z(), &pauli::z());
    let z1 = kron(&pauli::z(), &pauli::id());
    let base = &zz + &z1.scale_real(4.0);
    let slope = &xx.scale_real(2.0) - &z1.scale_real(4.0);
    AffineFamily::new(base, slope)
}

pub fn build_h_ec(f: f64) -> ComplexMatrix {
    h_ec_family().at(f)
}
