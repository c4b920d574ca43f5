use std::f64::consts::TAU;

use crate::dynamics::{integrate_final, ConstantHamiltonian, DrivenHamiltonian, EvolutionProblem};
use crate::error::{Error, Result};
use crate::model::{h_ec_family, BiasSchedule, ErrorOperator, NoiseChannel, RampShape};
use crate::par;
use crate::qmath::{hermitian_eigensystem, pauli, ComplexMatrix, DensityMatrix, C64};

const F_HOLD: f64 = 1.0;

/// Encode, hold, decode and measure-control for one information qubit.
///
/// The input is `a|1⟩ + b|0⟩` on the first qubit with the control (second)
/// qubit in `|1⟩`.
#[derive(Debug, Clone)]
pub struct ProtectionConfig {
    pub a: C64,
    pub b: C64,
    pub t_e: f64,
    pub t_h: f64,
    pub gamma: f64,
    pub errors: Vec<ErrorOperator>,
    pub noise_during_coding: bool,
    pub shape: RampShape,
    /// Stretch `t_h` (by less than one phase period) so the encoded pair
    /// returns with zero relative phase.
    pub fine_tune: bool,
    /// Apply the recovery unitary when the control reads 0.
    pub recover: bool,
    pub dt: Option<f64>,
}

impl Default for ProtectionConfig {
    /// `t_h = 1000`, `t_e = 0.01 t_h`, `σ_x ⊗ 𝟙` at `Γ = 1e-4`, input `|1⟩`.
    fn default() -> Self {
        Self {
            a: C64::new(1.0, 0.0),
            b: C64::new(0.0, 0.0),
            t_e: 10.0,
            t_h: 1000.0,
            gamma: 1e-4,
            errors: vec![ErrorOperator::FlipInfo],
            noise_during_coding: true,
            shape: RampShape::Smooth,
            fine_tune: false,
            recover: true,
            dt: None,
        }
    }
}

impl ProtectionConfig {
    pub fn validate(&self) -> Result<()> {
        let norm = self.a.norm_sqr() + self.b.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("|a|² + |b|² = {norm}, expected 1")));
        }
        if !(self.t_e > 0.0) || !(self.t_h >= 0.0) || !self.t_h.is_finite() {
            return Err(Error::Config(format!("need t_e > 0 and t_h ≥ 0, got {} and {}", self.t_e, self.t_h)));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::Config(format!("gamma must be finite and non-negative, got {}", self.gamma)));
        }
        if self.recover && self.errors.len() > 1 {
            return Err(Error::Config(
                "recovery is only defined for a single error channel; set recover = false for detection only".into(),
            ));
        }
        Ok(())
    }

    fn info_state(&self) -> [C64; 2] {
        [self.a, self.b]
    }

    fn channels(&self, gamma: f64) -> Result<Vec<NoiseChannel>> {
        if gamma == 0.0 {
            return Ok(Vec::new());
        }
        self.errors.iter().map(|e| e.channel(gamma)).collect()
    }

    fn schedule(&self, t_h: f64) -> BiasSchedule {
        BiasSchedule::ramp_hold_ramp(self.t_e, t_h, 0.0, F_HOLD, self.shape)
    }
}

/// Final states for the info-qubit operator basis `|i⟩⟨j|` (index `2i + j`,
/// `0 ↔ |1⟩`, `1 ↔ |0⟩`) with the control prepared in `|1⟩`.
#[derive(Debug, Clone)]
pub struct InfoProcess {
    images: [ComplexMatrix; 4],
}

impl InfoProcess {
    /// Final two-qubit operator for info input `x` (2×2).
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                out.axpy(x[(i, j)], &self.images[2 * i + j]);
            }
        }
        out
    }

    /// Unnormalised info-qubit block after the control is found in
    /// `control` (1 or 0).
    pub fn branch(&self, x: &ComplexMatrix, control: u8) -> ComplexMatrix {
        let full = self.apply(x);
        let c = usize::from(control == 0);
        let mut out = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = full[(2 * i + c, 2 * j + c)];
            }
        }
        out
    }
}

fn unit(i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

fn run_segments(cfg: &ProtectionConfig, gamma: f64, t_h: f64, rho0: &DensityMatrix, t_stop: f64) -> Result<DensityMatrix> {
    let ham = DrivenHamiltonian::new(h_ec_family(), cfg.schedule(t_h));
    let noisy = cfg.channels(gamma)?;
    let dt = EvolutionProblem::new(&ham, noisy.clone(), 0.0, t_stop, cfg.dt, usize::MAX)?.grid.dt;
    let hold = (cfg.t_e, cfg.t_e + t_h);
    let segments: Vec<(f64, f64, bool)> = if cfg.noise_during_coding {
        vec![(0.0, t_stop, true)]
    } else {
        vec![(0.0, hold.0, false), (hold.0, hold.1, true), (hold.1, f64::INFINITY, false)]
    };
    let mut rho = rho0.clone();
    for (a, b, with_noise) in segments {
        let b = b.min(t_stop);
        if b <= a {
            continue;
        }
        let channels = if with_noise { noisy.clone() } else { Vec::new() };
        let problem = EvolutionProblem::new(&ham, channels, a, b, Some(dt), usize::MAX)?;
        rho = integrate_final(&problem, &rho)?;
    }
    Ok(rho)
}

fn total_time(cfg: &ProtectionConfig, t_h: f64) -> f64 {
    2.0 * cfg.t_e + t_h
}

fn process_until(cfg: &ProtectionConfig, gamma: f64, t_h: f64, t_stop: f64) -> Result<InfoProcess> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = C64::new(s, 0.0);
    let inputs: [[C64; 2]; 4] = [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [r, r],
        [r, C64::new(0.0, s)],
    ];
    let finals = par::try_map(&inputs, |psi| {
        let amps = vec![psi[0], C64::new(0.0, 0.0), psi[1], C64::new(0.0, 0.0)];
        let rho0 = DensityMatrix::from_pure(&crate::qmath::PureState::new(amps)?);
        run_segments(cfg, gamma, t_h, &rho0, t_stop).map(DensityMatrix::into_matrix)
    })?;
    let [r1, r0, rp, ri]: [ComplexMatrix; 4] = finals.try_into().expect("four tomography inputs");
    let pops = &r1 + &r0;
    let a = &rp.scale_real(2.0) - &pops;
    let b = &ri.scale_real(2.0) - &pops;
    let ib = b.scale(C64::new(0.0, 1.0));
    let e01 = (&a + &ib).scale_real(0.5);
    let e10 = (&a - &ib).scale_real(0.5);
    Ok(InfoProcess { images: [r1, e01, e10, r0] })
}

/// Process of the full encode/hold/decode cycle at hold time `t_h`.
pub fn info_process(cfg: &ProtectionConfig, t_h: f64) -> Result<InfoProcess> {
    cfg.validate()?;
    process_until(cfg, cfg.gamma, t_h, total_time(cfg, t_h))
}

fn principal_vector(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let es = hermitian_eigensystem(m)?;
    Ok(es.vector(es.dim() - 1))
}

/// Unitary that maps the control-0 branch back onto the input basis with
/// real positive coherence. Identity when the branch is empty.
pub fn recovery_unitary(process: &InfoProcess) -> Result<ComplexMatrix> {
    let b1 = process.branch(&unit(0, 0), 0);
    let b0 = process.branch(&unit(1, 1), 0);
    if b1.trace().re < 1e-14 || b0.trace().re < 1e-14 {
        return Ok(ComplexMatrix::identity(2));
    }
    let u1 = principal_vector(&b1)?;
    let mut u0 = principal_vector(&b0)?;
    let ov: C64 = u1.iter().zip(&u0).map(|(x, y)| x.conj() * y).sum();
    for (y, x) in u0.iter_mut().zip(&u1) {
        *y -= ov * x;
    }
    let n = u0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    u0.iter_mut().for_each(|z| *z /= n);
    let coh = process.branch(&unit(0, 1), 0).expectation(&u1, &u0);
    let phase = if coh.norm() > 0.0 { coh / coh.norm() } else { C64::new(1.0, 0.0) };
    let mut v = ComplexMatrix::zeros(2, 2);
    for k in 0..2 {
        v[(0, k)] = u1[k].conj();
        v[(1, k)] = phase * u0[k].conj();
    }
    Ok(v)
}

#[derive(Debug, Clone)]
pub struct ProtectionReport {
    /// Hold time actually used.
    pub t_h: f64,
    /// Residual relative phase of the control-1 branch, in `(−π, π]`.
    pub relative_phase: f64,
    pub p_control_one: f64,
    pub p_control_zero: f64,
    /// Probability that the info qubit reads the flipped value after
    /// recovery, both control outcomes combined.
    pub bitflip_error_prob: f64,
    /// `⟨ψ|ρ_info|ψ⟩` after recovery, both control outcomes combined.
    pub recovery_fidelity: f64,
    /// Fidelity within the control-1 branch alone.
    pub conditional_fidelity: f64,
    pub recovery: Option<ComplexMatrix>,
    pub baseline_error_prob: f64,
}

fn branch_phase(p: &InfoProcess) -> (f64, f64) {
    let c = p.branch(&unit(0, 1), 1)[(0, 1)];
    (c.arg(), c.norm())
}

fn encoded_phase_rate() -> Result<f64> {
    let ev = hermitian_eigensystem(&h_ec_family().at(F_HOLD))?.values;
    Ok(ev[ev.len() - 1] - ev[0])
}

pub fn run_error_protection(cfg: &ProtectionConfig) -> Result<ProtectionReport> {
    cfg.validate()?;
    let mut t_h = cfg.t_h;
    let mut process = info_process(cfg, t_h)?;
    if cfg.fine_tune {
        let (theta, mag) = branch_phase(&process);
        if mag > 1e-6 {
            t_h += theta.rem_euclid(TAU) / encoded_phase_rate()?;
            process = info_process(cfg, t_h)?;
        }
    }
    let recovery = if cfg.recover { Some(recovery_unitary(&process)?) } else { None };
    let total = |x: &ComplexMatrix| -> ComplexMatrix {
        let b1 = process.branch(x, 1);
        let b0 = process.branch(x, 0);
        match &recovery {
            Some(v) => &b1 + &b0.conjugate_by(v),
            None => &b1 + &b0,
        }
    };
    let psi = cfg.info_state();
    let rho_in = ComplexMatrix::outer(&psi, &psi);
    let out = total(&rho_in);
    let b1 = process.branch(&rho_in, 1);
    let b0 = process.branch(&rho_in, 0);
    let p1 = b1.trace().re;
    let flip = cfg.a.norm_sqr() * total(&unit(0, 0))[(1, 1)].re + cfg.b.norm_sqr() * total(&unit(1, 1))[(0, 0)].re;
    let baseline = unencoded_baseline(cfg.gamma, total_time(cfg, t_h))?;
    let unit_interval = |x: f64| x.clamp(0.0, 1.0);
    Ok(ProtectionReport {
        t_h,
        relative_phase: branch_phase(&process).0,
        p_control_one: unit_interval(p1),
        p_control_zero: unit_interval(b0.trace().re),
        bitflip_error_prob: unit_interval(flip),
        recovery_fidelity: unit_interval(out.expectation(&psi, &psi).re),
        conditional_fidelity: if p1 > 0.0 { unit_interval(b1.expectation(&psi, &psi).re / p1) } else { 0.0 },
        recovery,
        baseline_error_prob: baseline,
    })
}

/// Flip probability of a bare qubit held at unit bias for time `t` under
/// `σ_x` noise at rate `gamma`. Equals `(1 − e^{−4Γt})/2`.
pub fn unencoded_baseline(gamma: f64, t: f64) -> Result<f64> {
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let ham = ConstantHamiltonian(pauli::z().scale_real(F_HOLD));
    let ch = NoiseChannel::new(pauli::x(), gamma, "x")?;
    let problem = EvolutionProblem::new(ham, vec![ch], 0.0, t, None, usize::MAX)?;
    let rho0 = DensityMatrix::from_populations(&[1.0, 0.0])?;
    Ok(integrate_final(&problem, &rho0)?.matrix()[(1, 1)].re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub gamma_th: f64,
    pub gamma: f64,
    pub encoded_error: f64,
    pub baseline_error: f64,
    pub p_control_zero: f64,
}

/// `run_error_protection` at `Γ = x / t_h` for each `x` in `gamma_th`.
pub fn protection_sweep(cfg: &ProtectionConfig, gamma_th: &[f64]) -> Result<Vec<SweepPoint>> {
    if cfg.t_h <= 0.0 {
        return Err(Error::Config("a Γ·t_h sweep needs t_h > 0".into()));
    }
    par::try_map(gamma_th, |&x| {
        let c = ProtectionConfig { gamma: x / cfg.t_h, ..cfg.clone() };
        let r = run_error_protection(&c)?;
        Ok(SweepPoint {
            gamma_th: x,
            gamma: c.gamma,
            encoded_error: r.bitflip_error_prob,
            baseline_error: r.baseline_error_prob,
            p_control_zero: r.p_control_zero,
        })
    })
}

/// Least-squares slope of `ln y` against `ln x`; NaN unless every value is
/// positive and there are at least two points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return f64::NAN;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Projector onto the two encoded eigenstates (top and bottom) at the hold
/// bias.
pub fn encoded_projector() -> Result<ComplexMatrix> {
    let es = hermitian_eigensystem(&h_ec_family().at(F_HOLD))?;
    let top = es.vector(es.dim() - 1);
    let bottom = es.vector(0);
    Ok(&ComplexMatrix::outer(&top, &top) + &ComplexMatrix::outer(&bottom, &bottom))
}

#[derive(Debug, Clone)]
pub struct FirstOrderReport {
    pub gammas: Vec<f64>,
    /// `‖P ρ_Γ P − e^{−2kΓt_h} P ρ_0 P‖` at the end of the hold, `k` the
    /// number of channels.
    pub encoded_residual: Vec<f64>,
    /// `‖P ρ_Γ (1 − P)‖` at the end of the hold.
    pub cross_block: Vec<f64>,
    pub encoded_residual_slope: f64,
    pub cross_block_slope: f64,
    /// `‖P ζ P‖` for every catalogued error operator.
    pub projected_errors: Vec<(ErrorOperator, f64)>,
}

/// Checks the structure of the hold-period state: first-order damping of the
/// encoded block and the scaling of encoded/complement coherences with Γ.
/// Noise is applied during the hold only.
pub fn verify_first_order_structure(cfg: &ProtectionConfig, gammas: &[f64]) -> Result<FirstOrderReport> {
    let cfg = ProtectionConfig { noise_during_coding: false, recover: false, ..cfg.clone() };
    cfg.validate()?;
    let p = encoded_projector()?;
    let q = &ComplexMatrix::identity(4) - &p;
    let psi = cfg.info_state();
    let amps = vec![psi[0], C64::new(0.0, 0.0), psi[1], C64::new(0.0, 0.0)];
    let rho0 = DensityMatrix::from_pure(&crate::qmath::PureState::new(amps)?);
    let t_stop = cfg.t_e + cfg.t_h;
    let clean = run_segments(&cfg, 0.0, cfg.t_h, &rho0, t_stop)?;
    let clean_block = &(&p * clean.matrix()) * &p;
    let k = cfg.errors.len() as f64;
    let rows = par::try_map(gammas, |&g| {
        let rho = run_segments(&cfg, g, cfg.t_h, &rho0, t_stop)?;
        let block = &(&p * rho.matrix()) * &p;
        let expected = clean_block.scale_real((-2.0 * k * g * cfg.t_h).exp());
        let cross = &(&p * rho.matrix()) * &q;
        Ok::<_, Error>(((&block - &expected).frobenius_norm(), cross.frobenius_norm()))
    })?;
    let (encoded_residual, cross_block): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    let projected_errors = ErrorOperator::ALL
        .into_iter()
        .map(|e| (e, (&(&p * &e.matrix()) * &p).frobenius_norm()))
        .collect();
    Ok(FirstOrderReport {
        gammas: gammas.to_vec(),
        encoded_residual_slope: loglog_slope(gammas, &encoded_residual),
        cross_block_slope: loglog_slope(gammas, &cross_block),
        encoded_residual,
        cross_block,
        projected_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> ProtectionConfig {
        ProtectionConfig { t_e: 10.0, t_h: 20.0, ..Default::default() }
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.7)).collect();
        assert!((loglog_slope(&xs, &ys) - 1.7).abs() < 1e-12);
        assert!(loglog_slope(&xs, &[1.0, 0.0, 1.0, 1.0]).is_nan());
    }

    #[test]
    fn baseline_matches_closed_form() {
        for (g, t) in [(1e-4, 1020.0), (5e-4, 100.0)] {
            let p = unencoded_baseline(g, t).unwrap();
            let exact = (1.0 - (-4.0 * g * t).exp()) / 2.0;
            assert!((p - exact).abs() < 1e-9, "{p} {exact}");
        }
    }

    #[test]
    fn errors_leave_the_encoded_pair() {
        let p = encoded_projector().unwrap();
        assert!((p.trace().re - 2.0).abs() < 1e-12);
        for e in ErrorOperator::ALL {
            assert!((&(&p * &e.matrix()) * &p).frobenius_norm() < 1e-12, "{}", e.name());
        }
    }

    #[test]
    fn multiple_channels_need_detection_only() {
        let cfg = ProtectionConfig { errors: vec![ErrorOperator::FlipInfo, ErrorOperator::PhaseInfo], ..quick() };
        assert!(matches!(run_error_protection(&cfg), Err(Error::Config(_))));
        let cfg = ProtectionConfig { recover: false, ..cfg };
        assert!(run_error_protection(&cfg).is_ok());
    }

    #[test]
    fn noiseless_cycle_returns_the_input() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let cfg = ProtectionConfig {
            a: C64::new(s, 0.0),
            b: C64::new(0.0, s),
            gamma: 0.0,
            fine_tune: true,
            ..quick()
        };
        let r = run_error_protection(&cfg).unwrap();
        assert!(r.p_control_one > 0.99);
        assert!(r.relative_phase.abs() < 1e-3, "{}", r.relative_phase);
        assert!(r.recovery_fidelity > 0.99, "{}", r.recovery_fidelity);
        assert!(r.t_h >= cfg.t_h && r.t_h < cfg.t_h + TAU / 6.0 + 1e-12);
    }

    #[test]
    fn tomography_reproduces_a_direct_run() {
        let cfg = ProtectionConfig { gamma: 1e-3, ..quick() };
        let process = info_process(&cfg, cfg.t_h).unwrap();
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let amps = vec![psi[0], C64::new(0.0, 0.0), psi[1], C64::new(0.0, 0.0)];
        let rho0 = DensityMatrix::from_pure(&crate::qmath::PureState::new(amps).unwrap());
        let direct = run_segments(&cfg, cfg.gamma, cfg.t_h, &rho0, total_time(&cfg, cfg.t_h)).unwrap();
        let via = process.apply(&ComplexMatrix::outer(&psi, &psi));
        assert!(via.max_abs_diff(direct.matrix()) < 1e-10);
    }
}
