use crate::error::{Error, Result};
use crate::model::NoiseChannel;
use crate::qmath::{matmul_into, spectral_spread, ComplexMatrix, DensityMatrix, C64, ZERO};

use super::grid::TimeGrid;
use super::hamiltonian::Hamiltonian;
use super::trajectory::Trajectory;

/// Trace drift beyond this aborts an integration.
pub const TRACE_ABORT: f64 = 1e-6;

/// A noise channel pre-processed for fast evaluation of `Γ[ζ,[ζ,ρ]]`.
#[derive(Debug, Clone)]
enum Compiled {
    /// `Γ = 0` or `ζ ∝ 𝟙`.
    Null,
    /// At most one entry per row: `ζ_{i,p(i)} = c_i`. Then
    /// `[ζ,[ζ,ρ]]_ij = (d_i + d_j)ρ_ij − 2 c_i c̄_j ρ_{p(i),p(j)}` with `d_i = |c_i|²`.
    Monomial { gamma: f64, d: Vec<f64>, c: Vec<C64>, p: Vec<usize> },
    Dense { gamma: f64, zeta: ComplexMatrix, zeta_sq: ComplexMatrix },
}

impl Compiled {
    fn new(ch: &NoiseChannel) -> Self {
        let z = ch.zeta();
        let n = z.rows();
        let z00 = z[(0, 0)];
        let scalar = (0..n).all(|i| (0..n).all(|j| z[(i, j)] == if i == j { z00 } else { ZERO }));
        if ch.gamma() == 0.0 || scalar {
            return Compiled::Null;
        }
        let mut p = Vec::with_capacity(n);
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let nz: Vec<usize> = (0..n).filter(|&j| z[(i, j)] != ZERO).collect();
            match nz.as_slice() {
                [] => {
                    p.push(i);
                    c.push(ZERO);
                }
                [j] => {
                    p.push(*j);
                    c.push(z[(i, *j)]);
                }
                _ => {
                    return Compiled::Dense { gamma: ch.gamma(), zeta: z.clone(), zeta_sq: z * z };
                }
            }
        }
        let d = c.iter().map(|x| x.norm_sqr()).collect();
        Compiled::Monomial { gamma: ch.gamma(), d, c, p }
    }
}

/// Evaluates `−i[H,ρ] − Σ Γ[ζ,[ζ,ρ]]` without allocating.
#[derive(Debug, Clone)]
pub(crate) struct MasterKernel {
    dim: usize,
    channels: Vec<Compiled>,
    a: ComplexMatrix,
    b: ComplexMatrix,
}

impl MasterKernel {
    pub(crate) fn new(dim: usize, channels: &[NoiseChannel]) -> Result<Self> {
        for ch in channels {
            if ch.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "channel {} has dimension {}, state has {dim}",
                    ch.label(),
                    ch.dim()
                )));
            }
        }
        let compiled = channels.iter().map(Compiled::new).filter(|c| !matches!(c, Compiled::Null)).collect();
        Ok(Self { dim, channels: compiled, a: ComplexMatrix::zeros(dim, dim), b: ComplexMatrix::zeros(dim, dim) })
    }

    /// `out ← dρ/dt`. Assumes Hermitian `h` and `rho`.
    pub(crate) fn eval(&mut self, h: &ComplexMatrix, rho: &ComplexMatrix, out: &mut ComplexMatrix) {
        let n = self.dim;
        matmul_into(h, rho, &mut self.a);
        {
            let a = self.a.as_slice();
            let o = out.as_mut_slice();
            for i in 0..n {
                for j in 0..n {
                    // −i(Hρ − ρH) with ρH = (Hρ)†
                    let d = a[i * n + j] - a[j * n + i].conj();
                    o[i * n + j] = C64::new(d.im, -d.re);
                }
            }
        }
        for ch in &self.channels {
            match ch {
                Compiled::Null => {}
                Compiled::Monomial { gamma, d, c, p } => {
                    let r = rho.as_slice();
                    let o = out.as_mut_slice();
                    for i in 0..n {
                        let ci = c[i] * (2.0 * gamma);
                        let pi = p[i] * n;
                        for j in 0..n {
                            let v = r[i * n + j] * (d[i] + d[j]) * *gamma - ci * c[j].conj() * r[pi + p[j]];
                            o[i * n + j] -= v;
                        }
                    }
                }
                Compiled::Dense { gamma, zeta, zeta_sq } => {
                    // ζ²ρ + ρζ² − 2ζρζ
                    matmul_into(zeta_sq, rho, &mut self.a);
                    let o = out.as_mut_slice();
                    {
                        let a = self.a.as_slice();
                        for i in 0..n {
                            for j in 0..n {
                                o[i * n + j] -= (a[i * n + j] + a[j * n + i].conj()) * *gamma;
                            }
                        }
                    }
                    matmul_into(zeta, rho, &mut self.a);
                    matmul_into(&self.a, zeta, &mut self.b);
                    for (oe, be) in o.iter_mut().zip(self.b.as_slice()) {
                        *oe += be * (2.0 * gamma);
                    }
                }
            }
        }
    }
}

/// Right-hand side of the master equation, `−i[H,ρ] − Σ Γ[ζ,[ζ,ρ]]`.
pub fn rhs_master(h: &ComplexMatrix, rho: &ComplexMatrix, channels: &[NoiseChannel]) -> Result<ComplexMatrix> {
    let n = rho.rows();
    if !rho.is_square() || h.rows() != n || h.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "H is {}x{}, rho is {}x{}",
            h.rows(),
            h.cols(),
            rho.rows(),
            rho.cols()
        )));
    }
    let mut kernel = MasterKernel::new(n, channels)?;
    let mut out = ComplexMatrix::zeros(n, n);
    kernel.eval(h, rho, &mut out);
    Ok(out)
}

/// RK4 stepper for `ρ` with reusable scratch space.
#[derive(Debug, Clone)]
pub(crate) struct Rk4 {
    pub(crate) kernel: MasterKernel,
    h0: ComplexMatrix,
    hm: ComplexMatrix,
    h1: ComplexMatrix,
    k: [ComplexMatrix; 4],
    tmp: ComplexMatrix,
}

impl Rk4 {
    pub(crate) fn new(dim: usize, channels: &[NoiseChannel]) -> Result<Self> {
        let z = ComplexMatrix::zeros(dim, dim);
        Ok(Self {
            kernel: MasterKernel::new(dim, channels)?,
            h0: z.clone(),
            hm: z.clone(),
            h1: z.clone(),
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        })
    }

    /// Advance `rho` by one step; returns the Hermitian residual before
    /// re-symmetrisation.
    pub(crate) fn step<H: Hamiltonian>(&mut self, ham: &H, t: f64, dt: f64, rho: &mut ComplexMatrix) -> f64 {
        ham.fill(t, &mut self.h0);
        ham.fill(t + 0.5 * dt, &mut self.hm);
        ham.fill(t + dt, &mut self.h1);
        let [k1, k2, k3, k4] = &mut self.k;
        self.kernel.eval(&self.h0, rho, k1);
        axpy_into(rho, 0.5 * dt, k1, &mut self.tmp);
        self.kernel.eval(&self.hm, &self.tmp, k2);
        axpy_into(rho, 0.5 * dt, k2, &mut self.tmp);
        self.kernel.eval(&self.hm, &self.tmp, k3);
        axpy_into(rho, dt, k3, &mut self.tmp);
        self.kernel.eval(&self.h1, &self.tmp, k4);
        let w = dt / 6.0;
        for ((((r, a), b), c), d) in rho
            .as_mut_slice()
            .iter_mut()
            .zip(k1.as_slice())
            .zip(k2.as_slice())
            .zip(k3.as_slice())
            .zip(k4.as_slice())
        {
            *r += (a + (b + c) * 2.0 + d) * w;
        }
        let residual = rho.hermitian_residual();
        rho.symmetrize_in_place();
        residual
    }
}

/// `out = x + s·y`.
fn axpy_into(x: &ComplexMatrix, s: f64, y: &ComplexMatrix, out: &mut ComplexMatrix) {
    for ((o, a), b) in out.as_mut_slice().iter_mut().zip(x.as_slice()).zip(y.as_slice()) {
        *o = a + b * s;
    }
}

pub(crate) fn real_trace(m: &ComplexMatrix) -> f64 {
    (0..m.rows()).map(|i| m[(i, i)].re).sum()
}

/// Everything needed for one master-equation run.
#[derive(Debug, Clone)]
pub struct EvolutionProblem<H> {
    pub hamiltonian: H,
    pub channels: Vec<NoiseChannel>,
    pub grid: TimeGrid,
}

impl<H: Hamiltonian> EvolutionProblem<H> {
    /// Step size defaults to `0.02 / scale`, where the scale is the largest
    /// spectral spread of `H` over the run plus `Σ Γ·spread(ζ)²`. An explicit
    /// `dt` with `dt·scale > 0.1` is rejected.
    pub fn new(
        hamiltonian: H,
        channels: Vec<NoiseChannel>,
        t0: f64,
        t1: f64,
        dt: Option<f64>,
        sample_every: usize,
    ) -> Result<Self> {
        let dim = hamiltonian.dim();
        if let Some(ch) = channels.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch(format!("channel {} does not match H ({dim})", ch.label())));
        }
        if !(t0.is_finite() && t1.is_finite()) || t1 <= t0 {
            return Err(Error::InvalidArgument(format!("need t1 > t0, got [{t0}, {t1}]")));
        }
        let scale = generator_scale(&hamiltonian, &channels, t0, t1)?;
        let grid = TimeGrid::for_scale(t0, t1, dt, scale, sample_every)?;
        Ok(Self { hamiltonian, channels, grid })
    }
}

pub(crate) fn generator_scale<H: Hamiltonian>(h: &H, channels: &[NoiseChannel], t0: f64, t1: f64) -> Result<f64> {
    let mut scale = h.spread_bound(t0, t1)?;
    for ch in channels {
        let s = spectral_spread(ch.zeta())?;
        scale += ch.gamma() * s * s;
    }
    Ok(scale)
}

/// Run the integration, calling `observe(t, ρ)` at every sample point.
/// Returns the final state and the largest pre-symmetrisation residual.
pub fn evolve_observed<H: Hamiltonian>(
    problem: &EvolutionProblem<H>,
    rho0: &DensityMatrix,
    mut observe: impl FnMut(f64, &ComplexMatrix) -> Result<()>,
) -> Result<(DensityMatrix, f64)> {
    let dim = problem.hamiltonian.dim();
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch(format!("rho0 is {}, H is {dim}", rho0.dim())));
    }
    let g = problem.grid;
    let mut rk = Rk4::new(dim, &problem.channels)?;
    let mut rho = rho0.matrix().clone();
    let tr0 = real_trace(&rho);
    let mut max_residual = 0.0f64;
    observe(g.t0, &rho)?;
    for k in 0..g.steps {
        let t = g.time(k);
        max_residual = max_residual.max(rk.step(&problem.hamiltonian, t, g.dt, &mut rho));
        let drift = (real_trace(&rho) - tr0).abs();
        if !(drift <= TRACE_ABORT) {
            return Err(Error::StepTooLarge(format!("trace drift {drift:.3e} at t = {}", g.time(k + 1))));
        }
        if g.is_sample(k + 1) {
            observe(g.time(k + 1), &rho)?;
        }
    }
    if max_residual > 1e-10 {
        log::warn!("pre-symmetrisation Hermitian residual reached {max_residual:.3e}");
    } else {
        log::debug!("max pre-symmetrisation Hermitian residual {max_residual:.3e}");
    }
    Ok((DensityMatrix::from_hermitian_unchecked(rho), max_residual))
}

/// Fixed-step RK4 integration of the master equation.
///
/// `ρ` is re-symmetrised after every step but never renormalised; the trace
/// drift is recorded as the `trace_drift` observable.
pub fn integrate<H: Hamiltonian>(problem: &EvolutionProblem<H>, rho0: &DensityMatrix) -> Result<Trajectory> {
    let mut traj = Trajectory::with_capacity(problem.grid.sample_count());
    let tr0 = rho0.trace();
    let (_, residual) = evolve_observed(problem, rho0, |t, rho| {
        let f = problem.hamiltonian.bias(t).unwrap_or(f64::NAN);
        let purity = purity_of(rho);
        traj.push_sample(t, DensityMatrix::from_hermitian_unchecked(rho.clone()), f, real_trace(rho) - tr0, purity);
        Ok(())
    })?;
    traj.max_hermitian_residual = residual;
    Ok(traj)
}

/// Only the final state.
pub fn integrate_final<H: Hamiltonian>(problem: &EvolutionProblem<H>, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    evolve_observed(problem, rho0, |_, _| Ok(())).map(|(rho, _)| rho)
}

pub(crate) fn purity_of(m: &ComplexMatrix) -> f64 {
    // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
    m.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ConstantHamiltonian;
    use crate::model::{identity_channel, left_projector_channel, sigma_x_channel, states};
    use crate::qmath::{double_commutator, kron, pauli, PureState};
    use proptest::prelude::*;

    fn plus() -> PureState {
        PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn closed_rhs_is_commutator() {
        let rho = plus().projector();
        let out = rhs_master(&pauli::z(), &rho, &[]).unwrap();
        let expected = crate::qmath::commutator(&pauli::z(), &rho).unwrap().scale(C64::new(0.0, -1.0));
        assert!(out.max_abs_diff(&expected) < 1e-15);
        assert_eq!(out[(0, 0)], ZERO);
        assert_eq!(out[(1, 1)], ZERO);
    }

    #[test]
    fn identity_channel_contributes_nothing() {
        let rho = states::psi_plus().projector();
        let h = crate::model::build_h2(0.05, 1.0, 0.3);
        let a = rhs_master(&h, &rho, &[identity_channel(2, 5.0).unwrap()]).unwrap();
        let b = rhs_master(&h, &rho, &[]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn left_projector_dephases_psi_plus_at_rate_two_gamma() {
        // Diagonal ζ gives [ζ,[ζ,ρ]]_ij = (ζ_i − ζ_j)² ρ_ij; each qubit's projector adds Γ.
        let gamma = 0.3;
        let rho = states::psi_plus().projector();
        let zero_h = ComplexMatrix::zeros(4, 4);
        let chans = [left_projector_channel(1, 2, gamma).unwrap(), left_projector_channel(2, 2, gamma).unwrap()];
        let out = rhs_master(&zero_h, &rho, &chans).unwrap();
        let rate = -out[(1, 2)].re / rho[(1, 2)].re;
        assert!((rate - 2.0 * gamma).abs() < 1e-14, "{rate}");
        let single = rhs_master(&zero_h, &rho, &chans[..1]).unwrap();
        assert!((-single[(1, 2)].re / rho[(1, 2)].re - gamma).abs() < 1e-14);
        assert_eq!(out[(1, 1)], ZERO);
    }

    fn random_state(n: usize, seed: &[f64]) -> ComplexMatrix {
        let mut amps = Vec::new();
        for k in 0..n {
            amps.push(C64::new(seed[2 * k], seed[2 * k + 1]));
        }
        let psi = PureState::normalized(amps).unwrap();
        let mut rho = psi.projector().scale_real(0.7);
        rho.axpy(C64::new(0.3 / n as f64, 0.0), &ComplexMatrix::identity(n));
        rho
    }

    proptest! {
        #[test]
        fn kernel_matches_dense_formula(
            seed in proptest::collection::vec(-1.0f64..1.0, 8..=8),
            hs in proptest::collection::vec(-2.0f64..2.0, 16..=16),
            gamma in 0.0f64..2.0,
            which in 0usize..4,
        ) {
            let rho = random_state(4, &seed);
            let mut h = ComplexMatrix::zeros(4, 4);
            let mut it = hs.iter();
            for i in 0..4 {
                h[(i, i)] = C64::new(*it.next().unwrap(), 0.0);
                for j in (i + 1)..4 {
                    let z = C64::new(*it.next().unwrap(), *it.next().unwrap_or(&0.0));
                    h[(i, j)] = z;
                    h[(j, i)] = z.conj();
                }
            }
            let zeta = match which {
                0 => kron(&pauli::x(), &pauli::id()),
                1 => kron(&pauli::id(), &pauli::y()),
                2 => kron(&pauli::left_projector(), &pauli::id()),
                _ => &kron(&pauli::x(), &pauli::x()) + &kron(&pauli::z(), &pauli::id()),
            };
            let ch = NoiseChannel::new(zeta.clone(), gamma, "t").unwrap();
            let fast = rhs_master(&h, &rho, &[ch]).unwrap();
            let mut slow = crate::qmath::commutator(&h, &rho).unwrap().scale(C64::new(0.0, -1.0));
            slow.axpy(C64::new(-gamma, 0.0), &double_commutator(&zeta, &rho).unwrap());
            prop_assert!(fast.max_abs_diff(&slow) < 1e-12);
            prop_assert!(fast.hermitian_residual() < 1e-12);
            prop_assert!(real_trace(&fast).abs() < 1e-12);
        }
    }

    #[test]
    fn two_level_flip_closed_form() {
        let gamma = 0.05;
        let h = ConstantHamiltonian(ComplexMatrix::zeros(2, 2));
        let ch = sigma_x_channel(1, 1, gamma).unwrap();
        let p = EvolutionProblem::new(h, vec![ch], 0.0, 20.0, None, 50).unwrap();
        let rho0 = DensityMatrix::from_pure(&PureState::basis(2, 0));
        let traj = integrate(&p, &rho0).unwrap();
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            let oracle = (1.0 - (-4.0 * gamma * t).exp()) / 2.0;
            assert!((rho.matrix()[(1, 1)].re - oracle).abs() < 1e-6);
        }
    }

    #[test]
    fn unitary_limit_conserves_purity() {
        let h = ConstantHamiltonian(crate::model::build_h2(0.05, 1.0, 0.4));
        let p = EvolutionProblem::new(h, vec![], 0.0, 1.0, None, 1).unwrap();
        let p = EvolutionProblem { grid: TimeGrid::new(0.0, 10_000.0 * p.grid.dt, p.grid.dt, 1000).unwrap(), ..p };
        assert_eq!(p.grid.steps, 10_000);
        let rho0 = DensityMatrix::from_pure(&states::ket("11"));
        let traj = integrate(&p, &rho0).unwrap();
        let pur = traj.observable("purity").unwrap();
        assert!(pur.iter().all(|x| (x - 1.0).abs() < 1e-8));
        assert!(traj.observable("trace_drift").unwrap().iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn oversized_step_is_rejected() {
        let h = ConstantHamiltonian(pauli::z());
        assert!(matches!(
            EvolutionProblem::new(h, vec![], 0.0, 1.0, Some(0.06), 1),
            Err(Error::StepTooLarge(_))
        ));
    }

    #[test]
    fn channel_dimension_checked() {
        let h = ConstantHamiltonian(pauli::z());
        let ch = sigma_x_channel(1, 2, 0.1).unwrap();
        assert!(matches!(EvolutionProblem::new(h, vec![ch], 0.0, 1.0, None, 1), Err(Error::DimensionMismatch(_))));
    }
}
