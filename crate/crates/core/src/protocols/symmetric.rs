use crate::dynamics::{integrate_pure, DrivenHamiltonian, Hamiltonian, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::model::{hn_sym_family, BiasSchedule};
use crate::qmath::{hermitian_eigensystem, DensityMatrix, PureState, C64};
use crate::spectra::{adiabaticity_gamma, eigen_sweep, find_avoided_crossings, GammaEstimate};

/// Sweep of `n` coupled wells inside the symmetric sector.
///
/// The state is `|m ones⟩` basis ordered `m = n…0`; `p{m}` observables are the
/// populations of those components.
#[derive(Debug, Clone)]
pub struct SymmetricSweep {
    pub n: usize,
    pub omega: f64,
    pub lambda: f64,
    pub schedule: BiasSchedule,
    pub t_end: f64,
    pub dt: Option<f64>,
    pub sample_every: usize,
}

impl SymmetricSweep {
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    fn hamiltonian(&self) -> Result<DrivenHamiltonian> {
        Ok(DrivenHamiltonian::new(hn_sym_family(self.n, self.omega, self.lambda)?, self.schedule))
    }

    fn grid(&self, ham: &DrivenHamiltonian) -> Result<TimeGrid> {
        if !(self.t_end > 0.0) {
            return Err(Error::InvalidArgument(format!("t_end must be positive, got {}", self.t_end)));
        }
        TimeGrid::for_scale(0.0, self.t_end, self.dt, ham.spread_bound(0.0, self.t_end)?, self.sample_every)
    }
}

/// Populations of `|m ones⟩` as series `p{m}` plus `f`, `trace_drift` (norm
/// drift) and `purity`.
pub fn run_symmetric(sweep: &SymmetricSweep, psi0: &PureState) -> Result<(Trajectory, PureState)> {
    let ham = sweep.hamiltonian()?;
    let grid = sweep.grid(&ham)?;
    let n = sweep.n;
    let mut traj = Trajectory::with_capacity(grid.sample_count());
    let mut pops: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.sample_count()); n + 1];
    let norm0 = psi0.norm_sqr();
    let last = integrate_pure(&ham, psi0, &grid, |t, psi| {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        for (row, z) in psi.iter().enumerate() {
            pops[n - row].push(z.norm_sqr());
        }
        let rho = crate::qmath::ComplexMatrix::outer(psi, psi);
        traj.push_sample(t, DensityMatrix::from_hermitian_unchecked(rho), ham.bias(t).unwrap_or(f64::NAN), norm - norm0, norm * norm);
    })?;
    for (m, p) in pops.into_iter().enumerate() {
        traj.set_observable(&format!("p{m}"), p)?;
    }
    Ok((traj, last))
}

/// Instantaneous eigenvector `level` (ascending) of the sector Hamiltonian at
/// bias `f`.
pub fn sector_eigenstate(n: usize, omega: f64, lambda: f64, f: f64, level: usize) -> Result<PureState> {
    let es = hermitian_eigensystem(&hn_sym_family(n, omega, lambda)?.at(f))?;
    if level >= es.dim() {
        return Err(Error::InvalidArgument(format!("level {level} out of range")));
    }
    PureState::normalized(es.vector(level))
}

/// W-state generation: start in the sector ground state at the initial bias
/// and sweep upward.
pub fn run_w_generation(sweep: &SymmetricSweep) -> Result<Trajectory> {
    let f0 = sweep.schedule.value(0.0);
    let psi0 = sector_eigenstate(sweep.n, sweep.omega, sweep.lambda, f0, 0)?;
    run_symmetric(sweep, &psi0).map(|(t, _)| t)
}

/// Biases where neighbouring diagonal energies `|m⟩`, `|m−1⟩` of the sector
/// Hamiltonian meet, i.e. `f = −(2m − n − 1)λ` for `m = n…1`.
pub fn ground_resonances(n: usize, lambda: f64) -> Vec<f64> {
    (1..=n).rev().map(|m| -(2.0 * m as f64 - (n + 1) as f64) * lambda).collect()
}

#[derive(Debug, Clone)]
pub struct GhzReport {
    /// `|⟨Φ⁺|ψ⟩|²` at the end of the sweep.
    pub phi_plus_overlap: f64,
    /// `|⟨11|ψ⟩|²` at the end of the sweep: amplitude moved across the
    /// resonance out of the starting `|00⟩` branch.
    pub transfer: f64,
    pub gamma_b: f64,
    pub gamma_b_estimate: f64,
    pub adiabatic: bool,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone)]
pub struct GhzSetup {
    pub omega: f64,
    pub lambda: f64,
    pub sweep_rate: f64,
    pub f_start: f64,
    pub dt: Option<f64>,
    pub sample_every: usize,
}

impl GhzSetup {
    pub fn new(omega: f64, lambda: f64, sweep_rate: f64, f_start: f64) -> Self {
        Self { omega, lambda, sweep_rate, f_start, dt: None, sample_every: 1000 }
    }
}

/// Sweep the two-well sector from `f_start < 0` to `f = 0`, starting in the
/// highest eigenstate, and test for adiabatic passage through the
/// second-order resonance between `|11⟩` and `|00⟩`.
pub fn run_ghz_attempt(setup: &GhzSetup) -> Result<GhzReport> {
    let GhzSetup { omega, lambda, sweep_rate, f_start, .. } = *setup;
    if !(f_start < 0.0) || !(sweep_rate > 0.0) {
        return Err(Error::InvalidArgument(format!("need f_start < 0 and a positive rate, got {f_start}, {sweep_rate}")));
    }
    let schedule = BiasSchedule::linear(f_start, sweep_rate);
    let sweep = SymmetricSweep {
        n: 2,
        omega,
        lambda,
        schedule,
        t_end: -f_start / sweep_rate,
        dt: setup.dt,
        sample_every: setup.sample_every,
    };
    let psi0 = sector_eigenstate(2, omega, lambda, f_start, 2)?;
    let (trajectory, last) = run_symmetric(&sweep, &psi0)?;
    let a = last.amplitudes();
    // sector basis (|11⟩, |Ψ⁺⟩, |00⟩)
    let phi: C64 = (a[0] + a[2]) / 2f64.sqrt();
    let estimate = GammaEstimate::SecondOrder { omega, lambda };
    let gamma_b_estimate = estimate.value(sweep_rate);
    let gamma_b = if omega == 0.0 {
        0.0
    } else {
        let fam = hn_sym_family(2, omega, lambda)?;
        let builder = |f: f64| fam.at(f);
        let span = 4.0 * omega * omega / lambda + 1e-3 * lambda;
        let diagram = eigen_sweep(builder, (-span, span), 41)?;
        let res = find_avoided_crossings(&diagram, builder, (1, 2))?;
        let res = res
            .into_iter()
            .min_by(|x, y| x.f_res.abs().total_cmp(&y.f_res.abs()))
            .ok_or(Error::NoMinimumFound { lower: 1, upper: 2 })?;
        adiabaticity_gamma(builder, &schedule, &res, estimate)?.gamma_numeric
    };
    Ok(GhzReport {
        phi_plus_overlap: phi.norm_sqr(),
        transfer: a[0].norm_sqr(),
        gamma_b,
        gamma_b_estimate,
        adiabatic: gamma_b > 1.0,
        trajectory,
    })
}
