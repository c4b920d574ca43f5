//! Sector-stacked evolution for particles that also hop between vertical levels.

use crate::error::{Error, Result};
use crate::model::{BiasSchedule, VerticalLevels};
use crate::qmath::{ComplexMatrix, DensityMatrix, C64};

use super::grid::TimeGrid;
use super::hamiltonian::{DrivenHamiltonian, Hamiltonian};
use super::master::{purity_of, real_trace, Rk4, TRACE_ABORT};
use super::trajectory::Trajectory;

/// How vertical labels attach to the particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VerticalTopology {
    /// Each particle carries its own level and flips independently.
    #[default]
    PerParticle,
    /// One level shared by all particles; flips move them together.
    Shared,
}

/// All vertical configurations, lexicographic in `(v₁, …, v_n)`.
pub fn sector_configs(n_levels: usize, n_particles: usize, topology: VerticalTopology) -> Vec<Vec<usize>> {
    match topology {
        VerticalTopology::Shared => (0..n_levels).map(|l| vec![l; n_particles]).collect(),
        VerticalTopology::PerParticle => {
            let total = n_levels.pow(n_particles as u32);
            (0..total)
                .map(|mut code| {
                    let mut v = vec![0; n_particles];
                    for slot in v.iter_mut().rev() {
                        *slot = code % n_levels;
                        code /= n_levels;
                    }
                    v
                })
                .collect()
        }
    }
}

/// Unnormalised density matrices, one per vertical configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    n_levels: usize,
    topology: VerticalTopology,
    configs: Vec<Vec<usize>>,
    sectors: Vec<ComplexMatrix>,
}

impl SectorState {
    /// `ρ0` placed entirely in the all-ground sector.
    pub fn ground(n_levels: usize, n_particles: usize, topology: VerticalTopology, rho0: &DensityMatrix) -> Self {
        let configs = sector_configs(n_levels, n_particles, topology);
        let dim = rho0.dim();
        let mut sectors = vec![ComplexMatrix::zeros(dim, dim); configs.len()];
        sectors[0] = rho0.matrix().clone();
        Self { n_levels, topology, configs, sectors }
    }

    pub fn from_sectors(
        n_levels: usize,
        n_particles: usize,
        topology: VerticalTopology,
        sectors: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let configs = sector_configs(n_levels, n_particles, topology);
        if sectors.len() != configs.len() {
            return Err(Error::DimensionMismatch(format!("{} sectors given, {} expected", sectors.len(), configs.len())));
        }
        let dim = sectors[0].rows();
        if sectors.iter().any(|s| !s.is_square() || s.rows() != dim) {
            return Err(Error::DimensionMismatch("sector matrices differ in dimension".into()));
        }
        Ok(Self { n_levels, topology, configs, sectors })
    }

    pub fn configs(&self) -> &[Vec<usize>] {
        &self.configs
    }

    pub fn sectors(&self) -> &[ComplexMatrix] {
        &self.sectors
    }

    pub fn dim(&self) -> usize {
        self.sectors[0].rows()
    }

    pub fn sector_traces(&self) -> Vec<f64> {
        self.sectors.iter().map(real_trace).collect()
    }

    pub fn total_trace(&self) -> f64 {
        self.sector_traces().iter().sum()
    }

    /// `Σ_v ρ(v)`: the horizontal state with the vertical variable traced out.
    pub fn reduced_matrix(&self) -> ComplexMatrix {
        let mut out = self.sectors[0].clone();
        for s in &self.sectors[1..] {
            out.axpy(C64::new(1.0, 0.0), s);
        }
        out
    }

    pub fn reduced(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.reduced_matrix())
    }

    /// Groups of sectors joined by one flip class, each group a complete graph.
    fn flip_groups(&self) -> Vec<Vec<usize>> {
        match self.topology {
            VerticalTopology::Shared => vec![(0..self.configs.len()).collect()],
            VerticalTopology::PerParticle => {
                let n = self.configs[0].len();
                let mut groups = Vec::new();
                for coord in 0..n {
                    let mut seen = vec![false; self.configs.len()];
                    for start in 0..self.configs.len() {
                        if seen[start] {
                            continue;
                        }
                        let g: Vec<usize> = (0..self.configs.len())
                            .filter(|&k| {
                                (0..n).all(|c| c == coord || self.configs[k][c] == self.configs[start][c])
                            })
                            .collect();
                        for &k in &g {
                            seen[k] = true;
                        }
                        groups.push(g);
                    }
                }
                groups
            }
        }
    }

    /// Exact flow of the vertical rate equations over `tau`.
    ///
    /// Every flip class is a complete graph on `L` levels with rate `Γ` per
    /// edge, whose flow is `ρ_v → S/L + (ρ_v − S/L)e^{−LΓτ}` with `S` the group
    /// sum. Classes for different particles commute.
    fn relax(&mut self, groups: &[Vec<usize>], gamma: f64, tau: f64) {
        if gamma == 0.0 {
            return;
        }
        let decay = (-(self.n_levels as f64) * gamma * tau).exp();
        let inv_l = 1.0 / self.n_levels as f64;
        let dim = self.dim();
        let mut mean = ComplexMatrix::zeros(dim, dim);
        for g in groups {
            mean.as_mut_slice().iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for &k in g {
                mean.axpy(C64::new(inv_l, 0.0), &self.sectors[k]);
            }
            for &k in g {
                for (s, m) in self.sectors[k].as_mut_slice().iter_mut().zip(mean.as_slice()) {
                    *s = m + (*s - m) * decay;
                }
            }
        }
    }
}

/// `dρ(v)/dt = −i[H_v, ρ(v)] + Γ Σ_{v′∼v} (ρ(v′) − ρ(v))`.
pub fn rhs_hotbath(hamiltonians: &[ComplexMatrix], state: &SectorState, gamma: f64) -> Result<SectorState> {
    if hamiltonians.len() != state.sectors.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} sector Hamiltonians for {} sectors",
            hamiltonians.len(),
            state.sectors.len()
        )));
    }
    let dim = state.dim();
    let mut out = Vec::with_capacity(state.sectors.len());
    for (h, rho) in hamiltonians.iter().zip(&state.sectors) {
        if h.rows() != dim || h.cols() != dim {
            return Err(Error::DimensionMismatch(format!("sector Hamiltonian {}x{}, state {dim}", h.rows(), h.cols())));
        }
        out.push(super::rhs_master(h, rho, &[])?);
    }
    for g in state.flip_groups() {
        for &k in &g {
            for &j in &g {
                if j != k {
                    out[k].axpy(C64::new(gamma, 0.0), &state.sectors[j]);
                    out[k].axpy(C64::new(-gamma, 0.0), &state.sectors[k]);
                }
            }
        }
    }
    Ok(SectorState { sectors: out, ..state.clone() })
}

/// Hot-bath run description. The flip rate is `levels.gamma`.
#[derive(Debug, Clone)]
pub struct HotBathProblem {
    pub levels: VerticalLevels,
    pub topology: VerticalTopology,
    pub hamiltonians: Vec<DrivenHamiltonian>,
    pub grid: TimeGrid,
    n_particles: usize,
}

impl HotBathProblem {
    #[allow(clippy::too_many_arguments)]
    /// The step rule uses the largest sector spread only; relaxation is exact.
    pub fn new(
        levels: VerticalLevels,
        n_particles: usize,
        topology: VerticalTopology,
        schedule: BiasSchedule,
        t0: f64,
        t1: f64,
        dt: Option<f64>,
        sample_every: usize,
    ) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::InvalidArgument("need at least one particle".into()));
        }
        let configs = sector_configs(levels.n_levels(), n_particles, topology);
        let hamiltonians: Vec<DrivenHamiltonian> =
            configs.iter().map(|v| DrivenHamiltonian::new(levels.sector_family(v), schedule)).collect();
        let mut scale = 0.0f64;
        for h in &hamiltonians {
            scale = scale.max(h.spread_bound(t0, t1)?);
        }
        let grid = TimeGrid::for_scale(t0, t1, dt, scale, sample_every)?;
        Ok(Self { levels, topology, hamiltonians, grid, n_particles })
    }

    pub fn initial_state(&self, rho0: &DensityMatrix) -> SectorState {
        SectorState::ground(self.levels.n_levels(), self.n_particles, self.topology, rho0)
    }
}

/// Strang splitting: half relaxation, RK4 Hamiltonian step per sector, half
/// relaxation. States in the trajectory are the vertical-traced `Σ_v ρ(v)`.
pub fn integrate_hotbath(problem: &HotBathProblem, state0: &SectorState) -> Result<Trajectory> {
    if state0.sectors.len() != problem.hamiltonians.len() {
        return Err(Error::DimensionMismatch("initial state does not match the problem's sectors".into()));
    }
    let dim = state0.dim();
    if problem.hamiltonians[0].dim() != dim {
        return Err(Error::DimensionMismatch(format!("sector dim {dim}, H dim {}", problem.hamiltonians[0].dim())));
    }
    let g = problem.grid;
    let gamma = problem.levels.gamma;
    let groups = state0.flip_groups();
    let mut rk = Rk4::new(dim, &[])?;
    let mut state = state0.clone();
    let tr0 = state.total_trace();
    let mut traj = Trajectory::with_capacity(g.sample_count());
    let f_of = |t: f64| problem.hamiltonians[0].bias(t).unwrap_or(f64::NAN);
    let record = |traj: &mut Trajectory, t: f64, st: &SectorState| {
        let red = st.reduced_matrix();
        let drift = real_trace(&red) - tr0;
        let purity = purity_of(&red);
        traj.push_sample(t, DensityMatrix::from_hermitian_unchecked(red), f_of(t), drift, purity);
    };
    record(&mut traj, g.t0, &state);
    let mut max_residual = 0.0f64;
    for k in 0..g.steps {
        let t = g.time(k);
        state.relax(&groups, gamma, 0.5 * g.dt);
        for (h, rho) in problem.hamiltonians.iter().zip(state.sectors.iter_mut()) {
            if rho.max_abs() == 0.0 {
                continue;
            }
            max_residual = max_residual.max(rk.step(h, t, g.dt, rho));
        }
        state.relax(&groups, gamma, 0.5 * g.dt);
        let drift = (state.total_trace() - tr0).abs();
        if !(drift <= TRACE_ABORT) {
            return Err(Error::StepTooLarge(format!("trace drift {drift:.3e} at t = {}", g.time(k + 1))));
        }
        if g.is_sample(k + 1) {
            record(&mut traj, g.time(k + 1), &state);
        }
    }
    traj.max_hermitian_residual = max_residual;
    Ok(traj)
}
