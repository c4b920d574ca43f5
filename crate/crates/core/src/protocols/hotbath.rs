use crate::dynamics::{integrate_hotbath, HotBathProblem, Trajectory, VerticalTopology};
use crate::error::Result;
use crate::model::{states, BiasSchedule, VerticalLevels};
use crate::par;
use crate::qmath::DensityMatrix;

use super::entangle::add_entanglement_series;

#[derive(Debug, Clone)]
pub struct HotBathSetup {
    pub levels: VerticalLevels,
    pub topology: VerticalTopology,
    pub schedule: BiasSchedule,
    pub gammas: Vec<f64>,
    pub rho0: DensityMatrix,
    pub t_end: f64,
    pub dt: Option<f64>,
    pub sample_every: usize,
}

impl HotBathSetup {
    /// Two vertical levels with `ω = (0.05, 0.1)`, `λ(E_i,E_j) = 20√(ω_iω_j)`,
    /// `f = −3 + t/500`, flip rates 0, 1 and 1000.
    pub fn standard() -> Result<Self> {
        Ok(Self {
            levels: VerticalLevels::geometric(vec![0.05, 0.1], 20.0, 0.0)?,
            topology: VerticalTopology::PerParticle,
            schedule: BiasSchedule::linear(-3.0, 1.0 / 500.0),
            gammas: vec![0.0, 1.0, 1000.0],
            rho0: DensityMatrix::from_pure(&states::ket("11")),
            t_end: 2500.0,
            dt: None,
            sample_every: 100,
        })
    }
}

/// One trajectory per flip rate, in input order, each with `E` and `Ef`
/// series of the vertical-traced state.
pub fn run_hotbath(setup: &HotBathSetup) -> Result<Vec<(f64, Trajectory)>> {
    par::try_map(&setup.gammas, |&gamma| {
        let levels = setup.levels.with_gamma(gamma)?;
        let problem = HotBathProblem::new(
            levels,
            2,
            setup.topology,
            setup.schedule,
            0.0,
            setup.t_end,
            setup.dt,
            setup.sample_every,
        )?;
        let mut traj = integrate_hotbath(&problem, &problem.initial_state(&setup.rho0))?;
        add_entanglement_series(&mut traj)?;
        Ok((gamma, traj))
    })
}

/// First sample time at which series `name` reaches half of its maximum.
pub fn half_rise_time(traj: &Trajectory, name: &str) -> Option<f64> {
    let ys = traj.observable(name)?;
    let peak = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return None;
    }
    ys.iter().position(|&y| y >= 0.5 * peak).map(|k| traj.times[k])
}

pub fn peak(traj: &Trajectory, name: &str) -> Option<f64> {
    traj.observable(name).map(|ys| ys.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}
