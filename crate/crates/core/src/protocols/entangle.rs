use crate::dynamics::{integrate, DrivenHamiltonian, EvolutionProblem, Trajectory};
use crate::error::{Error, Result};
use crate::measures::{eof, von_neumann_entropy};
use crate::model::{h2_family, left_projector_channel, states, BiasSchedule, NoiseChannel};
use crate::qmath::{partial_trace_matrix, DensityMatrix};

/// Bell-pair generation by sweeping the bias through crossing A.
#[derive(Debug, Clone)]
pub struct EntangleSetup {
    pub omega: f64,
    pub lambda: f64,
    pub schedule: BiasSchedule,
    pub channels: Vec<NoiseChannel>,
    pub rho0: DensityMatrix,
    pub t_end: f64,
    pub dt: Option<f64>,
    pub sample_every: usize,
}

impl EntangleSetup {
    /// `ω = 0.05λ`, `f(t) = (−2 + t/2000)λ` from `|11⟩` until `f = 2λ`.
    pub fn closed(lambda: f64) -> Self {
        Self {
            omega: 0.05 * lambda,
            lambda,
            schedule: BiasSchedule::linear(-2.0 * lambda, lambda / 2000.0),
            channels: Vec::new(),
            rho0: DensityMatrix::from_pure(&states::ket("11")),
            t_end: 8000.0,
            dt: None,
            sample_every: 200,
        }
    }

    /// Left-projector coupling on both qubits at rate `gamma`.
    pub fn with_left_projector_noise(mut self, gamma: f64) -> Result<Self> {
        self.channels = vec![left_projector_channel(1, 2, gamma)?, left_projector_channel(2, 2, gamma)?];
        Ok(self)
    }
}

/// Integrates the two-well master equation and adds the `E` (first-qubit
/// entropy) and `Ef` series.
pub fn run_entanglement_generation(setup: &EntangleSetup) -> Result<Trajectory> {
    if setup.rho0.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("two-qubit state expected, got dimension {}", setup.rho0.dim())));
    }
    let ham = DrivenHamiltonian::new(h2_family(setup.omega, setup.lambda), setup.schedule);
    let problem = EvolutionProblem::new(ham, setup.channels.clone(), 0.0, setup.t_end, setup.dt, setup.sample_every)?;
    let mut traj = integrate(&problem, &setup.rho0)?;
    add_entanglement_series(&mut traj)?;
    Ok(traj)
}

pub(crate) fn add_entanglement_series(traj: &mut Trajectory) -> Result<()> {
    traj.derive("E", |rho| von_neumann_entropy(&partial_trace_matrix(rho.matrix(), &[2, 2], &[0])?))?;
    traj.derive("Ef", eof)
}

/// Sample indices whose bias lies strictly inside `(lo, hi)`.
pub fn samples_in_bias_window(traj: &Trajectory, lo: f64, hi: f64) -> Vec<usize> {
    traj.observable("f")
        .map(|f| (0..f.len()).filter(|&k| f[k] > lo && f[k] < hi).collect())
        .unwrap_or_default()
}

/// Value of series `name` at the sample whose bias is closest to `f`.
pub fn value_near_bias(traj: &Trajectory, name: &str, f: f64) -> Option<f64> {
    let fs = traj.observable("f")?;
    let ys = traj.observable(name)?;
    let k = (0..fs.len()).min_by(|&a, &b| (fs[a] - f).abs().total_cmp(&(fs[b] - f).abs()))?;
    Some(ys[k])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_closed_run_has_all_series() {
        let mut s = EntangleSetup::closed(1.0);
        s.t_end = 100.0;
        s.sample_every = 1000;
        let t = run_entanglement_generation(&s).unwrap();
        for name in ["f", "E", "Ef", "trace_drift", "purity"] {
            assert_eq!(t.observable(name).unwrap().len(), t.len());
        }
        assert!(t.observable("E").unwrap()[0].abs() < 1e-12);
        assert!((value_near_bias(&t, "f", -1.95).unwrap() + 1.95).abs() < 0.01);
    }
}
