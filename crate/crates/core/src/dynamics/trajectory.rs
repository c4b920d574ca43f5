use crate::error::{Error, Result};
use crate::qmath::DensityMatrix;

/// Sampled states plus named real series on the same time base.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    observables: Vec<(String, Vec<f64>)>,
    /// Largest Hermitian residual seen before the per-step re-symmetrisation.
    pub max_hermitian_residual: f64,
}

impl Trajectory {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            observables: ["f", "trace_drift", "purity"].iter().map(|k| (k.to_string(), Vec::with_capacity(n))).collect(),
            max_hermitian_residual: 0.0,
        }
    }

    pub(crate) fn push_sample(&mut self, t: f64, rho: DensityMatrix, f: f64, trace_drift: f64, purity: f64) {
        debug_assert!(self.times.last().is_none_or(|&last| t > last));
        self.times.push(t);
        self.states.push(rho);
        self.observables[0].1.push(f);
        self.observables[1].1.push(trace_drift);
        self.observables[2].1.push(purity);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_slice())
    }

    pub fn observable_names(&self) -> impl Iterator<Item = &str> {
        self.observables.iter().map(|(k, _)| k.as_str())
    }

    /// Add or replace a series; its length must match the time base.
    pub fn set_observable(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.times.len() {
            return Err(Error::DimensionMismatch(format!(
                "series {name} has {} points, trajectory has {}",
                values.len(),
                self.times.len()
            )));
        }
        match self.observables.iter_mut().find(|(k, _)| k == name) {
            Some((_, v)) => *v = values,
            None => self.observables.push((name.to_string(), values)),
        }
        Ok(())
    }

    /// Apply `g` to every sampled state and store the result as a series.
    pub fn derive(&mut self, name: &str, g: impl Fn(&DensityMatrix) -> Result<f64>) -> Result<()> {
        let values = self.states.iter().map(g).collect::<Result<Vec<_>>>()?;
        self.set_observable(name, values)
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.observable("trace_drift").map_or(0.0, |v| v.iter().fold(0.0f64, |m, x| m.max(x.abs())))
    }
}
