use crate::error::{Error, Result};

/// Default step is this fraction of the inverse generator scale.
pub const DT_FRACTION: f64 = 0.02;
/// Hard ceiling on `dt · scale`.
pub const DT_LIMIT: f64 = 0.1;
/// Above this `dt · scale` a warning is logged.
pub const DT_WARN: f64 = 0.05;

/// Uniform fixed-step grid on `[t0, t1]`.
///
/// The requested step is shrunk so that an integer number of steps lands
/// exactly on `t1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    pub dt: f64,
    pub sample_every: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, dt: f64, sample_every: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) || t1 <= t0 {
            return Err(Error::InvalidArgument(format!("need t1 > t0, got [{t0}, {t1}]")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        if sample_every == 0 {
            return Err(Error::InvalidArgument("sample_every must be at least 1".into()));
        }
        let steps = ((t1 - t0) / dt).ceil().max(1.0) as usize;
        Ok(Self { t0, t1, steps, dt: (t1 - t0) / steps as f64, sample_every })
    }

    /// Grid honouring the step-size rule for a generator of the given scale.
    /// `dt = None` picks the default `DT_FRACTION / scale`.
    pub fn for_scale(t0: f64, t1: f64, dt: Option<f64>, scale: f64, sample_every: usize) -> Result<Self> {
        let dt = dt.unwrap_or_else(|| default_dt(scale));
        check_dt(dt, scale)?;
        Self::new(t0, t1, dt, sample_every)
    }

    pub fn time(&self, k: usize) -> f64 {
        if k >= self.steps {
            self.t1
        } else {
            self.t0 + k as f64 * self.dt
        }
    }

    pub fn is_sample(&self, k: usize) -> bool {
        k.is_multiple_of(self.sample_every) || k == self.steps
    }

    pub fn sample_count(&self) -> usize {
        self.steps / self.sample_every + 1 + usize::from(!self.steps.is_multiple_of(self.sample_every))
    }
}

pub fn default_dt(scale: f64) -> f64 {
    if scale > 0.0 {
        DT_FRACTION / scale
    } else {
        DT_FRACTION
    }
}

pub fn check_dt(dt: f64, scale: f64) -> Result<()> {
    let x = dt * scale;
    if x > DT_LIMIT {
        return Err(Error::StepTooLarge(format!("dt·‖H‖ = {x:.3} exceeds {DT_LIMIT}")));
    }
    if x > DT_WARN {
        log::warn!("dt·‖H‖ = {x:.3} is above {DT_WARN}; accuracy may suffer");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_lands_on_end() {
        let g = TimeGrid::new(0.0, 1.0, 0.3, 2).unwrap();
        assert_eq!(g.steps, 4);
        assert_eq!(g.time(4), 1.0);
        let samples: Vec<usize> = (0..=g.steps).filter(|&k| g.is_sample(k)).collect();
        assert_eq!(samples, vec![0, 2, 4]);
        assert_eq!(g.sample_count(), 3);
        let g = TimeGrid::new(0.0, 1.0, 0.2, 2).unwrap();
        assert_eq!(g.sample_count(), (0..=g.steps).filter(|&k| g.is_sample(k)).count());
    }

    #[test]
    fn step_rule() {
        assert!(matches!(TimeGrid::for_scale(0.0, 1.0, Some(0.2), 1.0, 1), Err(Error::StepTooLarge(_))));
        let g = TimeGrid::for_scale(0.0, 1.0, None, 4.0, 1).unwrap();
        assert!((g.dt - 0.005).abs() < 1e-15);
        assert!(TimeGrid::new(1.0, 1.0, 0.1, 1).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0.1, 0).is_err());
    }
}
