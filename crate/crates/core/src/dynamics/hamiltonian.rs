use crate::error::Result;
use crate::model::{AffineFamily, BiasSchedule};
use crate::qmath::{spectral_spread, ComplexMatrix};

/// A time-dependent Hermitian generator that can be refilled in place.
pub trait Hamiltonian: Sync {
    fn dim(&self) -> usize;

    fn fill(&self, t: f64, out: &mut ComplexMatrix);

    fn at(&self, t: f64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim(), self.dim());
        self.fill(t, &mut m);
        m
    }

    /// Bias value at `t`, when the Hamiltonian is bias-driven.
    fn bias(&self, _t: f64) -> Option<f64> {
        None
    }

    /// Upper bound on the spectral spread `E_max − E_min` over `[t0, t1]`.
    fn spread_bound(&self, t0: f64, t1: f64) -> Result<f64>;
}

impl<T: Hamiltonian + ?Sized> Hamiltonian for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn fill(&self, t: f64, out: &mut ComplexMatrix) {
        (**self).fill(t, out)
    }
    fn bias(&self, t: f64) -> Option<f64> {
        (**self).bias(t)
    }
    fn spread_bound(&self, t0: f64, t1: f64) -> Result<f64> {
        (**self).spread_bound(t0, t1)
    }
}

#[derive(Debug, Clone)]
pub struct ConstantHamiltonian(pub ComplexMatrix);

impl Hamiltonian for ConstantHamiltonian {
    fn dim(&self) -> usize {
        self.0.rows()
    }

    fn fill(&self, _t: f64, out: &mut ComplexMatrix) {
        out.as_mut_slice().copy_from_slice(self.0.as_slice());
    }

    fn spread_bound(&self, _t0: f64, _t1: f64) -> Result<f64> {
        spectral_spread(&self.0)
    }
}

/// `H(t) = base + f(t)·slope`.
#[derive(Debug, Clone)]
pub struct DrivenHamiltonian {
    pub family: AffineFamily,
    pub schedule: BiasSchedule,
}

impl DrivenHamiltonian {
    pub fn new(family: AffineFamily, schedule: BiasSchedule) -> Self {
        Self { family, schedule }
    }

    /// Extremes of `f` over `[t0, t1]`.
    fn bias_range(&self, t0: f64, t1: f64) -> (f64, f64) {
        const SAMPLES: usize = 256;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut take = |f: f64| {
            lo = lo.min(f);
            hi = hi.max(f);
        };
        for k in 0..=SAMPLES {
            take(self.schedule.value(t0 + (t1 - t0) * k as f64 / SAMPLES as f64));
        }
        if let BiasSchedule::RampHoldRamp { t_e, t_h, f_hold, .. } = self.schedule {
            if t1 >= t_e && t0 <= t_e + t_h {
                take(f_hold);
            }
        }
        (lo, hi)
    }
}

impl Hamiltonian for DrivenHamiltonian {
    fn dim(&self) -> usize {
        self.family.dim()
    }

    fn fill(&self, t: f64, out: &mut ComplexMatrix) {
        self.family.fill(self.schedule.value(t), out);
    }

    fn bias(&self, t: f64) -> Option<f64> {
        Some(self.schedule.value(t))
    }

    /// The spread is convex in `f`, so its maximum over a bias interval sits
    /// at one of the interval ends.
    fn spread_bound(&self, t0: f64, t1: f64) -> Result<f64> {
        let (lo, hi) = self.bias_range(t0, t1);
        Ok(spectral_spread(&self.family.at(lo))?.max(spectral_spread(&self.family.at(hi))?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{h2_family, RampShape};

    #[test]
    fn driven_fill_matches_builder() {
        let h = DrivenHamiltonian::new(h2_family(0.05, 1.0), BiasSchedule::linear(-2.0, 1.0 / 2000.0));
        let m = h.at(4000.0);
        assert!(m.max_abs_diff(&crate::model::build_h2(0.05, 1.0, 0.0)) < 1e-15);
        assert_eq!(h.bias(2000.0), Some(-1.0));
    }

    #[test]
    fn spread_bound_dominates_samples() {
        let h = DrivenHamiltonian::new(
            h2_family(0.05, 1.0),
            BiasSchedule::ramp_hold_ramp(10.0, 50.0, -1.5, 2.0, RampShape::Smooth),
        );
        let bound = h.spread_bound(0.0, 70.0).unwrap();
        for k in 0..=700 {
            let s = spectral_spread(&h.at(k as f64 * 0.1)).unwrap();
            assert!(s <= bound + 1e-12);
        }
    }
}
