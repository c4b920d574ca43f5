use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RampShape {
    Linear,
    /// `sin²(πt/2t_e)` easing; zero slope at both ends of each ramp.
    #[default]
    Smooth,
}

/// Time dependence of the well bias `f(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BiasSchedule {
    Linear { f0: f64, rate: f64 },
    /// Rise from `f_start` to `f_hold` over `t_e`, hold for `t_h`, fall back over `t_e`.
    RampHoldRamp { t_e: f64, t_h: f64, f_start: f64, f_hold: f64, shape: RampShape },
}

impl BiasSchedule {
    pub fn linear(f0: f64, rate: f64) -> Self {
        BiasSchedule::Linear { f0, rate }
    }

    pub fn ramp_hold_ramp(t_e: f64, t_h: f64, f_start: f64, f_hold: f64, shape: RampShape) -> Self {
        BiasSchedule::RampHoldRamp { t_e, t_h, f_start, f_hold, shape }
    }

    /// `(f(t), ḟ(t))`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match *self {
            BiasSchedule::Linear { f0, rate } => (f0 + rate * t, rate),
            BiasSchedule::RampHoldRamp { t_e, t_h, f_start, f_hold, shape } => {
                let span = f_hold - f_start;
                let (s, ds) = if t <= 0.0 {
                    (0.0, 0.0)
                } else if t < t_e {
                    ramp(shape, t / t_e, t_e)
                } else if t <= t_e + t_h {
                    (1.0, 0.0)
                } else if t < 2.0 * t_e + t_h {
                    let (s, ds) = ramp(shape, (2.0 * t_e + t_h - t) / t_e, t_e);
                    (s, -ds)
                } else {
                    (0.0, 0.0)
                };
                (f_start + span * s, span * ds)
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    /// Natural end of the schedule, if it has one.
    pub fn end_time(&self) -> Option<f64> {
        match *self {
            BiasSchedule::Linear { .. } => None,
            BiasSchedule::RampHoldRamp { t_e, t_h, .. } => Some(2.0 * t_e + t_h),
        }
    }

    /// First non-negative time at which the bias reaches `f`.
    pub fn time_of(&self, f: f64) -> Option<f64> {
        match *self {
            BiasSchedule::Linear { f0, rate } => {
                if rate == 0.0 {
                    return (f == f0).then_some(0.0);
                }
                let t = (f - f0) / rate;
                (t >= 0.0).then_some(t)
            }
            BiasSchedule::RampHoldRamp { t_e, f_start, f_hold, shape, .. } => {
                let span = f_hold - f_start;
                if span == 0.0 {
                    return (f == f_start).then_some(0.0);
                }
                let s = (f - f_start) / span;
                if !(0.0..=1.0).contains(&s) {
                    return None;
                }
                Some(match shape {
                    RampShape::Linear => s * t_e,
                    RampShape::Smooth => 2.0 * t_e / PI * s.sqrt().asin(),
                })
            }
        }
    }

    /// Largest `|ḟ|` over the schedule.
    pub fn max_rate(&self) -> f64 {
        match *self {
            BiasSchedule::Linear { rate, .. } => rate.abs(),
            BiasSchedule::RampHoldRamp { t_e, f_start, f_hold, shape, .. } => {
                let lin = (f_hold - f_start).abs() / t_e;
                match shape {
                    RampShape::Linear => lin,
                    RampShape::Smooth => lin * PI / 2.0,
                }
            }
        }
    }
}

/// Ramp fraction and its time derivative at `x = t/t_e ∈ [0, 1]`.
fn ramp(shape: RampShape, x: f64, t_e: f64) -> (f64, f64) {
    match shape {
        RampShape::Linear => (x, 1.0 / t_e),
        RampShape::Smooth => {
            let a = PI * x / 2.0;
            (a.sin().powi(2), PI / (2.0 * t_e) * (2.0 * a).sin())
        }
    }
}

pub fn bias_eval(s: &BiasSchedule, t: f64) -> (f64, f64) {
    s.eval(t)
}
