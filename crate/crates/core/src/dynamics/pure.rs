use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, PureState, C64};

use super::grid::TimeGrid;
use super::hamiltonian::Hamiltonian;

/// Norm drift beyond this aborts a pure-state run.
const NORM_ABORT: f64 = 1e-6;

fn apply_minus_i_h(h: &ComplexMatrix, psi: &[C64], out: &mut [C64]) {
    let n = psi.len();
    let a = h.as_slice();
    for i in 0..n {
        let row = &a[i * n..(i + 1) * n];
        let mut s = C64::new(0.0, 0.0);
        for (hij, pj) in row.iter().zip(psi) {
            s += hij * pj;
        }
        out[i] = C64::new(s.im, -s.re);
    }
}

/// RK4 on `i dψ/dt = H(t)ψ`, calling `observe(t, ψ)` at each sample.
///
/// No renormalisation; the returned state is normalised only for the final
/// hand-off, and a norm drift above `1e-6` is an error.
pub fn integrate_pure<H: Hamiltonian>(
    ham: &H,
    psi0: &PureState,
    grid: &TimeGrid,
    mut observe: impl FnMut(f64, &[C64]),
) -> Result<PureState> {
    let n = ham.dim();
    if psi0.dim() != n {
        return Err(Error::DimensionMismatch(format!("psi0 has {} amplitudes, H is {n}", psi0.dim())));
    }
    let z = C64::new(0.0, 0.0);
    let mut psi = psi0.amplitudes().to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![z; n], vec![z; n], vec![z; n], vec![z; n], vec![z; n]);
    let mut h0 = ComplexMatrix::zeros(n, n);
    let mut hm = h0.clone();
    let mut h1 = h0.clone();
    let dt = grid.dt;
    observe(grid.t0, &psi);
    for k in 0..grid.steps {
        let t = grid.time(k);
        ham.fill(t, &mut h0);
        ham.fill(t + 0.5 * dt, &mut hm);
        ham.fill(t + dt, &mut h1);
        apply_minus_i_h(&h0, &psi, &mut k1);
        for i in 0..n {
            tmp[i] = psi[i] + k1[i] * (0.5 * dt);
        }
        apply_minus_i_h(&hm, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = psi[i] + k2[i] * (0.5 * dt);
        }
        apply_minus_i_h(&hm, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = psi[i] + k3[i] * dt;
        }
        apply_minus_i_h(&h1, &tmp, &mut k4);
        for i in 0..n {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
        if grid.is_sample(k + 1) {
            let drift = (psi.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs();
            if !(drift <= NORM_ABORT) {
                return Err(Error::StepTooLarge(format!("norm drift {drift:.3e} at t = {}", grid.time(k + 1))));
            }
            observe(grid.time(k + 1), &psi);
        }
    }
    PureState::normalized(psi)
}
