use crate::error::{Error, Result};
use crate::qmath::{hermitian_eigensystem, C64};

use super::hamiltonian::Hamiltonian;

/// Gaps below this count as an exact degeneracy.
pub const DEGENERACY_GAP: f64 = 1e-12;

/// One instantaneous eigenlevel followed along a time grid.
#[derive(Debug, Clone)]
pub struct TrackedLevel {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

/// Instantaneous eigenpair `level` (ascending index) at every `t`.
///
/// Each eigenvector's phase is chosen to make its overlap with the previous
/// sample real and positive.
pub fn adiabatic_track<H: Hamiltonian>(ham: &H, level: usize, times: &[f64]) -> Result<TrackedLevel> {
    let dim = ham.dim();
    if level >= dim {
        return Err(Error::InvalidArgument(format!("level {level} out of range for dimension {dim}")));
    }
    let mut out = TrackedLevel { times: times.to_vec(), energies: Vec::new(), vectors: Vec::new() };
    for &t in times {
        let es = hermitian_eigensystem(&ham.at(t))?;
        let e = es.values[level];
        let below = if level > 0 { e - es.values[level - 1] } else { f64::INFINITY };
        let above = if level + 1 < dim { es.values[level + 1] - e } else { f64::INFINITY };
        let gap = below.min(above);
        if gap < DEGENERACY_GAP {
            return Err(Error::DegenerateLevel { t, gap });
        }
        let mut v = es.vector(level);
        if let Some(prev) = out.vectors.last() {
            let ov: C64 = prev.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            if ov.norm() > 0.0 {
                let phase = ov.conj() / ov.norm();
                v.iter_mut().for_each(|z| *z *= phase);
            }
        }
        out.energies.push(e);
        out.vectors.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{ConstantHamiltonian, DrivenHamiltonian};
    use crate::model::{build_h2, hn_sym_family, BiasSchedule};

    #[test]
    fn constant_series() {
        let h = ConstantHamiltonian(build_h2(0.05, 1.0, 0.3));
        let tr = adiabatic_track(&h, 0, &[0.0, 1.0, 2.0]).unwrap();
        assert!(tr.energies.windows(2).all(|w| w[0] == w[1]));
        assert!(tr.vectors.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn lowest_triplet_level_becomes_psi_plus() {
        // Sym basis (|11⟩, |Ψ⁺⟩, |00⟩); f runs −2 → 0.
        let (omega, lambda) = (0.05, 1.0);
        let h = DrivenHamiltonian::new(hn_sym_family(2, omega, lambda).unwrap(), BiasSchedule::linear(-2.0, 1.0));
        let times: Vec<f64> = (0..=200).map(|k| k as f64 * 0.01).collect();
        let tr = adiabatic_track(&h, 0, &times).unwrap();
        // first-order admixture 2ω²/(2f + 2λ)² at f = −2
        let admix = 2.0 * omega * omega / 4.0;
        assert!((1.0 - tr.vectors[0][0].norm_sqr() - admix).abs() < 0.1 * admix);
        let last = tr.vectors.last().unwrap();
        let w = 1.0 - last[1].norm_sqr();
        assert!(w < 4.0 * omega * omega / (lambda * lambda), "{w}");
        for pair in tr.vectors.windows(2) {
            let ov: C64 = pair[0].iter().zip(&pair[1]).map(|(a, b)| a.conj() * b).sum();
            assert!(ov.re > 0.9 && ov.im.abs() < 1e-12);
        }
    }

    #[test]
    fn three_qubit_ground_sequence() {
        // Basis (|111⟩, W110, W001, |000⟩), ground state for f from −3 to 3.
        let h = DrivenHamiltonian::new(hn_sym_family(3, 0.05, 1.0).unwrap(), BiasSchedule::linear(-3.0, 1.0));
        let windows = [(-3.0, 0), (-1.0, 1), (1.0, 2), (3.0, 3)];
        let times: Vec<f64> = windows.iter().map(|(f, _)| f + 3.0).collect();
        let tr = adiabatic_track(&h, 0, &times).unwrap();
        for (v, (_, idx)) in tr.vectors.iter().zip(windows) {
            assert!(v[idx].norm_sqr() > 0.99);
        }
    }

    #[test]
    fn exact_degeneracy_is_reported() {
        let h = DrivenHamiltonian::new(hn_sym_family(2, 0.0, 1.0).unwrap(), BiasSchedule::linear(-1.0, 0.0));
        assert!(matches!(adiabatic_track(&h, 0, &[0.0]), Err(Error::DegenerateLevel { .. })));
    }
}
