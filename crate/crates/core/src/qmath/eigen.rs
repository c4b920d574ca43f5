//! Cyclic Jacobi diagonalisation of small dense Hermitian matrices.

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 64;
/// Components below this magnitude are skipped when fixing eigenvector phases.
const PHASE_TOL: f64 = 1e-10;

/// Eigenvalues in ascending order with orthonormal eigenvectors stored as the
/// columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `Σ_k g(E_k) v_k v_k†`.
    pub fn map_values(&self, g: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let gk = g(self.values[k]);
            for i in 0..n {
                let vik = self.vectors[(i, k)] * gk;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Diagonalise a Hermitian matrix.
///
/// Input must be Hermitian to `1e-10` relative to its largest entry.
/// Eigenvalues are ascending; each eigenvector is rotated so that its first
/// significant component is real and positive. Exactly tied eigenvalues keep
/// the order of their leading component index.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<Eigensystem> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!("eigensystem of {}x{} matrix", h.rows(), h.cols())));
    }
    let residual = h.hermitian_residual();
    if residual > HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::NonHermitianInput { residual });
    }
    let n = h.rows();
    let mut a = h.clone();
    a.symmetrize_in_place();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let values_raw: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let lead: Vec<usize> = (0..n).map(|k| leading_index(&v, k)).collect();
    order.sort_by(|&x, &y| {
        values_raw[x]
            .partial_cmp(&values_raw[y])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| if values_raw[x] == values_raw[y] { lead[x].cmp(&lead[y]) } else { std::cmp::Ordering::Equal })
    });

    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(values_raw[k]);
        let li = lead[k];
        let z = v[(li, k)];
        let phase = if z.norm() > 0.0 { z.conj() / z.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            vectors[(i, col)] = v[(i, k)] * phase;
        }
    }
    Ok(Eigensystem { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigensystem(h).map(|e| e.values)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn leading_index(v: &ComplexMatrix, k: usize) -> usize {
    (0..v.rows()).find(|&i| v[(i, k)].norm() > PHASE_TOL).unwrap_or(0)
}

/// One complex Jacobi rotation annihilating `a[p,q]`.
///
/// The rotation is `G = D·P` with `D = diag(1, e^{-iφ})` making the pivot
/// real and `P` the real symmetric Jacobi rotation; `a ← G†aG`, `v ← vG`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Pivots far below rounding of the diagonal are simply dropped.
    if mag <= 1e-18 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let e = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ec = e.conj();
    let n = a.rows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ec * s;
        a[(k, q)] = akp * s + akq * ec * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * e * s;
        a[(q, k)] = apk * s + aqk * e * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ec * s;
        v[(k, q)] = vkp * s + vkq * ec * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::pauli;
    use proptest::prelude::*;

    fn random_hermitian(n: usize, entries: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        let mut it = entries.iter().copied().cycle();
        for i in 0..n {
            m[(i, i)] = C64::new(it.next().unwrap(), 0.0);
            for j in (i + 1)..n {
                let z = C64::new(it.next().unwrap(), it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let h = ComplexMatrix::from_real_diag(&[5.0, 3.0, -5.0, -3.0]);
        let es = hermitian_eigensystem(&h).unwrap();
        assert_eq!(es.values, vec![-5.0, -3.0, 3.0, 5.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let es = hermitian_eigensystem(&pauli::x()).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-14);
        assert!((es.values[1] - 1.0).abs() < 1e-14);
        // first component real positive
        for k in 0..2 {
            let v = es.vector(k);
            assert!(v[0].re > 0.0 && v[0].im.abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eigensystem(&m), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn complex_off_diagonal_pauli_y() {
        let es = hermitian_eigensystem(&pauli::y()).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-14 && (es.values[1] - 1.0).abs() < 1e-14);
        let v = es.vector(1);
        let yv = pauli::y().matvec(&v);
        for i in 0..2 {
            assert!((yv[i] - v[i]).norm() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn reconstruction_and_orthonormality(
            n in 2usize..9,
            entries in proptest::collection::vec(-3.0f64..3.0, 64..=64),
        ) {
            let h = random_hermitian(n, &entries);
            let es = hermitian_eigensystem(&h).unwrap();
            let norm = h.frobenius_norm().max(1e-300);
            for w in es.values.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            let rebuilt = es.map_values(|e| C64::new(e, 0.0));
            prop_assert!(rebuilt.max_abs_diff(&h) <= 1e-9 * norm);
            let vtv = &es.vectors.adjoint() * &es.vectors;
            prop_assert!(vtv.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-10);
            for k in 0..n {
                let v = es.vector(k);
                let hv = h.matvec(&v);
                for i in 0..n {
                    prop_assert!((hv[i] - v[i] * es.values[k]).norm() <= 1e-9 * norm);
                }
            }
        }
    }
}
