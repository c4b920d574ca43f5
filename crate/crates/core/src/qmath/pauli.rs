//! Single-qubit operators in the `(|1⟩, |0⟩)` ordering, so that `σ_z|1⟩ = +|1⟩`.

use super::matrix::{kron_all, ComplexMatrix, C64};

pub fn id() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn y() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)])
}

pub fn z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

/// `|1⟩⟨1| = ½(𝟙 + σ_z)`.
pub fn left_projector() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, 0.0])
}

/// `op` acting on qubit `site` (zero-based, leftmost factor first) of `n`.
pub fn embed(op: &ComplexMatrix, site: usize, n: usize) -> ComplexMatrix {
    assert!(site < n, "site {site} out of range for {n} qubits");
    let factors: Vec<ComplexMatrix> = (0..n).map(|k| if k == site { op.clone() } else { id() }).collect();
    kron_all(&factors)
}

/// `a` on qubit `i` times `b` on qubit `j`.
pub fn embed_pair(a: &ComplexMatrix, i: usize, b: &ComplexMatrix, j: usize, n: usize) -> ComplexMatrix {
    assert!(i < n && j < n && i != j);
    let factors: Vec<ComplexMatrix> = (0..n)
        .map(|k| {
            if k == i {
                a.clone()
            } else if k == j {
                b.clone()
            } else {
                id()
            }
        })
        .collect();
    kron_all(&factors)
}
