//! Named states in the global basis ordering (`|1⟩` before `|0⟩`, qubit 1 leftmost).

use crate::qmath::{ComplexMatrix, PureState, C64};

fn index_of(bits: &[bool]) -> usize {
    // `|1⟩` is local index 0.
    bits.iter().fold(0, |acc, &one| (acc << 1) | usize::from(!one))
}

fn bits_of(index: usize, n: usize) -> Vec<bool> {
    (0..n).map(|k| (index >> (n - 1 - k)) & 1 == 0).collect()
}

/// Computational basis state from a string of `'1'`/`'0'`, e.g. `ket("10")`.
pub fn ket(bits: &str) -> PureState {
    let b: Vec<bool> = bits
        .chars()
        .map(|c| match c {
            '1' => true,
            '0' => false,
            _ => panic!("ket label must contain only 0 and 1, got {bits:?}"),
        })
        .collect();
    PureState::basis(1 << b.len(), index_of(&b))
}

/// Normalised real combination of basis kets, e.g. `[("10", 1.0), ("01", -1.0)]`.
pub fn ket_combo(terms: &[(&str, f64)]) -> PureState {
    let n = terms[0].0.len();
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    for (label, c) in terms {
        assert_eq!(label.len(), n);
        let k = ket(label);
        for (a, b) in amps.iter_mut().zip(k.amplitudes()) {
            *a += b * *c;
        }
    }
    PureState::normalized(amps).expect("non-zero combination")
}

/// `(|10⟩ + |01⟩)/√2`
pub fn psi_plus() -> PureState {
    ket_combo(&[("10", 1.0), ("01", 1.0)])
}

/// `(|10⟩ − |01⟩)/√2`
pub fn psi_minus() -> PureState {
    ket_combo(&[("10", 1.0), ("01", -1.0)])
}

/// `(|11⟩ + |00⟩)/√2`
pub fn phi_plus() -> PureState {
    ket_combo(&[("11", 1.0), ("00", 1.0)])
}

/// Normalised symmetric `n`-qubit state with `ones` qubits in `|1⟩`.
pub fn symmetric_state(n: usize, ones: usize) -> PureState {
    assert!(ones <= n);
    let dim = 1usize << n;
    let amps: Vec<C64> = (0..dim)
        .map(|i| {
            let k = bits_of(i, n).iter().filter(|&&b| b).count();
            C64::new(if k == ones { 1.0 } else { 0.0 }, 0.0)
        })
        .collect();
    PureState::normalized(amps).expect("non-empty symmetric class")
}

/// `|W⟩_N`: one qubit in `|1⟩`, the rest in `|0⟩`.
pub fn w_state(n: usize) -> PureState {
    symmetric_state(n, 1)
}

/// `(|1…1⟩ + |0…0⟩)/√2`
pub fn ghz_state(n: usize) -> PureState {
    let dim = 1usize << n;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    amps[0] = C64::new(1.0, 0.0);
    amps[dim - 1] = C64::new(1.0, 0.0);
    PureState::normalized(amps).expect("non-zero")
}

/// Symmetric-sector basis vector `m` (ordered `m = n, …, 0` ones) as a sector
/// amplitude vector of length `n + 1`.
pub fn sector_basis(n: usize, ones: usize) -> PureState {
    PureState::basis(n + 1, n - ones)
}

/// Operator sending qubit `i` to position `perm[i]`.
pub fn permutation_operator(perm: &[usize]) -> ComplexMatrix {
    let n = perm.len();
    let dim = 1usize << n;
    let mut p = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let b = bits_of(i, n);
        let mut out = vec![false; n];
        for (k, &bk) in b.iter().enumerate() {
            out[perm[k]] = bk;
        }
        p[(index_of(&out), i)] = C64::new(1.0, 0.0);
    }
    p
}

/// Two-qubit SWAP.
pub fn swap_operator() -> ComplexMatrix {
    permutation_operator(&[1, 0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_ordering() {
        assert_eq!(ket("11").amplitudes()[0], C64::new(1.0, 0.0));
        assert_eq!(ket("10").amplitudes()[1], C64::new(1.0, 0.0));
        assert_eq!(ket("01").amplitudes()[2], C64::new(1.0, 0.0));
        assert_eq!(ket("00").amplitudes()[3], C64::new(1.0, 0.0));
        assert_eq!(ket("110").amplitudes()[1], C64::new(1.0, 0.0));
    }

    #[test]
    fn w_states() {
        assert!((w_state(2).inner(&psi_plus()).norm() - 1.0).abs() < 1e-15);
        let w = w_state(3);
        let expected = ket_combo(&[("100", 1.0), ("010", 1.0), ("001", 1.0)]);
        assert!((w.inner(&expected).norm() - 1.0).abs() < 1e-15);
        assert!((ghz_state(2).inner(&phi_plus()).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn swap_exchanges_qubits() {
        let s = swap_operator();
        let v = s.matvec(ket("10").amplitudes());
        assert_eq!(v, ket("01").amplitudes().to_vec());
        let p = permutation_operator(&[1, 2, 0]);
        let v = p.matvec(ket("100").amplitudes());
        assert_eq!(v, ket("010").amplitudes().to_vec());
    }
}
