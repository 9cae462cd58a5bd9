//! Qubit gates and register embeddings.

use super::{kron, DenseMatrix, C64, ONE, ZERO};

pub fn hadamard() -> DenseMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DenseMatrix::from_real(2, 2, &[s, s, s, -s]).expect("finite")
}

pub fn pauli_x() -> DenseMatrix {
    DenseMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("finite")
}

pub fn pauli_z() -> DenseMatrix {
    DenseMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("finite")
}

/// CNOT with the first qubit as control.
pub fn cnot() -> DenseMatrix {
    cnot_on(2, 0, 1)
}

/// Single-qubit `gate` acting on `qubit` of an `n_qubits` register (qubit 0
/// is the most significant).
pub fn embed_single(gate: &DenseMatrix, qubit: usize, n_qubits: usize) -> DenseMatrix {
    assert!(qubit < n_qubits, "qubit {qubit} out of range");
    let left = DenseMatrix::identity(1 << qubit);
    let right = DenseMatrix::identity(1 << (n_qubits - qubit - 1));
    let m = kron(&kron(&left, gate).expect("small"), &right).expect("small");
    DenseMatrix::new(m.rows(), m.cols(), m.data().to_vec())
        .and_then(|m| m.with_dims(vec![2; n_qubits]))
        .expect("qubit register")
}

/// CNOT between two qubits of an `n_qubits` register, as a permutation
/// matrix.
pub fn cnot_on(n_qubits: usize, control: usize, target: usize) -> DenseMatrix {
    assert!(control < n_qubits && target < n_qubits && control != target);
    let dim = 1usize << n_qubits;
    let cbit = 1 << (n_qubits - 1 - control);
    let tbit = 1 << (n_qubits - 1 - target);
    let mut data = vec![ZERO; dim * dim];
    for col in 0..dim {
        let row = if col & cbit != 0 { col ^ tbit } else { col };
        data[row * dim + col] = ONE;
    }
    DenseMatrix::new(dim, dim, data).and_then(|m| m.with_dims(vec![2; n_qubits])).expect("qubit register")
}

/// Column-vector convenience for tests and examples.
pub fn ket(bits: &[u8]) -> Vec<C64> {
    let idx = bits.iter().fold(0usize, |acc, &b| acc * 2 + b as usize);
    let mut v = vec![ZERO; 1 << bits.len()];
    v[idx] = ONE;
    v
}
