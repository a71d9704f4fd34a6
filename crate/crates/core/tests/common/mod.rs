#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use qformula::linalg::ComplexMatrix;
use qformula::{Circuit, Gate};

pub fn to_dmatrix(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

/// The gate as a `2^m × 2^m` matrix: `P⁻¹ (U ⊗ I) P`, where `P` moves the
/// targets (in order) to the most significant positions.
pub fn embedded(gate: &Gate, m: usize) -> DMatrix<C64> {
    let k = gate.arity();
    let rest: Vec<usize> = (0..m).filter(|q| !gate.targets().contains(q)).collect();
    let order: Vec<usize> = gate.targets().iter().copied().chain(rest).collect();
    let dim = 1usize << m;
    // P sends |b_0 … b_{m-1}⟩ to |b_{order[0]} … b_{order[m-1]}⟩
    let permute = |index: usize| {
        order.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
            let bit = (index >> (m - 1 - q)) & 1;
            acc | (bit << (m - 1 - pos))
        })
    };
    let p = DMatrix::from_fn(dim, dim, |r, c| {
        if permute(c) == r {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let u = to_dmatrix(gate.matrix()).kronecker(&DMatrix::identity(1 << (m - k), 1 << (m - k)));
    p.adjoint() * u * p
}

/// Product of the embedded gate matrices, last gate leftmost.
pub fn operator_oracle(circuit: &Circuit) -> DMatrix<C64> {
    let m = circuit.num_qubits();
    circuit
        .gates()
        .iter()
        .fold(DMatrix::identity(1 << m, 1 << m), |acc, g| {
            embedded(g, m) * acc
        })
}

pub fn max_entry_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
