//! Small fixed circuits used in tests, documentation and the CLI fixtures.
//!
//! The two four-qubit circuits share their input labels (qubit 0 is the
//! bottom wire): `x1, x2, |0⟩, x1`. Both place a three-qubit gate first, so
//! they carry an arity bound of 3.

use crate::circuit::{gates, Circuit, InputLabel};

fn shared_labels() -> Vec<InputLabel> {
    vec![
        InputLabel::Variable(1),
        InputLabel::Variable(2),
        InputLabel::Constant(false),
        InputLabel::Variable(1),
    ]
}

/// The first gate fans out to three later gates that all reach the output:
/// not a formula.
pub fn fanout_circuit() -> Circuit {
    let mut c = Circuit::new(shared_labels(), 3).with_arity_bound(3);
    c.push(vec![3, 2, 1], gates::toffoli()).unwrap();
    c.push(vec![1, 0], gates::cnot()).unwrap();
    c.push(vec![2, 1], gates::cnot()).unwrap();
    c.push(vec![2, 3], gates::cnot()).unwrap();
    c
}

/// Same labels, output on qubit 1: the gates feeding the output form a
/// tree, and the last gate is outside the computation graph.
pub fn tree_circuit() -> Circuit {
    let mut c = Circuit::new(shared_labels(), 1).with_arity_bound(3);
    c.push(vec![3, 2, 1], gates::toffoli()).unwrap();
    c.push(vec![0], gates::h()).unwrap();
    c.push(vec![1, 0], gates::cnot()).unwrap();
    c.push(vec![2, 3], gates::cnot()).unwrap();
    c
}

/// `x1 ∧ x2` into a `|0⟩` ancilla with a Toffoli gate.
pub fn toffoli_and() -> Circuit {
    let labels = vec![
        InputLabel::Variable(1),
        InputLabel::Variable(2),
        InputLabel::Constant(false),
    ];
    let mut c = Circuit::new(labels, 2).with_arity_bound(3);
    c.push(vec![0, 1, 2], gates::toffoli()).unwrap();
    c
}
