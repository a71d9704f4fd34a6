mod common;

use common::{max_entry_diff, operator_oracle, to_dmatrix};
use num_complex::Complex64 as C64;
use qformula::circuit::{gates, InputLabel};
use qformula::examples::{fanout_circuit, toffoli_and, tree_circuit};
use qformula::generate::{random_formula, FormulaParams};
use qformula::linalg::{random_unit_vector, random_unitary};
use qformula::{Circuit, Simulator, StateVector};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_circuit(rng: &mut ChaCha8Rng, m: usize, t: usize) -> Circuit {
    let mut c = Circuit::new(vec![InputLabel::Constant(false); m], rng.random_range(0..m))
        .with_arity_bound(3);
    let qubits: Vec<usize> = (0..m).collect();
    for _ in 0..t {
        let k = rng.random_range(1..=m.min(3));
        let targets: Vec<usize> = qubits.choose_multiple(rng, k).copied().collect();
        c.push(targets, random_unitary(1 << k, rng)).unwrap();
    }
    c
}

#[test]
fn embedded_product_matches_stepwise_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let sim = Simulator::default();
    for _ in 0..200 {
        let m = rng.random_range(1..=4);
        let t = rng.random_range(0..=12);
        let c = random_circuit(&mut rng, m, t);
        let op = to_dmatrix(&sim.operator(&c).unwrap());
        let diff = max_entry_diff(&op, &operator_oracle(&c));
        assert!(diff <= 1e-10, "{diff}");
    }
}

#[test]
fn small_generated_formulas_match_the_oracle() {
    let params = FormulaParams {
        leaves: (2, 4),
        ..FormulaParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let sim = Simulator::default();
    for _ in 0..100 {
        let c = random_formula(&mut rng, &params).circuit;
        let diff = max_entry_diff(
            &to_dmatrix(&sim.operator(&c).unwrap()),
            &operator_oracle(&c),
        );
        assert!(diff <= 1e-10, "{diff}");
    }
}

#[test]
fn norm_is_preserved_along_every_run() {
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    for _ in 0..100 {
        let m = rng.random_range(1..=6);
        let c = random_circuit(&mut rng, m, 20);
        let mut state = StateVector::from_amplitudes(random_unit_vector(1 << m, &mut rng)).unwrap();
        for g in c.gates() {
            state.apply(g).unwrap();
            assert!((state.norm() - 1.0).abs() <= 1e-10);
        }
    }
}

#[test]
fn example_circuits_match_the_oracle() {
    let sim = Simulator::default();
    for c in [fanout_circuit(), tree_circuit(), toffoli_and()] {
        let diff = max_entry_diff(
            &to_dmatrix(&sim.operator(&c).unwrap()),
            &operator_oracle(&c),
        );
        assert!(diff <= 1e-12);
    }
}

#[test]
fn toffoli_and_truth_table() {
    let probs = Simulator::default().probabilities(&toffoli_and()).unwrap();
    assert_eq!(probs, vec![0.0, 0.0, 0.0, 1.0]);
}

#[test]
fn hadamard_gives_an_undetermined_half() {
    let mut c = Circuit::new(vec![InputLabel::Variable(1)], 0);
    c.push(vec![0], gates::h()).unwrap();
    let probs = Simulator::default().probabilities(&c).unwrap();
    for p in probs {
        assert!((p - 0.5).abs() < 1e-15);
    }
}

#[test]
fn target_order_sets_the_most_significant_bit() {
    // CNOT with control on qubit 1 flips qubit 0
    let mut c = Circuit::new(
        vec![InputLabel::Constant(false), InputLabel::Constant(true)],
        0,
    );
    c.push(vec![1, 0], gates::cnot()).unwrap();
    let out = Simulator::default().run_from_basis(&c, 0b01).unwrap();
    assert_eq!(out.amplitudes()[0b11], C64::new(1.0, 0.0));
}
