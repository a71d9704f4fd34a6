use std::collections::BTreeSet;

use qformula::circuit::InputLabel;
use qformula::formula::Formula;
use qformula::linalg::random_unitary;
use qformula::rewrite::{
    composite_matrix, composite_matrix_with_order, squeeze_all, squeeze_path, verify_squeeze,
    SegmentAction,
};
use qformula::{Circuit, Gate, Simulator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Eight qubits: `x1` on 0 picks up the side subtree {2, 3} and the constant
/// 4, `x2` on 1 picks up the subtree {5, 6}; the paths merge on 0. Qubit 7
/// is idle.
fn two_path_formula(seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = vec![InputLabel::Constant(false); 8];
    labels[0] = InputLabel::Variable(1);
    labels[1] = InputLabel::Variable(2);
    labels[3] = InputLabel::Constant(true);
    let mut c = Circuit::new(labels, 0);
    for t in [[2, 3], [0, 2], [5, 6], [0, 4], [1, 5], [0, 1]] {
        c.push(t.to_vec(), random_unitary(4, &mut rng)).unwrap();
    }
    c
}

fn block() -> BTreeSet<usize> {
    BTreeSet::from([1, 2])
}

#[test]
fn both_paths_are_squeezed_with_three_and_two_companions() {
    let sim = Simulator::default();
    for seed in 0..20 {
        let c = two_path_formula(seed);
        let sq = squeeze_all(&c, &block()).unwrap();
        let vs: Vec<(SegmentAction, usize)> = sq.segments.iter().map(|s| (s.action, s.v)).collect();
        assert_eq!(
            vs,
            vec![
                (SegmentAction::Squeezed, 3),
                (SegmentAction::Squeezed, 2),
                (SegmentAction::Kept, 0)
            ]
        );
        let report = verify_squeeze(&sim, &c, &sq, &block()).unwrap();
        assert!(report.passes(1e-9), "{report:?}");
        assert!(report.ranks.iter().all(|&d| d <= 4));
        assert_eq!(sq.gate_count(), 3);
    }
}

#[test]
fn squeezed_vectors_reconstruct_from_the_basis() {
    let c = two_path_formula(5);
    let formula = Formula::new(&c).unwrap();
    let ps = formula.path_sets(&block());
    let segs = formula.segments(&ps);
    for (i, seg) in segs.iter().enumerate().filter(|(_, s)| s.len() > 2) {
        let record = squeeze_path(&formula, &ps, seg, i).unwrap();
        assert!(record.reconstruction_residual() < 1e-12);
        // the segment's action is unitary on the entries ⊗ companions, so
        // every input column keeps norm 1
        for norm in record.lambda_norms() {
            assert!((norm - 1.0).abs() < 1e-12, "{norm}");
        }
    }
}

#[test]
fn completion_order_does_not_change_probabilities() {
    let sim = Simulator::default();
    let c = two_path_formula(9);
    let sq = squeeze_all(&c, &block()).unwrap();
    let base = sim.probabilities(&sq.circuit).unwrap();
    let mut gates: Vec<Gate> = sq.circuit.gates().to_vec();
    let mut changed = false;
    for record in &sq.records {
        let step = sq.segments[record.index].new_step.unwrap();
        let dim = 1usize << (3 * record.k());
        let alt = composite_matrix_with_order(record, (0..dim).rev()).unwrap();
        changed |= alt.max_abs_diff(&composite_matrix(record).unwrap()) > 1e-6;
        let old = &gates[step - 1];
        gates[step - 1] = Gate::new(step, old.targets().to_vec(), alt).unwrap();
    }
    assert!(changed);
    let alt_circuit = Circuit::from_parts(
        sq.circuit.labels().to_vec(),
        gates,
        sq.circuit.output_qubit(),
        sq.circuit.arity_bound(),
    )
    .with_num_variables(sq.circuit.num_variables());
    let probs = sim.probabilities(&alt_circuit).unwrap();
    for (a, b) in base.iter().zip(&probs) {
        assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn composite_gate_is_wider_than_the_input_bound() {
    let sq = squeeze_all(&two_path_formula(1), &block()).unwrap();
    assert!(sq.exceeds_arity_bound);
    assert_eq!(sq.circuit.arity_bound(), 3);
    assert!(sq.circuit.validate().is_ok());
}
