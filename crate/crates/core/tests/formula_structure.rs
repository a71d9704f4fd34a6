use std::collections::BTreeSet;

use qformula::circuit::InputLabel;
use qformula::examples::{fanout_circuit, tree_circuit};
use qformula::formula::{companions, unique_path_test, Formula, SegmentEnd, SegmentStart};
use qformula::generate::{random_formula, FormulaParams};
use qformula::linalg::random_unitary;
use qformula::rewrite::{restrict, Restriction};
use qformula::{computation_graph, is_formula, Circuit};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let m = rng.random_range(2..=6);
    let mut c = Circuit::new(vec![InputLabel::Variable(1); m], rng.random_range(0..m));
    let qubits: Vec<usize> = (0..m).collect();
    for _ in 0..rng.random_range(0..=8) {
        let k = rng.random_range(1..=2);
        let t: Vec<usize> = qubits.choose_multiple(rng, k).copied().collect();
        c.push(t, random_unitary(1 << k, rng)).unwrap();
    }
    c
}

#[test]
fn fanout_and_tree_classification() {
    assert!(!is_formula(&fanout_circuit()));
    assert!(!unique_path_test(&fanout_circuit()));
    assert!(is_formula(&tree_circuit()));
    assert!(unique_path_test(&tree_circuit()));
    // the last gate of the bottom circuit does not reach the output
    assert!(!computation_graph(&tree_circuit()).contains(3));
}

#[test]
fn tree_and_unique_path_tests_agree_on_arbitrary_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let mut formulas = 0;
    for _ in 0..2000 {
        let c = random_circuit(&mut rng);
        let tree = computation_graph(&c).is_tree();
        assert_eq!(tree, unique_path_test(&c), "{c:?}");
        formulas += usize::from(tree);
    }
    assert!(formulas > 100 && formulas < 1900, "{formulas}");
}

#[test]
fn companions_only_grow() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for _ in 0..200 {
        let c = random_circuit(&mut rng);
        let m = c.num_qubits();
        for step in 0..c.gates().len() {
            let now = companions(&c, step).unwrap();
            let next = companions(&c, step + 1).unwrap();
            for a in 0..m {
                for b in 0..m {
                    if now.are_companions(a, b) {
                        assert!(next.are_companions(a, b));
                    }
                }
            }
        }
    }
}

/// For a segment from an input wire to a merge gate `g_m`, the companion
/// set equals the literal companions of `g_1..g_{m-1}` at the step of `g_m`
/// minus the entry qubits, once the subtree that joins at `g_m` itself is
/// taken out.
#[test]
fn companion_set_matches_literal_companions() {
    let params = FormulaParams {
        dead_gates: 0,
        ..FormulaParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(92);
    let mut checked = 0;
    while checked < 200 {
        let f = random_formula(&mut rng, &params);
        let n = f.circuit.num_variables();
        let rho = Restriction::from_index(n, &f.block, 0);
        let c = restrict(&f.circuit, &rho).unwrap();
        let formula = Formula::new(&c).unwrap();
        let ps = formula.path_sets(&f.block);
        for (i, seg) in formula.segments(&ps).iter().enumerate() {
            let (SegmentStart::Wire(_), SegmentEnd::Gate(gm)) = (seg.start, seg.end) else {
                continue;
            };
            if seg.len() <= 2 {
                continue;
            }
            let Ok(comp) = formula.companion_set(&ps, seg, i) else {
                continue;
            };
            let at_gm = companions(&c, gm + 1).unwrap();
            let mut literal: BTreeSet<usize> = BTreeSet::new();
            for g in seg.c0_gates() {
                for &q in c.gates()[g].targets() {
                    literal.extend(at_gm.class_of(q).iter().copied());
                }
            }
            for e in &seg.entries {
                literal.remove(e);
            }
            let before_gm = companions(&c, gm).unwrap();
            let q2 = comp.q2.unwrap();
            for q in before_gm.class_of(q2) {
                literal.remove(q);
            }
            assert_eq!(comp.q_pi, literal);
            checked += 1;
        }
    }
}

#[test]
fn companions_of_fanout_gates() {
    let c = fanout_circuit();
    let p = companions(&c, 1).unwrap();
    assert!(p.are_companions(3, 1));
    assert!(!p.are_companions(3, 0));
    assert!(companions(&c, 2).unwrap().are_companions(3, 0));
    assert!(companions(&c, 5).is_err());
}
