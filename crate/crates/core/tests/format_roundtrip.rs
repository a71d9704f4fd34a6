use qformula::examples::{fanout_circuit, toffoli_and, tree_circuit};
use qformula::format::{circuit_from_json, circuit_to_json, read_circuit, write_circuit};
use qformula::generate::{random_formula, FormulaParams};
use qformula::{Circuit, Error, InputLabel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_round_trip(c: &Circuit) {
    let back = circuit_from_json(&circuit_to_json(c)).unwrap();
    assert_eq!(&back, c);
    for (a, b) in back.gates().iter().zip(c.gates()) {
        for (x, y) in a.matrix().as_slice().iter().zip(b.matrix().as_slice()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }
}

#[test]
fn generated_formulas_round_trip_bit_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    for _ in 0..100 {
        assert_round_trip(&random_formula(&mut rng, &FormulaParams::default()).circuit);
    }
}

#[test]
fn fixed_circuits_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for (name, c) in [
        ("top", fanout_circuit()),
        ("bottom", tree_circuit()),
        ("and", toffoli_and()),
    ] {
        let path = dir.path().join(format!("{name}.json"));
        write_circuit(&c, &path).unwrap();
        assert_eq!(read_circuit(&path).unwrap(), c);
    }
}

#[test]
fn tree_circuit_file_shape() {
    let text = circuit_to_json(&tree_circuit());
    let c = circuit_from_json(&text).unwrap();
    assert_eq!(c.num_qubits(), 4);
    assert_eq!(c.gates().len(), 4);
}

#[test]
fn empty_gate_list_is_valid() {
    let text = r#"{"num_qubits": 1, "arity_bound": 2, "labels": [{"var": 1}],
                   "gates": [], "output_qubit": 0}"#;
    let c = circuit_from_json(text).unwrap();
    assert!(c.validate().is_ok());
    assert_eq!(c.label(0), InputLabel::Variable(1));
}

#[test]
fn truncated_file_is_a_parse_error() {
    let text = circuit_to_json(&fanout_circuit());
    let cut = &text[..text.len() / 2];
    assert!(matches!(circuit_from_json(cut), Err(Error::Parse { .. })));
}
