//! On-disk circuit format (UTF-8 JSON).
//!
//! ```json
//! {"num_qubits": 2, "arity_bound": 2,
//!  "labels": [{"var": 1}, {"const": 0}],
//!  "gates": [{"step": 1, "targets": [0, 1], "matrix": [[1,0],[0,0], ...]}],
//!  "output_qubit": 1}
//! ```
//!
//! Matrices are row-major arrays of `[re, im]` pairs, `4^k` entries for `k`
//! targets. An optional `num_variables` field records the variable count
//! when it differs from the largest index in `labels` (restricted circuits).
//! Floats round-trip bit-exactly.

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, InputLabel};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    num_qubits: usize,
    #[serde(default = "default_arity")]
    arity_bound: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    num_variables: Option<usize>,
    labels: Vec<LabelRepr>,
    gates: Vec<GateRepr>,
    output_qubit: usize,
}

fn default_arity() -> usize {
    crate::circuit::DEFAULT_ARITY
}

#[derive(Serialize, Deserialize)]
struct LabelRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    var: Option<usize>,
    #[serde(rename = "const", default, skip_serializing_if = "Option::is_none")]
    constant: Option<u8>,
}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    step: usize,
    targets: Vec<usize>,
    matrix: Vec<[f64; 2]>,
}

/// Encodes a matrix as row-major `[re, im]` pairs.
pub fn encode_matrix(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.as_slice().iter().map(|z| [z.re, z.im]).collect()
}

/// Decodes a square matrix from row-major `[re, im]` pairs.
pub fn decode_matrix(entries: &[[f64; 2]]) -> Result<ComplexMatrix> {
    let len = entries.len();
    let dim = (len as f64).sqrt().round() as usize;
    if dim * dim != len || !dim.is_power_of_two() {
        return Err(Error::field(
            "matrix",
            format!("{len} entries is not 4^k for any k"),
        ));
    }
    ComplexMatrix::square(entries.iter().map(|&[re, im]| C64::new(re, im)).collect())
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses a circuit from JSON text. Structural problems that prevent
/// building the IR are errors; invariant violations (unitarity, arity,
/// step order, ranges) are left to [`Circuit::validate`].
pub fn circuit_from_json(text: &str) -> Result<Circuit> {
    let repr: CircuitRepr = serde_json::from_str(text).map_err(parse_error)?;
    if repr.labels.len() != repr.num_qubits {
        return Err(Error::field(
            "labels",
            format!(
                "{} labels for {} qubits",
                repr.labels.len(),
                repr.num_qubits
            ),
        ));
    }
    let labels = repr
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| match (l.var, l.constant) {
            (Some(j), None) => Ok(InputLabel::Variable(j)),
            (None, Some(0)) => Ok(InputLabel::Constant(false)),
            (None, Some(1)) => Ok(InputLabel::Constant(true)),
            (None, Some(b)) => Err(Error::field(
                format!("labels[{i}].const"),
                format!("constant must be 0 or 1, found {b}"),
            )),
            _ => Err(Error::field(
                format!("labels[{i}]"),
                "expected exactly one of \"var\" or \"const\"",
            )),
        })
        .collect::<Result<Vec<_>>>()?;
    let gates = repr
        .gates
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let matrix = decode_matrix(&g.matrix).map_err(|e| match e {
                Error::Field { message, .. } => Error::field(format!("gates[{i}].matrix"), message),
                other => other,
            })?;
            Gate::new(g.step, g.targets.clone(), matrix).map_err(|e| match e {
                Error::Field { field, message } => {
                    Error::field(format!("gates[{i}].{field}"), message)
                }
                other => Error::field(format!("gates[{i}]"), other.to_string()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut circuit = Circuit::from_parts(labels, gates, repr.output_qubit, repr.arity_bound);
    if let Some(n) = repr.num_variables {
        circuit = circuit.with_num_variables(n);
    }
    Ok(circuit)
}

pub fn circuit_to_json(circuit: &Circuit) -> String {
    let max_var = circuit
        .labels()
        .iter()
        .filter_map(InputLabel::variable)
        .max()
        .unwrap_or(0);
    let repr = CircuitRepr {
        num_qubits: circuit.num_qubits(),
        arity_bound: circuit.arity_bound(),
        num_variables: (circuit.num_variables() != max_var).then_some(circuit.num_variables()),
        labels: circuit
            .labels()
            .iter()
            .map(|l| match *l {
                InputLabel::Variable(j) => LabelRepr {
                    var: Some(j),
                    constant: None,
                },
                InputLabel::Constant(b) => LabelRepr {
                    var: None,
                    constant: Some(u8::from(b)),
                },
            })
            .collect(),
        gates: circuit
            .gates()
            .iter()
            .map(|g| GateRepr {
                step: g.step(),
                targets: g.targets().to_vec(),
                matrix: encode_matrix(g.matrix()),
            })
            .collect(),
        output_qubit: circuit.output_qubit(),
    };
    serde_json::to_string_pretty(&repr).expect("circuit serialization cannot fail")
}

pub fn read_circuit(path: impl AsRef<Path>) -> Result<Circuit> {
    let text = std::fs::read_to_string(path)?;
    circuit_from_json(&text)
}

pub fn write_circuit(circuit: &Circuit, path: impl AsRef<Path>) -> Result<()> {
    let mut text = circuit_to_json(circuit);
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
