//! Dense state-vector execution and the acceptance semantics for Boolean
//! functions.
//!
//! Gates are applied strictly in step order. On input `α` the register
//! starts in the basis state given by the labels; `p_α` is the squared norm
//! of the component with the output qubit in `|1⟩`. A circuit computes `f`
//! when `p_α > 2/3` wherever `f(α) = 1` and `p_α < 1/3` wherever `f(α) = 0`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, InputLabel};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ZERO};
use crate::truth_table::{bit_of, TruthTable};

pub const DEFAULT_MAX_QUBITS: usize = 20;

/// Acceptance threshold for `f(α) = 1`.
pub const ACCEPT: f64 = 2.0 / 3.0;
/// Rejection threshold for `f(α) = 0`.
pub const REJECT: f64 = 1.0 / 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let num_qubits = linalg::log2_exact(amplitudes.len())?;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    /// `(‖A₀‖², ‖A₁‖²)` for the split on `qubit`.
    pub fn split_norms(&self, qubit: usize) -> (f64, f64) {
        let bit = 1usize << (self.num_qubits - 1 - qubit);
        let mut p = [0.0, 0.0];
        for (i, a) in self.amplitudes.iter().enumerate() {
            p[usize::from(i & bit != 0)] += a.norm_sqr();
        }
        (p[0], p[1])
    }

    /// Applies `gate` in place (the gate acts as identity elsewhere).
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        let m = self.num_qubits;
        for &q in gate.targets() {
            if q >= m {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits: m,
                });
            }
        }
        let k = gate.arity();
        let dim = 1usize << k;
        // offsets[s]: register bits set by local basis state s (first target = MSB of s)
        let masks: Vec<usize> = gate
            .targets()
            .iter()
            .map(|&q| 1usize << (m - 1 - q))
            .collect();
        let full_mask: usize = masks.iter().fold(0, |acc, b| acc | b);
        let offsets: Vec<usize> = (0..dim)
            .map(|s| {
                (0..k)
                    .filter(|&i| (s >> (k - 1 - i)) & 1 == 1)
                    .fold(0, |acc, i| acc | masks[i])
            })
            .collect();
        let u = gate.matrix().as_slice();
        let mut local = vec![ZERO; dim];
        for base in 0..self.amplitudes.len() {
            if base & full_mask != 0 {
                continue;
            }
            for (s, off) in offsets.iter().enumerate() {
                local[s] = self.amplitudes[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let row = &u[r * dim..(r + 1) * dim];
                self.amplitudes[base | off] = row.iter().zip(&local).map(|(a, b)| a * b).sum();
            }
        }
        Ok(())
    }
}

/// Functional form of [`StateVector::apply`].
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Outcome {
    /// Probability that the output qubit reads 1.
    pub p1: f64,
    pub norm_a0_sqr: f64,
    pub norm_a1_sqr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FunctionVerdict {
    Computes,
    FailsAt { alpha: usize, p: f64 },
    UndeterminedAt { alpha: usize, p: f64 },
}

impl FunctionVerdict {
    /// Same verdict kind and witness, ignoring the reported probability.
    pub fn same_kind(&self, other: &Self) -> bool {
        use FunctionVerdict::*;
        match (self, other) {
            (Computes, Computes) => true,
            (FailsAt { alpha: a, .. }, FailsAt { alpha: b, .. }) => a == b,
            (UndeterminedAt { alpha: a, .. }, UndeterminedAt { alpha: b, .. }) => a == b,
            _ => false,
        }
    }
}

/// Classifies a probability table against `f`. The first offending `α` is
/// reported; `p ∈ [1/3, 2/3]` is undetermined whatever `f(α)` is.
pub fn verdict_from_probabilities(probs: &[f64], table: &TruthTable) -> FunctionVerdict {
    for (alpha, &p) in probs.iter().enumerate() {
        if (REJECT..=ACCEPT).contains(&p) {
            return FunctionVerdict::UndeterminedAt { alpha, p };
        }
        let accepted = p > ACCEPT;
        if accepted != table.get(alpha) {
            return FunctionVerdict::FailsAt { alpha, p };
        }
    }
    FunctionVerdict::Computes
}

/// The function a probability table decides, if every `p_α` is outside
/// `[1/3, 2/3]`.
pub fn decided_function(n: usize, probs: &[f64]) -> Option<TruthTable> {
    if probs.iter().any(|p| (REJECT..=ACCEPT).contains(p)) {
        return None;
    }
    TruthTable::new(n, probs.iter().map(|&p| p > ACCEPT).collect()).ok()
}

#[derive(Clone, Copy, Debug)]
pub struct Simulator {
    pub max_qubits: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Self {
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl Simulator {
    pub fn with_max_qubits(max_qubits: usize) -> Self {
        Self { max_qubits }
    }

    fn check_width(&self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() > self.max_qubits {
            return Err(Error::TooManyQubits {
                requested: circuit.num_qubits(),
                cap: self.max_qubits,
            });
        }
        if circuit.output_qubit() >= circuit.num_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: circuit.output_qubit(),
                num_qubits: circuit.num_qubits(),
            });
        }
        Ok(())
    }

    /// Basis index of the input state for `assignment` (`x_j` at position `j-1`).
    pub fn initial_index(circuit: &Circuit, assignment: &[bool]) -> Result<usize> {
        if assignment.len() != circuit.num_variables() {
            return Err(Error::AssignmentLength {
                expected: circuit.num_variables(),
                found: assignment.len(),
            });
        }
        let m = circuit.num_qubits();
        let mut index = 0usize;
        for (q, label) in circuit.labels().iter().enumerate() {
            let bit = match *label {
                InputLabel::Constant(b) => b,
                InputLabel::Variable(j) => *assignment.get(j.wrapping_sub(1)).ok_or_else(|| {
                    Error::InvalidCircuit(format!("qubit {q} labeled by unknown variable x{j}"))
                })?,
            };
            if bit {
                index |= 1 << (m - 1 - q);
            }
        }
        Ok(index)
    }

    /// Runs the circuit from the given basis state.
    pub fn run_from_basis(&self, circuit: &Circuit, index: usize) -> Result<StateVector> {
        self.check_width(circuit)?;
        let mut state = StateVector::basis(circuit.num_qubits(), index);
        for gate in circuit.gates() {
            state.apply(gate)?;
        }
        Ok(state)
    }

    /// Runs the circuit from an arbitrary register state.
    pub fn run_from_state(&self, circuit: &Circuit, state: StateVector) -> Result<StateVector> {
        self.check_width(circuit)?;
        if state.num_qubits() != circuit.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: circuit.num_qubits(),
                found: state.num_qubits(),
            });
        }
        let mut state = state;
        for gate in circuit.gates() {
            state.apply(gate)?;
        }
        Ok(state)
    }

    /// The circuit's full operator, column `i` being the run from basis state `i`.
    pub fn operator(&self, circuit: &Circuit) -> Result<ComplexMatrix> {
        self.check_width(circuit)?;
        let columns = (0..1usize << circuit.num_qubits())
            .into_par_iter()
            .map(|i| {
                self.run_from_basis(circuit, i)
                    .map(StateVector::into_amplitudes)
            })
            .collect::<Result<Vec<_>>>()?;
        ComplexMatrix::from_columns(&columns)
    }

    pub fn run(&self, circuit: &Circuit, assignment: &[bool]) -> Result<(StateVector, Outcome)> {
        let index = Self::initial_index(circuit, assignment)?;
        let state = self.run_from_basis(circuit, index)?;
        let (a0, a1) = state.split_norms(circuit.output_qubit());
        Ok((
            state,
            Outcome {
                p1: a1,
                norm_a0_sqr: a0,
                norm_a1_sqr: a1,
            },
        ))
    }

    /// `p_α` for every assignment of the circuit's variables.
    pub fn probabilities(&self, circuit: &Circuit) -> Result<Vec<f64>> {
        let n = circuit.num_variables();
        let vars: Vec<usize> = (1..=n).collect();
        self.block_probabilities(circuit, &vars)
    }

    /// `p_α` for every assignment of `block` (first listed variable is the
    /// most significant bit of `α`); variables outside the block are 0.
    pub fn block_probabilities(&self, circuit: &Circuit, block: &[usize]) -> Result<Vec<f64>> {
        self.check_width(circuit)?;
        let n = circuit.num_variables();
        if let Some(&j) = block.iter().find(|&&j| j == 0 || j > n) {
            return Err(Error::InvalidArgument(format!(
                "variable x{j} is not among the circuit's {n} variables"
            )));
        }
        let b = block.len();
        (0..1usize << b)
            .into_par_iter()
            .map(|alpha| {
                let mut assignment = vec![false; n];
                for (pos, &j) in block.iter().enumerate() {
                    assignment[j - 1] = bit_of(alpha, b, pos + 1);
                }
                self.run(circuit, &assignment).map(|(_, o)| o.p1)
            })
            .collect()
    }

    pub fn evaluate(&self, circuit: &Circuit, table: &TruthTable) -> Result<FunctionVerdict> {
        if table.n() != circuit.num_variables() {
            return Err(Error::AssignmentLength {
                expected: circuit.num_variables(),
                found: table.n(),
            });
        }
        let probs = self.probabilities(circuit)?;
        Ok(verdict_from_probabilities(&probs, table))
    }
}
