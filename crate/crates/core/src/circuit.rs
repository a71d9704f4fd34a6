//! The circuit IR: labeled input wires, an ordered gate list and a designated
//! output qubit.
//!
//! Qubits are numbered `0..num_qubits`. A gate's matrix is indexed with its
//! first target as the most significant bit, and in a full register state
//! qubit 0 is the most significant bit.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{log2_exact, ComplexMatrix};

/// Unitarity tolerance on `max |U†U − I|`.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Default gate arity bound (2-input 2-output gates).
pub const DEFAULT_ARITY: usize = 2;

/// What feeds an input wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InputLabel {
    /// Variable `x_j`, 1-based.
    Variable(usize),
    Constant(bool),
}

impl InputLabel {
    pub fn variable(&self) -> Option<usize> {
        match *self {
            InputLabel::Variable(j) => Some(j),
            InputLabel::Constant(_) => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, InputLabel::Constant(_))
    }
}

impl fmt::Display for InputLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputLabel::Variable(j) => write!(f, "x{j}"),
            InputLabel::Constant(b) => write!(f, "|{}>", u8::from(*b)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    step: usize,
    targets: Vec<usize>,
    matrix: ComplexMatrix,
}

impl Gate {
    /// Builds a gate. The matrix must be square with side `2^targets.len()`;
    /// unitarity and target ranges are checked by [`Circuit::validate`].
    pub fn new(step: usize, targets: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::field("targets", "a gate needs at least one target"));
        }
        if !matrix.is_square() {
            return Err(Error::field("matrix", "gate matrix must be square"));
        }
        let k = log2_exact(matrix.rows())?;
        if k != targets.len() {
            return Err(Error::field(
                "matrix",
                format!(
                    "{} targets need a {}x{} matrix, found {}x{}",
                    targets.len(),
                    1usize << targets.len(),
                    1usize << targets.len(),
                    matrix.rows(),
                    matrix.cols()
                ),
            ));
        }
        Ok(Self {
            step,
            targets,
            matrix,
        })
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn acts_on(&self, qubit: usize) -> bool {
        self.targets.contains(&qubit)
    }

    pub(crate) fn with_step(mut self, step: usize) -> Self {
        self.step = step;
        self
    }

    pub(crate) fn remap(mut self, map: impl Fn(usize) -> usize) -> Self {
        self.targets.iter_mut().for_each(|q| *q = map(*q));
        self
    }
}

/// A quantum circuit computing a Boolean function.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    labels: Vec<InputLabel>,
    gates: Vec<Gate>,
    output_qubit: usize,
    arity_bound: usize,
    num_variables: usize,
}

impl Circuit {
    /// Empty circuit over the given input labels. The variable count is
    /// the largest variable index used.
    pub fn new(labels: Vec<InputLabel>, output_qubit: usize) -> Self {
        let num_variables = labels
            .iter()
            .filter_map(InputLabel::variable)
            .max()
            .unwrap_or(0);
        Self {
            labels,
            gates: Vec::new(),
            output_qubit,
            arity_bound: DEFAULT_ARITY,
            num_variables,
        }
    }

    pub fn from_parts(
        labels: Vec<InputLabel>,
        gates: Vec<Gate>,
        output_qubit: usize,
        arity_bound: usize,
    ) -> Self {
        let mut c = Self::new(labels, output_qubit);
        c.gates = gates;
        c.arity_bound = arity_bound;
        c
    }

    pub fn with_arity_bound(mut self, d: usize) -> Self {
        self.arity_bound = d;
        self
    }

    /// Overrides the variable count, e.g. for restricted circuits that no
    /// longer mention every variable.
    pub fn with_num_variables(mut self, n: usize) -> Self {
        self.num_variables = n;
        self
    }

    /// Appends a gate at the next step.
    pub fn push(&mut self, targets: Vec<usize>, matrix: ComplexMatrix) -> Result<&mut Self> {
        let gate = Gate::new(self.gates.len() + 1, targets, matrix)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn num_variables(&self) -> usize {
        self.num_variables
    }

    pub fn labels(&self) -> &[InputLabel] {
        &self.labels
    }

    pub fn label(&self, qubit: usize) -> InputLabel {
        self.labels[qubit]
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output_qubit(&self) -> usize {
        self.output_qubit
    }

    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    /// Number of gates plus number of input wires.
    pub fn size(&self) -> usize {
        self.gates.len() + self.labels.len()
    }

    /// Qubits labeled by one of the given variables, in ascending order.
    pub fn wires_labeled_by(&self, vars: &BTreeSet<usize>) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.variable().is_some_and(|j| vars.contains(&j)))
            .map(|(q, _)| q)
            .collect()
    }

    /// Same circuit with different input labels.
    pub(crate) fn with_labels(&self, labels: Vec<InputLabel>) -> Self {
        Self {
            labels,
            ..self.clone()
        }
    }

    /// Checks every structural invariant and reports all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let m = self.num_qubits();
        if m == 0 {
            issues.push(Issue::NoQubits);
        }
        if self.output_qubit >= m {
            issues.push(Issue::OutputOutOfRange {
                qubit: self.output_qubit,
            });
        }
        for (q, l) in self.labels.iter().enumerate() {
            if let InputLabel::Variable(j) = *l {
                if j == 0 || j > self.num_variables {
                    issues.push(Issue::BadVariable { qubit: q, var: j });
                }
            }
        }
        for (i, g) in self.gates.iter().enumerate() {
            let step = g.step;
            if step != i + 1 {
                issues.push(Issue::StepOrder {
                    position: i + 1,
                    step,
                });
            }
            if g.arity() > self.arity_bound {
                issues.push(Issue::ArityExceeded {
                    step,
                    arity: g.arity(),
                    bound: self.arity_bound,
                });
            }
            let mut seen = BTreeSet::new();
            for &q in &g.targets {
                if q >= m {
                    issues.push(Issue::TargetOutOfRange { step, qubit: q });
                }
                if !seen.insert(q) {
                    issues.push(Issue::DuplicateTarget { step, qubit: q });
                }
            }
            if !g.matrix.is_finite() {
                issues.push(Issue::NonFinite { step });
            } else {
                let dev = g.matrix.unitarity_deviation();
                if dev > UNITARITY_TOL {
                    issues.push(Issue::NonUnitary {
                        step,
                        deviation: dev,
                    });
                }
            }
        }
        ValidationReport { issues }
    }

    /// `Ok(())` when [`validate`](Self::validate) finds nothing.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidCircuit(report.to_string()))
        }
    }
}

/// A single violated invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Issue {
    NoQubits,
    OutputOutOfRange {
        qubit: usize,
    },
    BadVariable {
        qubit: usize,
        var: usize,
    },
    StepOrder {
        position: usize,
        step: usize,
    },
    ArityExceeded {
        step: usize,
        arity: usize,
        bound: usize,
    },
    TargetOutOfRange {
        step: usize,
        qubit: usize,
    },
    DuplicateTarget {
        step: usize,
        qubit: usize,
    },
    NonFinite {
        step: usize,
    },
    NonUnitary {
        step: usize,
        deviation: f64,
    },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::NoQubits => write!(f, "circuit has no qubits"),
            Issue::OutputOutOfRange { qubit } => write!(f, "output qubit {qubit} out of range"),
            Issue::BadVariable { qubit, var } => {
                write!(f, "qubit {qubit} labeled by invalid variable x{var}")
            }
            Issue::StepOrder { position, step } => {
                write!(
                    f,
                    "gate {position} carries step {step}; steps must be 1..t consecutive"
                )
            }
            Issue::ArityExceeded { step, arity, bound } => {
                write!(f, "arity exceeds bound at step {step} ({arity} > {bound})")
            }
            Issue::TargetOutOfRange { step, qubit } => {
                write!(f, "target {qubit} out of range at step {step}")
            }
            Issue::DuplicateTarget { step, qubit } => {
                write!(f, "duplicate target {qubit} at step {step}")
            }
            Issue::NonFinite { step } => write!(f, "non-finite matrix entry at step {step}"),
            Issue::NonUnitary { step, deviation } => {
                write!(
                    f,
                    "non-unitary at step {step} (max |U†U - I| = {deviation:.3e})"
                )
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "ok");
        }
        let msgs: Vec<String> = self.issues.iter().map(ToString::to_string).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// A few standard gate matrices.
pub mod gates {
    use super::*;

    pub fn identity(k: usize) -> ComplexMatrix {
        ComplexMatrix::identity(1 << k)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn h() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real(&[&[s, s], &[s, -s]]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }

    /// `R_y(θ)` rotation.
    pub fn ry(theta: f64) -> ComplexMatrix {
        let (s, c) = (theta / 2.0).sin_cos();
        ComplexMatrix::from_real(&[&[c, -s], &[s, c]]).unwrap()
    }

    /// Diagonal phase gate `diag(1, e^{iφ})`.
    pub fn phase(phi: f64) -> ComplexMatrix {
        ComplexMatrix::square(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::from_polar(1.0, phi),
        ])
        .unwrap()
    }

    /// Controlled-X with the first target as control.
    pub fn cnot() -> ComplexMatrix {
        permutation(&[0, 1, 3, 2])
    }

    pub fn swap() -> ComplexMatrix {
        permutation(&[0, 2, 1, 3])
    }

    /// Toffoli: flips the third target when the first two are 1.
    pub fn toffoli() -> ComplexMatrix {
        permutation(&[0, 1, 2, 3, 4, 5, 7, 6])
    }

    /// Permutation matrix sending basis state `i` to `perm[i]`.
    pub fn permutation(perm: &[usize]) -> ComplexMatrix {
        let n = perm.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            m[(j, i)] = C64::new(1.0, 0.0);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_x_is_valid() {
        let mut c = Circuit::new(vec![InputLabel::Variable(1)], 0);
        c.push(vec![0], gates::x()).unwrap();
        assert!(c.validate().is_ok());
    }

    #[test]
    fn non_unitary_is_reported() {
        let mut c = Circuit::new(vec![InputLabel::Variable(1)], 0);
        c.push(
            vec![0],
            ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap(),
        )
        .unwrap();
        let report = c.validate();
        assert_eq!(report.issues.len(), 1);
        assert!(report.to_string().starts_with("non-unitary at step 1"));
    }

    #[test]
    fn arity_bound_is_enforced() {
        let mut c = Circuit::new(vec![InputLabel::Constant(false); 3], 0);
        c.push(vec![0, 1, 2], gates::toffoli()).unwrap();
        assert!(c.validate().to_string().contains("arity exceeds bound"));
        assert!(c.clone().with_arity_bound(3).validate().is_ok());
    }

    #[test]
    fn every_violation_is_listed() {
        let labels = vec![InputLabel::Variable(0), InputLabel::Constant(true)];
        let gate = Gate::new(7, vec![1, 1], gates::cnot()).unwrap();
        let c = Circuit::from_parts(labels, vec![gate], 5, 2);
        let report = c.validate();
        let kinds: Vec<_> = report.issues.iter().map(std::mem::discriminant).collect();
        assert!(
            kinds.contains(&std::mem::discriminant(&Issue::OutputOutOfRange {
                qubit: 0
            }))
        );
        assert!(kinds.contains(&std::mem::discriminant(&Issue::BadVariable {
            qubit: 0,
            var: 0
        })));
        assert!(kinds.contains(&std::mem::discriminant(&Issue::StepOrder {
            position: 0,
            step: 0
        })));
        assert!(
            kinds.contains(&std::mem::discriminant(&Issue::DuplicateTarget {
                step: 0,
                qubit: 0
            }))
        );
    }

    #[test]
    fn gate_matrix_must_match_targets() {
        assert!(Gate::new(1, vec![0, 1], gates::x()).is_err());
        assert!(Gate::new(1, vec![], gates::x()).is_err());
    }

    #[test]
    fn size_counts_gates_and_wires() {
        let mut c = Circuit::new(
            vec![InputLabel::Variable(1), InputLabel::Constant(false)],
            1,
        );
        c.push(vec![0, 1], gates::cnot()).unwrap();
        assert_eq!(c.size(), 3);
        assert_eq!(c.num_variables(), 1);
    }
}
