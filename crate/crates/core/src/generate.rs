//! Random formulas for property tests and the acceptance corpus.
//!
//! A formula is grown as a random tree of one- and two-qubit gates over
//! fresh input wires, emitted in a random order compatible with the tree,
//! and then padded with gates on discarded qubits (which therefore lie
//! outside the computation graph). A binary gate hands its result on to
//! either of its two qubits, so paths switch qubits freely.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{gates, Circuit, Gate, InputLabel};
use crate::error::Result;
use crate::formula::Formula;
use crate::linalg::{random_unitary, ComplexMatrix};
use crate::rewrite::{restrict, squeeze_all, Restriction};

#[derive(Clone, Copy, Debug)]
pub struct FormulaParams {
    /// Inclusive range for the number of input wires.
    pub leaves: (usize, usize),
    /// Inclusive range for the number of wires labeled by block variables.
    pub block_wires: (usize, usize),
    /// Number of distinct block variables (labels `x1..`).
    pub block_vars: usize,
    /// Probability of wrapping a subtree in a one-qubit gate.
    pub unary: f64,
    /// Upper bound on the gates added outside the computation graph.
    pub dead_gates: usize,
    /// Probability that every gate is a permutation matrix, so the formula
    /// computes a Boolean function exactly.
    pub classical: f64,
}

impl Default for FormulaParams {
    fn default() -> Self {
        Self {
            leaves: (4, 10),
            block_wires: (2, 4),
            block_vars: 2,
            unary: 0.3,
            dead_gates: 3,
            classical: 0.3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedFormula {
    pub circuit: Circuit,
    pub block: BTreeSet<usize>,
}

enum Node {
    Leaf,
    Unary(Box<Node>),
    Binary(Box<Node>, Box<Node>),
}

fn grow<R: Rng>(rng: &mut R, leaves: usize, unary: f64) -> Node {
    let node = if leaves == 1 {
        Node::Leaf
    } else {
        let left = rng.random_range(1..leaves);
        Node::Binary(
            Box::new(grow(rng, left, unary)),
            Box::new(grow(rng, leaves - left, unary)),
        )
    };
    if rng.random_bool(unary) {
        Node::Unary(Box::new(node))
    } else {
        node
    }
}

struct Emitter {
    num_qubits: usize,
    /// `(targets, children)`; children index earlier entries.
    gates: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Emitter {
    /// Returns (qubit holding the result, producing gate).
    fn emit<R: Rng>(&mut self, rng: &mut R, node: &Node) -> (usize, Option<usize>) {
        match node {
            Node::Leaf => {
                self.num_qubits += 1;
                (self.num_qubits - 1, None)
            }
            Node::Unary(child) => {
                let (q, g) = self.emit(rng, child);
                self.gates.push((vec![q], g.into_iter().collect()));
                (q, Some(self.gates.len() - 1))
            }
            Node::Binary(a, b) => {
                let (qa, ga) = self.emit(rng, a);
                let (qb, gb) = self.emit(rng, b);
                let mut targets = vec![qa, qb];
                targets.shuffle(rng);
                self.gates
                    .push((targets, ga.into_iter().chain(gb).collect()));
                let out = if rng.random_bool(0.5) { qa } else { qb };
                (out, Some(self.gates.len() - 1))
            }
        }
    }
}

fn random_permutation<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    gates::permutation(&perm)
}

fn random_gate<R: Rng>(rng: &mut R, arity: usize, classical: bool) -> ComplexMatrix {
    if classical {
        random_permutation(rng, 1 << arity)
    } else {
        random_unitary(1 << arity, rng)
    }
}

/// One random formula. Block variables are `x1..=block_vars`; the other
/// wires carry constants or the variables that follow.
pub fn random_formula<R: Rng>(rng: &mut R, params: &FormulaParams) -> GeneratedFormula {
    let leaves = rng.random_range(params.leaves.0..=params.leaves.1);
    let mut tree = grow(rng, leaves, params.unary);
    if matches!(tree, Node::Leaf) {
        tree = Node::Unary(Box::new(tree));
    }
    let mut em = Emitter {
        num_qubits: 0,
        gates: Vec::new(),
    };
    let (output, _) = em.emit(rng, &tree);
    let m = em.num_qubits;

    // random linear extension of the tree order
    let mut emitted = vec![false; em.gates.len()];
    let mut order = Vec::with_capacity(em.gates.len());
    while order.len() < em.gates.len() {
        let ready: Vec<usize> = (0..em.gates.len())
            .filter(|&g| !emitted[g] && em.gates[g].1.iter().all(|&c| emitted[c]))
            .collect();
        let g = *ready.choose(rng).unwrap();
        emitted[g] = true;
        order.push(g);
    }

    let classical = rng.random_bool(params.classical);
    let mut live: Vec<(Vec<usize>, ComplexMatrix)> = order
        .iter()
        .map(|&g| {
            let t = em.gates[g].0.clone();
            let u = random_gate(rng, t.len(), classical);
            (t, u)
        })
        .collect();

    // gates on discarded qubits, each placed after both qubits' last live use
    let mut last_use = vec![0usize; m];
    for (pos, (t, _)) in live.iter().enumerate() {
        for &q in t {
            last_use[q] = pos + 1;
        }
    }
    let dead_count = rng.random_range(0..=params.dead_gates);
    let discarded: Vec<usize> = (0..m).filter(|&q| q != output).collect();
    let mut inserts: Vec<(usize, Vec<usize>, ComplexMatrix)> = Vec::new();
    for _ in 0..dead_count {
        if discarded.is_empty() {
            break;
        }
        let arity = if discarded.len() >= 2 && rng.random_bool(0.7) {
            2
        } else {
            1
        };
        let t: Vec<usize> = discarded.choose_multiple(rng, arity).copied().collect();
        let earliest = t.iter().map(|&q| last_use[q]).max().unwrap();
        let at = rng.random_range(earliest..=live.len());
        let u = random_gate(rng, arity, classical);
        inserts.push((at, t, u));
    }
    inserts.sort_by_key(|(at, _, _)| *at);
    for (shift, (at, t, u)) in inserts.into_iter().enumerate() {
        live.insert(at + shift, (t, u));
    }

    // labels
    let block_wires = rng
        .random_range(params.block_wires.0..=params.block_wires.1)
        .min(m);
    let mut wires: Vec<usize> = (0..m).collect();
    wires.shuffle(rng);
    let mut labels = vec![InputLabel::Constant(false); m];
    for (i, &q) in wires.iter().enumerate() {
        labels[q] = if i < block_wires {
            InputLabel::Variable(1 + i % params.block_vars.max(1))
        } else if rng.random_bool(0.5) {
            InputLabel::Variable(params.block_vars + 1 + rng.random_range(0..2))
        } else {
            InputLabel::Constant(rng.random_bool(0.5))
        };
    }
    let block_vars = block_wires.min(params.block_vars.max(1));
    let block: BTreeSet<usize> = (1..=block_vars).collect();
    let num_variables = params.block_vars + 2;

    let gates = live
        .into_iter()
        .enumerate()
        .map(|(i, (t, u))| Gate::new(i + 1, t, u).expect("generated gate"))
        .collect();
    let circuit = Circuit::from_parts(labels, gates, output, 2).with_num_variables(num_variables);
    GeneratedFormula { circuit, block }
}

#[derive(Clone, Copy, Debug)]
pub struct CorpusParams {
    pub seed: u64,
    pub count: usize,
    pub formula: FormulaParams,
    /// Largest companion set allowed in any squeezed segment.
    pub max_companions: usize,
    /// Largest register allowed for a squeezed circuit.
    pub max_squeezed_qubits: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self {
            seed: 2024,
            count: 100,
            formula: FormulaParams::default(),
            max_companions: 4,
            max_squeezed_qubits: 16,
        }
    }
}

/// A corpus entry with the two restrictions it is squeezed under.
#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub formula: GeneratedFormula,
    pub restrictions: Vec<Restriction>,
}

/// Whether a formula has a squeezable segment and stays within the caps.
fn admissible(f: &GeneratedFormula, rho: &Restriction, params: &CorpusParams) -> Result<bool> {
    let f_rho = restrict(&f.circuit, rho)?;
    let formula = Formula::new(&f_rho)?;
    let ps = formula.path_sets(&f.block);
    let segs = formula.segments(&ps);
    let mut squeezable = false;
    for (i, seg) in segs.iter().enumerate() {
        if seg.len() > 2 {
            squeezable = true;
            let comp = formula.companion_set(&ps, seg, i)?;
            if comp.q_pi.len() > params.max_companions {
                return Ok(false);
            }
        }
    }
    if !squeezable {
        return Ok(false);
    }
    let sq = squeeze_all(&f_rho, &f.block)?;
    Ok(sq.circuit.num_qubits() <= params.max_squeezed_qubits)
}

/// Deterministic corpus of squeezable formulas.
pub fn corpus(params: &CorpusParams) -> Result<Vec<CorpusItem>> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut items = Vec::with_capacity(params.count);
    while items.len() < params.count {
        let f = random_formula(&mut rng, &params.formula);
        let n = f.circuit.num_variables();
        let outside = n - f.block.len();
        let first = rng.random_range(0..1usize << outside);
        let second = (first + rng.random_range(1..1usize << outside)) % (1 << outside);
        let restrictions = vec![
            Restriction::from_index(n, &f.block, first),
            Restriction::from_index(n, &f.block, second),
        ];
        if admissible(&f, &restrictions[0], params)? {
            items.push(CorpusItem {
                formula: f,
                restrictions,
            });
        }
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{is_formula, unique_path_test};

    #[test]
    fn generated_circuits_are_valid_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let f = random_formula(&mut rng, &FormulaParams::default());
            assert!(f.circuit.validate().is_ok(), "{:?}", f.circuit.validate());
            assert!(is_formula(&f.circuit));
            assert!(unique_path_test(&f.circuit));
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        let params = CorpusParams {
            count: 5,
            ..CorpusParams::default()
        };
        let a = corpus(&params).unwrap();
        let b = corpus(&params).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.formula.circuit, y.formula.circuit);
            assert_eq!(x.restrictions, y.restrictions);
        }
    }
}
