//! Path squeezing.
//!
//! A segment of a block path (see [`crate::formula::Segment`]) together
//! with the constant side subtrees hanging off its interior gates acts on
//! its `k` entry qubits and `v` companion qubits `Q_π`, which start in a
//! fixed constant state. Running that region on each basis input `|α⟩` and
//! splitting the result on the `k` slot qubits gives
//! `Σ_c |c⟩ ⊗ |A^α_c⟩` with `|A^α_c⟩ ∈ ℂ^{2^v}`. With an orthonormal basis
//! `A_1..A_d` of the span of those vectors, the region is replaced by a gate
//! on the `k` entry qubits and `2k` fresh `|0⟩` qubits mapping
//! `|α⟩|0⟩ ↦ Σ_{c,j} λ^α_{j,c} |c⟩|j⟩`, `λ^α_{j,c} = ⟨A_j|A^α_c⟩`.
//!
//! Slot 0 is the qubit carrying the path out of the region. When the path
//! left on a companion qubit, that qubit's role passes to the first entry
//! qubit for the rest of the circuit. Gates outside the computation graph
//! never influence the output and are dropped.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, InputLabel, UNITARITY_TOL};
use crate::error::{Error, Result};
use crate::formula::{Companions, Formula, PathSet, Segment, SegmentEnd, SegmentStart};
use crate::linalg::{
    self, complete_with_order, ComplexMatrix, ComplexVector, Orthonormalized, DEFAULT_RANK_TOL,
    ZERO,
};
use crate::simulator::{Simulator, ACCEPT, REJECT};

const ISOMETRY_TOL: f64 = 1e-9;

/// Everything computed for one squeezed segment.
#[derive(Clone, Debug)]
pub struct SqueezeRecord {
    /// Position of the segment in the natural order.
    pub index: usize,
    pub segment: Segment,
    pub companions: Companions,
    /// Local register: entries followed by `Q_π`.
    pub register: Vec<usize>,
    /// Slot qubits; slot 0 carries the path out of the region.
    pub slots: Vec<usize>,
    /// Entry qubit whose position hosts each slot in the squeezed circuit.
    pub slot_hosts: Vec<usize>,
    /// `vectors[α][c]` = `|A^α_c⟩`.
    pub vectors: Vec<Vec<ComplexVector>>,
    pub basis: Orthonormalized,
    /// `lambda[α][c][j]` = `⟨A_j|A^α_c⟩`.
    pub lambda: Vec<Vec<Vec<C64>>>,
}

impl SqueezeRecord {
    /// Number of entry qubits.
    pub fn k(&self) -> usize {
        self.segment.entries.len()
    }

    pub fn v(&self) -> usize {
        self.companions.q_pi.len()
    }

    /// `d`, the dimension of the span of the `|A^α_c⟩`.
    pub fn rank(&self) -> usize {
        self.basis.dim
    }

    pub fn fresh_qubits(&self) -> usize {
        2 * self.k()
    }

    /// `Σ_{c,j} |λ^α_{j,c}|²` for each `α`.
    pub fn lambda_norms(&self) -> Vec<f64> {
        self.lambda
            .iter()
            .map(|per_c| per_c.iter().flatten().map(C64::norm_sqr).sum())
            .collect()
    }

    /// Largest entrywise error of `Σ_j λ^α_{j,c} A_j` against `A^α_c`.
    pub fn reconstruction_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (alpha, per_c) in self.vectors.iter().enumerate() {
            for (c, a) in per_c.iter().enumerate() {
                let mut rebuilt = vec![ZERO; a.len()];
                for (j, b) in self.basis.basis.iter().enumerate() {
                    let l = self.lambda[alpha][c][j];
                    rebuilt.iter_mut().zip(b).for_each(|(r, x)| *r += l * x);
                }
                worst = worst.max(linalg::max_abs_diff(&rebuilt, a));
            }
        }
        worst
    }

    /// Column of the composite gate fed by entry assignment `α`
    /// (first entry as most significant bit).
    pub fn input_column(&self, alpha: usize) -> usize {
        let k = self.k();
        let entries = &self.segment.entries;
        let c_in = self
            .slot_hosts
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, host)| {
                let pos = entries.iter().position(|e| e == host).unwrap();
                let bit = (alpha >> (k - 1 - pos)) & 1;
                acc | (bit << (k - 1 - i))
            });
        c_in << (2 * k)
    }
}

/// Local circuit running `region` (gate indices) on `register`.
fn local_circuit(circuit: &Circuit, register: &[usize], region: &[usize]) -> Result<Circuit> {
    let pos: BTreeMap<usize, usize> = register.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let labels = register.iter().map(|&q| circuit.label(q)).collect();
    let mut gates = Vec::with_capacity(region.len());
    for (n, &gi) in region.iter().enumerate() {
        let g = &circuit.gates()[gi];
        if let Some(q) = g.targets().iter().find(|q| !pos.contains_key(q)) {
            return Err(Error::InvalidCircuit(format!(
                "gate at step {} leaves the squeezed region on qubit {q}",
                gi + 1
            )));
        }
        gates.push(g.clone().with_step(n + 1).remap(|q| pos[&q]));
    }
    let arity = gates.iter().map(Gate::arity).max().unwrap_or(1);
    Ok(Circuit::from_parts(labels, gates, 0, arity))
}

fn region_indices(companions: &Companions) -> Vec<usize> {
    companions.region.iter().map(|s| s - 1).collect()
}

/// Computes the vectors, basis and coefficients for one segment.
pub fn squeeze_path(
    formula: &Formula<'_>,
    pathset: &PathSet,
    segment: &Segment,
    index: usize,
) -> Result<SqueezeRecord> {
    let companions = formula.companion_set(pathset, segment, index)?;
    let circuit = formula.circuit;
    let entries = &segment.entries;
    let k = entries.len();
    let q_pi: Vec<usize> = companions.q_pi.iter().copied().collect();
    let v = q_pi.len();
    let register: Vec<usize> = entries.iter().chain(&q_pi).copied().collect();
    let w = register.len();

    let exit = segment.exit;
    let (slots, slot_hosts): (Vec<usize>, Vec<usize>) = if entries.contains(&exit) {
        let s: Vec<usize> = std::iter::once(exit)
            .chain(entries.iter().copied().filter(|&q| q != exit))
            .collect();
        (s.clone(), s)
    } else {
        let s = std::iter::once(exit)
            .chain(entries[1..].iter().copied())
            .collect();
        (s, entries.clone())
    };
    let rest: Vec<usize> = register
        .iter()
        .copied()
        .filter(|q| !slots.contains(q))
        .collect();
    debug_assert_eq!(rest.len(), v);

    let local = local_circuit(circuit, &register, &region_indices(&companions))?;
    let const_bits = q_pi
        .iter()
        .enumerate()
        .fold(0usize, |acc, (i, &q)| match circuit.label(q) {
            InputLabel::Constant(true) => acc | (1 << (v - 1 - i)),
            _ => acc,
        });
    let pos = |q: usize| register.iter().position(|&r| r == q).unwrap();
    let slot_mask: Vec<usize> = slots.iter().map(|&q| 1 << (w - 1 - pos(q))).collect();
    let rest_mask: Vec<usize> = rest.iter().map(|&q| 1 << (w - 1 - pos(q))).collect();
    let spread = |value: usize, masks: &[usize]| {
        let n = masks.len();
        (0..n)
            .filter(|i| (value >> (n - 1 - i)) & 1 == 1)
            .fold(0usize, |acc, i| acc | masks[i])
    };

    let sim = Simulator::with_max_qubits(w.max(1));
    let mut vectors = Vec::with_capacity(1 << k);
    for alpha in 0..1usize << k {
        let psi = sim.run_from_basis(&local, (alpha << v) | const_bits)?;
        let amps = psi.amplitudes();
        let per_c: Vec<ComplexVector> = (0..1usize << k)
            .map(|c| {
                let base = spread(c, &slot_mask);
                (0..1usize << v)
                    .map(|r| amps[base | spread(r, &rest_mask)])
                    .collect()
            })
            .collect();
        vectors.push(per_c);
    }
    let flat: Vec<ComplexVector> = vectors.iter().flatten().cloned().collect();
    let basis = linalg::orthonormalize(&flat, DEFAULT_RANK_TOL)?;
    let lambda = vectors
        .iter()
        .map(|per_c| {
            per_c
                .iter()
                .map(|a| basis.basis.iter().map(|b| linalg::dot(b, a)).collect())
                .collect()
        })
        .collect();
    Ok(SqueezeRecord {
        index,
        segment: segment.clone(),
        companions,
        register,
        slots,
        slot_hosts,
        vectors,
        basis,
        lambda,
    })
}

/// Composite matrix completed with standard basis vectors in index order.
pub fn composite_matrix(record: &SqueezeRecord) -> Result<ComplexMatrix> {
    let dim = 1usize << (3 * record.k());
    composite_matrix_with_order(record, 0..dim)
}

/// Composite matrix whose unspecified columns are completed by projecting
/// standard basis vectors taken in the given order.
pub fn composite_matrix_with_order(
    record: &SqueezeRecord,
    candidates: impl IntoIterator<Item = usize>,
) -> Result<ComplexMatrix> {
    let k = record.k();
    let dim = 1usize << (3 * k);
    if record.rank() > 1 << (2 * k) {
        return Err(Error::Numerical(format!(
            "segment {}: rank {} does not fit {} fresh qubits",
            record.index,
            record.rank(),
            2 * k
        )));
    }
    let specified: Vec<(usize, ComplexVector)> = (0..1usize << k)
        .map(|alpha| {
            let mut col = vec![ZERO; dim];
            for (c, per_j) in record.lambda[alpha].iter().enumerate() {
                for (j, &l) in per_j.iter().enumerate() {
                    col[(c << (2 * k)) | j] = l;
                }
            }
            (record.input_column(alpha), col)
        })
        .collect();
    complete_with_order(dim, &specified, ISOMETRY_TOL, candidates).map_err(|e| match e {
        Error::Numerical(m) => Error::Numerical(format!("segment {}: {m}", record.index)),
        other => other,
    })
}

/// The composite gate on `targets` (slot hosts followed by the fresh
/// qubits) at `step`.
pub fn build_composite_gate(
    record: &SqueezeRecord,
    targets: Vec<usize>,
    step: usize,
) -> Result<Gate> {
    let matrix = composite_matrix(record)?;
    let dev = matrix.unitarity_deviation();
    if dev > UNITARITY_TOL {
        return Err(Error::Numerical(format!(
            "segment {}: completed gate deviates from unitarity by {dev:.3e}",
            record.index
        )));
    }
    Gate::new(step, targets, matrix)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentAction {
    /// `m ≤ 2`: nothing to squeeze.
    Kept,
    /// No companions: the segment's gates are merged into one gate.
    Fused,
    Squeezed,
}

#[derive(Clone, Debug, Serialize)]
pub struct SegmentReport {
    pub index: usize,
    pub start: SegmentStart,
    pub end: SegmentEnd,
    pub len: usize,
    pub entries: Vec<usize>,
    pub exit: usize,
    pub action: SegmentAction,
    pub v: usize,
    pub rank: Option<usize>,
    pub borderline_rank: bool,
    /// Steps of the replaced gates in the input circuit.
    pub replaced: Vec<usize>,
    pub postponed: Vec<usize>,
    /// Step of the replacement gate in the squeezed circuit.
    pub new_step: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SqueezedCircuit {
    pub circuit: Circuit,
    pub records: Vec<SqueezeRecord>,
    pub segments: Vec<SegmentReport>,
    /// Steps of input gates outside the computation graph, all dropped.
    pub dropped: Vec<usize>,
    /// Number of wires labeled by a block variable.
    pub s: usize,
    /// True when no segment could be squeezed and the input was returned.
    pub unchanged: bool,
    /// Some composite gate is wider than the input's arity bound.
    pub exceeds_arity_bound: bool,
}

impl SqueezedCircuit {
    pub fn gate_count(&self) -> usize {
        self.circuit.gates().len()
    }

    pub fn size_bound(&self) -> usize {
        4 * self.s + 1
    }
}

enum Event<'r> {
    Keep(usize),
    Fuse(&'r Segment, Vec<usize>),
    Squeeze(&'r SqueezeRecord),
}

/// Squeezes every segment of length `m > 2` of the block's paths.
pub fn squeeze_all(f_rho: &Circuit, block: &BTreeSet<usize>) -> Result<SqueezedCircuit> {
    let formula = Formula::new(f_rho)?;
    let pathset = formula.path_sets(block);
    let segments = formula.segments(&pathset);
    let s = pathset.s();
    let d_in = f_rho.arity_bound();

    let mut reports: Vec<SegmentReport> = Vec::with_capacity(segments.len());
    let mut records = Vec::new();
    let mut fused: Vec<(usize, Vec<usize>)> = Vec::new();
    for (index, seg) in segments.iter().enumerate() {
        let mut report = SegmentReport {
            index,
            start: seg.start,
            end: seg.end,
            len: seg.len(),
            entries: seg.entries.clone(),
            exit: seg.exit,
            action: SegmentAction::Kept,
            v: 0,
            rank: None,
            borderline_rank: false,
            replaced: Vec::new(),
            postponed: Vec::new(),
            new_step: None,
        };
        if seg.len() > 2 {
            let comp = formula.companion_set(&pathset, seg, index)?;
            report.replaced = comp.region.clone();
            report.postponed = comp.postponed.clone();
            report.v = comp.q_pi.len();
            if comp.q_pi.is_empty() {
                report.action = SegmentAction::Fused;
                fused.push((index, region_indices(&comp)));
            } else {
                let record = squeeze_path(&formula, &pathset, seg, index)?;
                report.action = SegmentAction::Squeezed;
                report.rank = Some(record.rank());
                report.borderline_rank = record.basis.is_borderline(DEFAULT_RANK_TOL);
                records.push(record);
            }
        }
        reports.push(report);
    }

    if records.is_empty() && fused.is_empty() {
        return Ok(SqueezedCircuit {
            circuit: f_rho.clone(),
            records,
            segments: reports,
            dropped: Vec::new(),
            s,
            unchanged: true,
            exceeds_arity_bound: false,
        });
    }

    let gates = f_rho.gates();
    let replaced: BTreeSet<usize> = reports
        .iter()
        .flat_map(|r| r.replaced.iter().map(|s| s - 1))
        .collect();
    let dropped: Vec<usize> = (0..gates.len())
        .filter(|g| !formula.graph.contains(*g))
        .map(|g| g + 1)
        .collect();

    // events keyed by the input position at which they are emitted
    let mut events: BTreeMap<usize, Event<'_>> = BTreeMap::new();
    for g in formula.graph.nodes.iter().filter(|g| !replaced.contains(g)) {
        events.insert(*g, Event::Keep(*g));
    }
    for (index, region) in &fused {
        events.insert(
            *region.last().unwrap(),
            Event::Fuse(&segments[*index], region.clone()),
        );
    }
    for r in &records {
        let last = r.companions.region.last().unwrap() - 1;
        events.insert(last, Event::Squeeze(r));
    }

    let m = f_rho.num_qubits();
    let mut phys: Vec<usize> = (0..m).collect();
    let mut labels: Vec<InputLabel> = f_rho.labels().to_vec();
    let mut emitted: Vec<Gate> = Vec::with_capacity(events.len());
    let mut new_steps: BTreeMap<usize, usize> = BTreeMap::new();
    let mut max_arity = 0;
    for event in events.values() {
        let step = emitted.len() + 1;
        let gate = match event {
            Event::Keep(g) => gates[*g].clone().with_step(step).remap(|q| phys[q]),
            Event::Fuse(seg, region) => {
                let local = local_circuit(f_rho, &seg.entries, region)?;
                let u = Simulator::with_max_qubits(seg.entries.len()).operator(&local)?;
                new_steps.insert(seg_index(&segments, seg), step);
                Gate::new(step, seg.entries.iter().map(|&q| phys[q]).collect(), u)?
            }
            Event::Squeeze(r) => {
                let k = r.k();
                let first_fresh = labels.len();
                labels.extend(std::iter::repeat_n(InputLabel::Constant(false), 2 * k));
                let targets = r
                    .slot_hosts
                    .iter()
                    .map(|&q| phys[q])
                    .chain(first_fresh..first_fresh + 2 * k)
                    .collect();
                let gate = build_composite_gate(r, targets, step)?;
                if !r.segment.entries.contains(&r.segment.exit) {
                    phys[r.segment.exit] = phys[r.segment.entries[0]];
                }
                new_steps.insert(r.index, step);
                gate
            }
        };
        max_arity = max_arity.max(gate.arity());
        emitted.push(gate);
    }
    let output = phys[f_rho.output_qubit()];

    // drop qubits no gate touches
    let mut used = vec![false; labels.len()];
    used[output] = true;
    for g in &emitted {
        g.targets().iter().for_each(|&q| used[q] = true);
    }
    let mut compact = vec![usize::MAX; labels.len()];
    let mut kept_labels = Vec::new();
    for (q, label) in labels.iter().enumerate() {
        if used[q] {
            compact[q] = kept_labels.len();
            kept_labels.push(*label);
        }
    }
    let emitted = emitted
        .into_iter()
        .map(|g| g.remap(|q| compact[q]))
        .collect();
    let arity_bound = d_in.max(max_arity);
    let circuit = Circuit::from_parts(kept_labels, emitted, compact[output], arity_bound)
        .with_num_variables(f_rho.num_variables());

    for report in &mut reports {
        report.new_step = new_steps.get(&report.index).copied();
    }
    Ok(SqueezedCircuit {
        circuit,
        records,
        segments: reports,
        dropped,
        s,
        unchanged: false,
        exceeds_arity_bound: max_arity > d_in,
    })
}

fn seg_index(segments: &[Segment], seg: &Segment) -> usize {
    segments.iter().position(|s| std::ptr::eq(s, seg)).unwrap()
}

/// Outcome of comparing a restricted formula with its squeezed circuit.
#[derive(Clone, Debug, Serialize)]
pub struct SqueezeVerification {
    pub block: Vec<usize>,
    pub original: Vec<f64>,
    pub squeezed: Vec<f64>,
    pub max_deviation: f64,
    /// Accept / reject / undetermined classification agrees for every `α`.
    pub verdicts_match: bool,
    pub gate_count: usize,
    pub size_bound: usize,
    pub max_unitarity_deviation: f64,
    pub ranks: Vec<usize>,
}

impl SqueezeVerification {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation <= tol
            && self.verdicts_match
            && self.gate_count <= self.size_bound
            && self.max_unitarity_deviation <= UNITARITY_TOL
            && self.ranks.iter().all(|&d| (1..=16).contains(&d))
    }
}

fn classify(p: f64) -> i8 {
    if p > ACCEPT {
        1
    } else if p < REJECT {
        -1
    } else {
        0
    }
}

/// Compares acceptance probabilities over every assignment of the block.
pub fn verify_squeeze(
    sim: &Simulator,
    f_rho: &Circuit,
    squeezed: &SqueezedCircuit,
    block: &BTreeSet<usize>,
) -> Result<SqueezeVerification> {
    let block: Vec<usize> = block.iter().copied().collect();
    let original = sim.block_probabilities(f_rho, &block)?;
    let after = sim.block_probabilities(&squeezed.circuit, &block)?;
    let max_deviation = original
        .iter()
        .zip(&after)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let verdicts_match = original
        .iter()
        .zip(&after)
        .all(|(&a, &b)| classify(a) == classify(b));
    let max_unitarity_deviation = squeezed
        .circuit
        .gates()
        .par_iter()
        .map(|g| g.matrix().unitarity_deviation())
        .reduce(|| 0.0, f64::max);
    Ok(SqueezeVerification {
        block,
        original,
        squeezed: after,
        max_deviation,
        verdicts_match,
        gate_count: squeezed.gate_count(),
        size_bound: squeezed.size_bound(),
        max_unitarity_deviation,
        ranks: squeezed.records.iter().map(SqueezeRecord::rank).collect(),
    })
}

/// Same qubit count, labels, output and gate placement; matrices may differ.
pub fn same_topology(a: &Circuit, b: &Circuit) -> bool {
    a.num_qubits() == b.num_qubits()
        && a.output_qubit() == b.output_qubit()
        && a.gates().len() == b.gates().len()
        && a.gates()
            .iter()
            .zip(b.gates())
            .all(|(x, y)| x.targets() == y.targets())
}
