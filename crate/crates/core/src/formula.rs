//! Computation graphs, formula detection, block path sets and companions.
//!
//! Gates are referred to by their position in [`Circuit::gates`] (so step
//! `s` is index `s - 1`). An edge `g → h` over qubit `q` means `h` is the
//! next gate acting on `q` after `g`. The computation graph keeps the gates
//! from which the output gate (the last gate on the output qubit) can be
//! reached; the circuit is a formula when that graph, counted with
//! multiplicity, is a tree.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{Error, Result};

/// Neighbouring gates along each qubit.
#[derive(Clone, Debug)]
pub struct Wiring {
    /// `prev[g][i]`: previous gate on the `i`-th target of gate `g`.
    pub prev: Vec<Vec<Option<usize>>>,
    /// `next[g][i]`: next gate on the `i`-th target of gate `g`.
    pub next: Vec<Vec<Option<usize>>>,
    /// First gate acting on each qubit.
    pub first: Vec<Option<usize>>,
    /// Last gate acting on each qubit.
    pub last: Vec<Option<usize>>,
}

impl Wiring {
    pub fn new(circuit: &Circuit) -> Self {
        let m = circuit.num_qubits();
        let mut last: Vec<Option<usize>> = vec![None; m];
        let mut first: Vec<Option<usize>> = vec![None; m];
        let gates = circuit.gates();
        let mut prev = Vec::with_capacity(gates.len());
        let mut next: Vec<Vec<Option<usize>>> =
            gates.iter().map(|g| vec![None; g.arity()]).collect();
        for (gi, g) in gates.iter().enumerate() {
            let mut p = Vec::with_capacity(g.arity());
            for &q in g.targets() {
                let before = last[q];
                if let Some(pg) = before {
                    let slot = gates[pg].targets().iter().position(|&t| t == q).unwrap();
                    next[pg][slot] = Some(gi);
                } else {
                    first[q] = Some(gi);
                }
                p.push(before);
                last[q] = Some(gi);
            }
            prev.push(p);
        }
        Self {
            prev,
            next,
            first,
            last,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub qubit: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComputationGraph {
    /// Output gate; `None` when no gate touches the output qubit, in which
    /// case the graph is the bare output wire.
    pub root: Option<usize>,
    pub nodes: BTreeSet<usize>,
    /// Edges between nodes, with multiplicity.
    pub edges: Vec<GraphEdge>,
    /// Input wires feeding nodes directly, as `(qubit, gate)`.
    pub leaves: Vec<(usize, usize)>,
}

impl ComputationGraph {
    pub fn contains(&self, gate: usize) -> bool {
        self.nodes.contains(&gate)
    }

    /// Undirected tree test: connected and `|E| = |V| − 1`.
    pub fn is_tree(&self) -> bool {
        let Some(root) = self.root else {
            return true;
        };
        if self.edges.len() + 1 != self.nodes.len() {
            return false;
        }
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in &self.edges {
            adj.entry(e.from).or_default().push(e.to);
            adj.entry(e.to).or_default().push(e.from);
        }
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.nodes.len()
    }

    /// The unique out-edge of `gate` inside the graph, for trees.
    fn out_edge(&self, gate: usize) -> Option<GraphEdge> {
        self.edges.iter().copied().find(|e| e.from == gate)
    }
}

pub fn computation_graph(circuit: &Circuit) -> ComputationGraph {
    let wiring = Wiring::new(circuit);
    computation_graph_with(circuit, &wiring)
}

fn computation_graph_with(circuit: &Circuit, wiring: &Wiring) -> ComputationGraph {
    let root = wiring.last.get(circuit.output_qubit()).copied().flatten();
    let mut graph = ComputationGraph {
        root,
        nodes: BTreeSet::new(),
        edges: Vec::new(),
        leaves: Vec::new(),
    };
    let Some(root) = root else {
        return graph;
    };
    let gates = circuit.gates();
    let mut queue = VecDeque::from([root]);
    graph.nodes.insert(root);
    while let Some(v) = queue.pop_front() {
        for (slot, provider) in wiring.prev[v].iter().enumerate() {
            let q = gates[v].targets()[slot];
            match provider {
                Some(u) => {
                    graph.edges.push(GraphEdge {
                        from: *u,
                        to: v,
                        qubit: q,
                    });
                    if graph.nodes.insert(*u) {
                        queue.push_back(*u);
                    }
                }
                None => graph.leaves.push((q, v)),
            }
        }
    }
    graph.edges.sort();
    graph.leaves.sort();
    graph
}

/// Number of distinct paths from each input wire to the output, saturating.
pub fn path_counts(circuit: &Circuit) -> Vec<u64> {
    let wiring = Wiring::new(circuit);
    let gates = circuit.gates();
    let out = circuit.output_qubit();
    // into[g]: paths from the inputs of g to the output wire
    let mut into = vec![0u64; gates.len()];
    for g in (0..gates.len()).rev() {
        let mut total = 0u64;
        for (slot, &q) in gates[g].targets().iter().enumerate() {
            let from_slot = match wiring.next[g][slot] {
                Some(h) => into[h],
                None => u64::from(q == out),
            };
            total = total.saturating_add(from_slot);
        }
        into[g] = total;
    }
    (0..circuit.num_qubits())
        .map(|q| match wiring.first[q] {
            Some(g) => into[g],
            None => u64::from(q == out),
        })
        .collect()
}

/// Every input wire has at most one path to the output.
pub fn unique_path_test(circuit: &Circuit) -> bool {
    path_counts(circuit).iter().all(|&c| c <= 1)
}

/// Tree test on the computation graph.
pub fn is_formula(circuit: &Circuit) -> bool {
    let tree = computation_graph(circuit).is_tree();
    debug_assert_eq!(tree, unique_path_test(circuit), "formula tests disagree");
    tree
}

/// One gate traversed by a path: entered on `entry`, left on `exit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Hop {
    pub gate: usize,
    pub entry: usize,
    pub exit: usize,
}

/// Path from an input wire to the output wire.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Path {
    pub wire: usize,
    pub hops: Vec<Hop>,
}

impl Path {
    pub fn gates(&self) -> impl Iterator<Item = usize> + '_ {
        self.hops.iter().map(|h| h.gate)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PathSet {
    pub block: BTreeSet<usize>,
    /// Input wires labeled by a block variable (their count is `s_j`).
    pub wires: Vec<usize>,
    /// One path per block wire that reaches the output, in wire order.
    pub paths: Vec<Path>,
}

impl PathSet {
    pub fn s(&self) -> usize {
        self.wires.len()
    }
}

/// Analysis context for a formula: wiring plus computation graph.
#[derive(Clone, Debug)]
pub struct Formula<'a> {
    pub circuit: &'a Circuit,
    pub wiring: Wiring,
    pub graph: ComputationGraph,
}

impl<'a> Formula<'a> {
    pub fn new(circuit: &'a Circuit) -> Result<Self> {
        let wiring = Wiring::new(circuit);
        let graph = computation_graph_with(circuit, &wiring);
        if !graph.is_tree() {
            return Err(Error::NotFormula);
        }
        Ok(Self {
            circuit,
            wiring,
            graph,
        })
    }

    /// Path from input wire `q`, if it reaches the output.
    pub fn path_from(&self, q: usize) -> Option<Path> {
        let out = self.circuit.output_qubit();
        let mut hops = Vec::new();
        let Some(mut g) = self.wiring.first[q] else {
            return (q == out).then_some(Path { wire: q, hops });
        };
        if !self.graph.contains(g) {
            return None;
        }
        let mut entry = q;
        loop {
            match self.graph.out_edge(g) {
                Some(e) => {
                    hops.push(Hop {
                        gate: g,
                        entry,
                        exit: e.qubit,
                    });
                    entry = e.qubit;
                    g = e.to;
                }
                None => {
                    hops.push(Hop {
                        gate: g,
                        entry,
                        exit: out,
                    });
                    return Some(Path { wire: q, hops });
                }
            }
        }
    }

    pub fn path_sets(&self, block: &BTreeSet<usize>) -> PathSet {
        let wires = self.circuit.wires_labeled_by(block);
        let paths = wires.iter().filter_map(|&q| self.path_from(q)).collect();
        PathSet {
            block: block.clone(),
            wires,
            paths,
        }
    }

    /// Gates where two paths of the set meet, i.e. that are entered by
    /// paths on at least two different qubits.
    pub fn intersection_gates(&self, pathset: &PathSet) -> BTreeSet<usize> {
        intersection_gates(pathset)
    }

    /// Splits the paths of `pathset` at their intersection gates, in the
    /// natural order: ascending step of the segment's final gate (the output
    /// wire last), ties broken by the smallest entry qubit.
    pub fn segments(&self, pathset: &PathSet) -> Vec<Segment> {
        let merges = intersection_gates(pathset);
        let gates = self.circuit.gates();
        let mut by_start: BTreeMap<SegmentStart, Segment> = BTreeMap::new();
        for path in &pathset.paths {
            let mut start = SegmentStart::Wire(path.wire);
            let mut entries = vec![path.wire];
            let mut exit = path.wire;
            let mut interior: Vec<usize> = Vec::new();
            let mut hops: Vec<Hop> = Vec::new();
            for hop in &path.hops {
                if merges.contains(&hop.gate) {
                    let seg = Segment {
                        start,
                        interior: std::mem::take(&mut interior),
                        hops: std::mem::take(&mut hops),
                        end: SegmentEnd::Gate(hop.gate),
                        entries: std::mem::take(&mut entries),
                        exit,
                    };
                    by_start.entry(start).or_insert(seg);
                    start = SegmentStart::Gate(hop.gate);
                    entries = gates[hop.gate].targets().to_vec();
                    hops.push(*hop);
                } else {
                    interior.push(hop.gate);
                    hops.push(*hop);
                }
                exit = hop.exit;
            }
            let seg = Segment {
                start,
                interior,
                hops,
                end: SegmentEnd::Output,
                entries,
                exit,
            };
            by_start.entry(start).or_insert(seg);
        }
        let mut segs: Vec<Segment> = by_start.into_values().collect();
        segs.sort_by_key(|s| {
            let end = match s.end {
                SegmentEnd::Gate(g) => g,
                SegmentEnd::Output => usize::MAX,
            };
            (end, s.entries.iter().copied().min().unwrap_or(usize::MAX))
        });
        segs
    }

    /// Gates feeding `gate` through its non-path inputs, transitively.
    fn side_cone(&self, gate: usize, path_entry: usize) -> BTreeSet<usize> {
        let g = &self.circuit.gates()[gate];
        let mut cone = BTreeSet::new();
        let mut queue: VecDeque<usize> = g
            .targets()
            .iter()
            .enumerate()
            .filter(|(_, &q)| q != path_entry)
            .filter_map(|(slot, _)| self.wiring.prev[gate][slot])
            .collect();
        while let Some(u) = queue.pop_front() {
            if cone.insert(u) {
                queue.extend(self.wiring.prev[u].iter().flatten().copied());
            }
        }
        cone
    }

    /// Companion data for a segment of length `m > 2`.
    ///
    /// The segment's gates `g1..g_{m-1}` together with the constant side
    /// subtrees feeding its interior gates form a region that meets the
    /// rest of the formula only through the entry qubits and the exit
    /// qubit. `Q_π` is the set of qubits of that region other than the
    /// entries; it equals the companion closure of the region's gates at
    /// the step of `g_{m-1}`, computed here with a union-find.
    pub fn companion_set(
        &self,
        pathset: &PathSet,
        segment: &Segment,
        index: usize,
    ) -> Result<Companions> {
        if segment.len() <= 2 {
            return Err(Error::PathTooShort {
                path: index,
                len: segment.len(),
            });
        }
        let gates = self.circuit.gates();
        let mut region: BTreeSet<usize> = segment.c0_gates().collect();
        for hop in &segment.hops {
            if segment.interior.contains(&hop.gate) {
                region.extend(self.side_cone(hop.gate, hop.entry));
            }
        }
        let last = *segment.c0_gates().collect::<Vec<_>>().last().unwrap();

        let mut dsu = DisjointSets::new(self.circuit.num_qubits());
        for &g in region.iter().filter(|&&g| g <= last) {
            let t = gates[g].targets();
            for w in t.windows(2) {
                dsu.union(w[0], w[1]);
            }
        }
        let mut touched: BTreeSet<usize> = BTreeSet::new();
        for &g in &region {
            touched.extend(gates[g].targets().iter().copied());
        }
        let mut q_pi: BTreeSet<usize> = BTreeSet::new();
        for q in 0..self.circuit.num_qubits() {
            if touched.iter().any(|&t| dsu.same(t, q)) {
                q_pi.insert(q);
            }
        }
        for e in &segment.entries {
            q_pi.remove(e);
        }

        // qubits used by block paths outside this segment
        let path_qubits: BTreeSet<usize> = pathset
            .paths
            .iter()
            .flat_map(|p| {
                let wire = (!segment.entries.contains(&p.wire)).then_some(p.wire);
                wire.into_iter().chain(
                    p.hops
                        .iter()
                        .filter(|h| !region.contains(&h.gate))
                        .flat_map(|h| [h.entry, h.exit]),
                )
            })
            .collect();
        for &q in &q_pi {
            if !self.circuit.label(q).is_constant() {
                return Err(Error::VariableCompanion {
                    path: index,
                    qubit: q,
                });
            }
            if q != segment.exit && path_qubits.contains(&q) {
                return Err(Error::InvalidCircuit(format!(
                    "companion qubit {q} of segment {index} lies on another block path"
                )));
            }
        }

        let j1 = match segment.end {
            SegmentEnd::Gate(g) => Some(g + 1),
            SegmentEnd::Output => None,
        };
        let q2 = match segment.end {
            SegmentEnd::Gate(g) => gates[g]
                .targets()
                .iter()
                .copied()
                .find(|&q| q != segment.exit),
            SegmentEnd::Output => None,
        };
        let first_step = segment.c0_gates().next().unwrap() + 1;
        let horizon = j1.unwrap_or(gates.len() + 1);
        let postponed: Vec<usize> = gates
            .iter()
            .enumerate()
            .filter(|(gi, g)| {
                let step = gi + 1;
                !self.graph.contains(*gi)
                    && step > first_step
                    && step < horizon
                    && g.targets().iter().any(|q| q_pi.contains(q))
            })
            .map(|(gi, _)| gi + 1)
            .collect();

        Ok(Companions {
            q_pi,
            q0: segment.entries[0],
            q1: segment.entries.get(1).copied(),
            q2,
            j0: match segment.start {
                SegmentStart::Gate(g) => Some(g + 1),
                SegmentStart::Wire(_) => None,
            },
            j1,
            region: region.into_iter().map(|g| g + 1).collect(),
            postponed,
        })
    }
}

pub fn path_sets(circuit: &Circuit, block: &BTreeSet<usize>) -> Result<PathSet> {
    Ok(Formula::new(circuit)?.path_sets(block))
}

/// Gates at which two paths of the set meet (entered on different qubits).
pub fn intersection_gates(pathset: &PathSet) -> BTreeSet<usize> {
    let mut entries: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for p in &pathset.paths {
        for h in &p.hops {
            entries.entry(h.gate).or_default().insert(h.entry);
        }
    }
    entries
        .into_iter()
        .filter(|(_, e)| e.len() >= 2)
        .map(|(g, _)| g)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum SegmentStart {
    Wire(usize),
    Gate(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SegmentEnd {
    Gate(usize),
    Output,
}

/// Maximal piece of a block path between intersection gates:
/// `(g_1, …, g_m)` where `g_1` is an input wire or intersection gate,
/// `g_m` an intersection gate or the output wire, and nothing in between
/// is an intersection gate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub start: SegmentStart,
    /// Gates strictly between `g_1` and `g_m`.
    pub interior: Vec<usize>,
    /// Hops through `g_1` (when it is a gate) and the interior gates.
    pub hops: Vec<Hop>,
    pub end: SegmentEnd,
    /// Qubits entering `g_1`: the wire itself, or the gate's targets.
    pub entries: Vec<usize>,
    /// Qubit carrying the path out of `g_{m-1}`.
    pub exit: usize,
}

impl Segment {
    /// `m`, counting the start and end elements.
    pub fn len(&self) -> usize {
        self.interior.len() + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The gates `g_1..g_{m-1}` that are actual gates, in step order.
    pub fn c0_gates(&self) -> impl Iterator<Item = usize> + '_ {
        let first = match self.start {
            SegmentStart::Gate(g) => Some(g),
            SegmentStart::Wire(_) => None,
        };
        first.into_iter().chain(self.interior.iter().copied())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Companions {
    pub q_pi: BTreeSet<usize>,
    pub q0: usize,
    pub q1: Option<usize>,
    /// Input of `g_m` not on the path.
    pub q2: Option<usize>,
    /// Step of `g_1` when it is a gate.
    pub j0: Option<usize>,
    /// Step of `g_m` when it is a gate.
    pub j1: Option<usize>,
    /// Steps of the gates replaced when the segment is squeezed.
    pub region: Vec<usize>,
    /// Steps of gates outside the computation graph acting on `Q_π`
    /// after the path and before `g_m`.
    pub postponed: Vec<usize>,
}

/// Union-find over qubit indices.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Classes as sorted lists, ordered by smallest member.
    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.parent.len() {
            let r = self.find(x);
            by_root.entry(r).or_default().push(x);
        }
        let mut classes: Vec<Vec<usize>> = by_root.into_values().collect();
        classes.sort();
        classes
    }
}

/// Companion classes of the qubits at a given step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompanionPartition {
    pub step: usize,
    pub classes: Vec<Vec<usize>>,
}

impl CompanionPartition {
    pub fn class_of(&self, qubit: usize) -> &[usize] {
        self.classes
            .iter()
            .find(|c| c.contains(&qubit))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn are_companions(&self, a: usize, b: usize) -> bool {
        self.class_of(a).contains(&b)
    }
}

/// Incremental companion tracking: advance one gate at a time.
#[derive(Clone, Debug)]
pub struct CompanionTracker<'a> {
    circuit: &'a Circuit,
    sets: DisjointSets,
    step: usize,
}

impl<'a> CompanionTracker<'a> {
    pub fn new(circuit: &'a Circuit) -> Self {
        Self {
            circuit,
            sets: DisjointSets::new(circuit.num_qubits()),
            step: 0,
        }
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Applies the next gate; returns false when the circuit is exhausted.
    pub fn advance(&mut self) -> bool {
        let Some(g) = self.circuit.gates().get(self.step) else {
            return false;
        };
        for w in g.targets().windows(2) {
            self.sets.union(w[0], w[1]);
        }
        self.step += 1;
        true
    }

    pub fn partition(&mut self) -> CompanionPartition {
        CompanionPartition {
            step: self.step,
            classes: self.sets.classes(),
        }
    }
}

/// Companion classes at `step`: transitive closure of "shared a gate with
/// index ≤ step".
pub fn companions(circuit: &Circuit, step: usize) -> Result<CompanionPartition> {
    if step > circuit.gates().len() {
        return Err(Error::InvalidArgument(format!(
            "step {step} beyond the {} gates of the circuit",
            circuit.gates().len()
        )));
    }
    let mut tracker = CompanionTracker::new(circuit);
    while tracker.step() < step {
        tracker.advance();
    }
    Ok(tracker.partition())
}
