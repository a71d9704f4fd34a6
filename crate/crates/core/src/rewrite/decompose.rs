use std::collections::BTreeSet;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

/// Splits a gate list acting on two disjoint qubit sets into the gates on
/// `q1` and the gates on `q2`, each in original order. Either composition
/// order of the two halves reproduces the original operator.
pub fn decompose_disjoint(
    gates: &[Gate],
    q1: &BTreeSet<usize>,
    q2: &BTreeSet<usize>,
) -> Result<(Vec<Gate>, Vec<Gate>)> {
    if let Some(q) = q1.intersection(q2).next() {
        return Err(Error::InvalidArgument(format!(
            "qubit {q} belongs to both sets"
        )));
    }
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for g in gates {
        if g.targets().iter().all(|q| q1.contains(q)) {
            c1.push(g.clone());
        } else if g.targets().iter().all(|q| q2.contains(q)) {
            c2.push(g.clone());
        } else {
            return Err(Error::StraddlingGate { step: g.step() });
        }
    }
    Ok((c1, c2))
}

/// Result of [`postpone`]: the reordered circuit and the original steps of
/// the gates that were moved behind the last gate on `q`.
#[derive(Clone, Debug)]
pub struct Postponement {
    pub circuit: Circuit,
    pub moved: Vec<usize>,
}

/// Moves every gate that follows `g_j` in the forward light cone of `r_j`
/// to just after `g_t`, where `g_1, …, g_t` are the gates acting on `q` and
/// `g_j` acts on exactly `q` and `r_j`.
///
/// Rejected when the gates on `q` do not have that shape, or when the light
/// cone of some `r_j` reaches a later `g_i` (the moved gates would then
/// influence `q`).
pub fn postpone(circuit: &Circuit, q: usize, r_list: &[usize]) -> Result<Postponement> {
    let gates = circuit.gates();
    let on_q: Vec<usize> = (0..gates.len()).filter(|&i| gates[i].acts_on(q)).collect();
    if on_q.len() != r_list.len() {
        let step = on_q.get(r_list.len()).map_or(0, |&i| i + 1);
        return Err(Error::PostponeHypothesis {
            step,
            reason: format!(
                "{} gates act on qubit {q}, but {} partner qubits were given",
                on_q.len(),
                r_list.len()
            ),
        });
    }
    let distinct: BTreeSet<usize> = r_list.iter().copied().collect();
    if distinct.len() != r_list.len() || distinct.contains(&q) {
        return Err(Error::InvalidArgument(
            "partner qubits must be distinct and differ from q".into(),
        ));
    }
    for (&gi, &r) in on_q.iter().zip(r_list) {
        let t: BTreeSet<usize> = gates[gi].targets().iter().copied().collect();
        if t != BTreeSet::from([q, r]) {
            return Err(Error::PostponeHypothesis {
                step: gi + 1,
                reason: format!("gate must act on exactly qubits {q} and {r}"),
            });
        }
    }
    let Some(&last) = on_q.last() else {
        return Ok(Postponement {
            circuit: circuit.clone(),
            moved: Vec::new(),
        });
    };

    let mut moved = BTreeSet::new();
    for (&gj, &r) in on_q.iter().zip(r_list) {
        let mut cone = BTreeSet::from([r]);
        for (gi, g) in gates.iter().enumerate().take(last + 1).skip(gj + 1) {
            if !g.targets().iter().any(|t| cone.contains(t)) {
                continue;
            }
            if g.acts_on(q) {
                return Err(Error::PostponeHypothesis {
                    step: gi + 1,
                    reason: format!(
                        "qubit {r} interacts with {q} again before the last gate on {q}"
                    ),
                });
            }
            cone.extend(g.targets().iter().copied());
            moved.insert(gi);
        }
    }

    let order = (0..=last)
        .filter(|i| !moved.contains(i))
        .chain(moved.iter().copied())
        .chain(last + 1..gates.len());
    let reordered = order
        .enumerate()
        .map(|(pos, i)| gates[i].clone().with_step(pos + 1))
        .collect();
    Ok(Postponement {
        circuit: Circuit::from_parts(
            circuit.labels().to_vec(),
            reordered,
            circuit.output_qubit(),
            circuit.arity_bound(),
        )
        .with_num_variables(circuit.num_variables()),
        moved: moved.into_iter().map(|i| i + 1).collect(),
    })
}
