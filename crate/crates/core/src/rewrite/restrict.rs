use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::circuit::{Circuit, InputLabel};
use crate::error::{Error, Result};

/// Fixed values for every variable outside a block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Restriction {
    pub block: BTreeSet<usize>,
    pub values: BTreeMap<usize, bool>,
}

impl Restriction {
    pub fn new(block: BTreeSet<usize>, values: BTreeMap<usize, bool>) -> Self {
        Self { block, values }
    }

    /// Variables `1..=n` outside the block, in ascending order, receive the
    /// bits of `assignment` with the first of them as the most significant.
    pub fn from_index(n: usize, block: &BTreeSet<usize>, assignment: usize) -> Self {
        let outside: Vec<usize> = (1..=n).filter(|j| !block.contains(j)).collect();
        let k = outside.len();
        let values = outside
            .iter()
            .enumerate()
            .map(|(pos, &j)| (j, (assignment >> (k - 1 - pos)) & 1 == 1))
            .collect();
        Self::new(block.clone(), values)
    }

    /// Checks that every variable in `1..=n` outside the block is assigned.
    pub fn check_total(&self, n: usize) -> Result<()> {
        match (1..=n).find(|j| !self.block.contains(j) && !self.values.contains_key(j)) {
            Some(j) => Err(Error::RestrictionNotTotal(j)),
            None => Ok(()),
        }
    }
}

/// Replaces the labels of variables outside the block by the constants
/// `rho` assigns. Gates are untouched and the variable count is kept.
pub fn restrict(circuit: &Circuit, rho: &Restriction) -> Result<Circuit> {
    rho.check_total(circuit.num_variables())?;
    let labels = circuit
        .labels()
        .iter()
        .map(|&l| match l {
            InputLabel::Variable(j) if !rho.block.contains(&j) => {
                InputLabel::Constant(rho.values[&j])
            }
            other => other,
        })
        .collect();
    Ok(circuit.with_labels(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gates;
    use crate::simulator::Simulator;

    fn toffoli_and() -> Circuit {
        let labels = vec![
            InputLabel::Variable(1),
            InputLabel::Variable(2),
            InputLabel::Constant(false),
        ];
        let mut c = Circuit::new(labels, 2).with_arity_bound(3);
        c.push(vec![0, 1, 2], gates::toffoli()).unwrap();
        c
    }

    #[test]
    fn and_restricted_to_x1() {
        let c = toffoli_and();
        let block = BTreeSet::from([1]);
        let sim = Simulator::default();
        let on = restrict(&c, &Restriction::from_index(2, &block, 1)).unwrap();
        assert_eq!(sim.block_probabilities(&on, &[1]).unwrap(), vec![0.0, 1.0]);
        let off = restrict(&c, &Restriction::from_index(2, &block, 0)).unwrap();
        assert_eq!(sim.block_probabilities(&off, &[1]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(on.num_variables(), 2);
        assert_eq!(on.gates(), c.gates());
    }

    #[test]
    fn empty_block_gives_constant_circuit() {
        let c = toffoli_and();
        let r = restrict(&c, &Restriction::from_index(2, &BTreeSet::new(), 0b11)).unwrap();
        assert!(r.labels().iter().all(InputLabel::is_constant));
        let (_, o) = Simulator::default().run(&r, &[false, false]).unwrap();
        assert_eq!(o.p1, 1.0);
    }

    #[test]
    fn partial_restriction_is_rejected() {
        let rho = Restriction::new(BTreeSet::from([1]), BTreeMap::new());
        assert!(matches!(
            restrict(&toffoli_and(), &rho),
            Err(Error::RestrictionNotTotal(2))
        ));
    }
}
