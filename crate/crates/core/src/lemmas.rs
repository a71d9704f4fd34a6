//! Randomized property suites for the tensor-product identities and the two
//! circuit rewrites that the squeezing argument rests on.
//!
//! Every case draws from its own ChaCha stream, so a suite's report depends
//! only on the seed and the case count.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, InputLabel};
use crate::error::Result;
use crate::linalg::{
    inner_product, kron, max_abs_diff, norm, random_unit_vector, random_unitary, random_vector,
    ComplexMatrix,
};
use crate::rewrite::{decompose_disjoint, postpone};
use crate::simulator::{Simulator, StateVector};

pub const ALGEBRA_TOL: f64 = 1e-12;
pub const REWRITE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Lemma {
    /// Norm and inner product of tensor products factor.
    TensorFactorization,
    /// Tensor products of two orthonormal families are orthonormal.
    OrthonormalFamily,
    /// Gates on disjoint qubit sets may be run in either block order.
    DisjointDecomposition,
    /// Postponing partner light cones preserves the operator.
    Postponement,
}

impl Lemma {
    pub const ALL: [Lemma; 4] = [
        Lemma::TensorFactorization,
        Lemma::OrthonormalFamily,
        Lemma::DisjointDecomposition,
        Lemma::Postponement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::TensorFactorization => "tensor-factorization",
            Lemma::OrthonormalFamily => "orthonormal-family",
            Lemma::DisjointDecomposition => "disjoint-decomposition",
            Lemma::Postponement => "postponement",
        }
    }

    pub fn tol(self) -> f64 {
        match self {
            Lemma::TensorFactorization | Lemma::OrthonormalFamily => ALGEBRA_TOL,
            Lemma::DisjointDecomposition | Lemma::Postponement => REWRITE_TOL,
        }
    }

    fn index(self) -> u64 {
        self as u64
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub max_error: f64,
    pub tol: f64,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn case_rng(seed: u64, lemma: Lemma, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((lemma.index() << 32) | case as u64);
    rng
}

/// Runs `cases` random instances of one lemma.
pub fn check_lemma(lemma: Lemma, seed: u64, cases: usize) -> Result<LemmaReport> {
    let tol = lemma.tol();
    let errors = (0..cases)
        .into_par_iter()
        .map(|case| {
            let mut rng = case_rng(seed, lemma, case);
            match lemma {
                Lemma::TensorFactorization => tensor_case(&mut rng),
                Lemma::OrthonormalFamily => orthonormal_case(&mut rng),
                Lemma::DisjointDecomposition => decomposition_case(&mut rng),
                Lemma::Postponement => postponement_case(&mut rng),
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LemmaReport {
        lemma: lemma.name(),
        cases,
        failures: errors.iter().filter(|&&e| e.is_nan() || e > tol).count(),
        max_error: errors.iter().copied().fold(0.0, f64::max),
        tol,
    })
}

/// All four suites, in a fixed order.
pub fn verify_lemmas(seed: u64, cases: usize) -> Result<Vec<LemmaReport>> {
    Lemma::ALL
        .iter()
        .map(|&l| check_lemma(l, seed, cases))
        .collect()
}

fn random_dim<R: Rng>(rng: &mut R) -> usize {
    1 << rng.random_range(1..=3)
}

fn tensor_case<R: Rng>(rng: &mut R) -> Result<f64> {
    let (da, db) = (random_dim(rng), random_dim(rng));
    let a1 = random_vector(da, rng);
    let a2 = random_vector(da, rng);
    let b1 = random_vector(db, rng);
    let b2 = random_vector(db, rng);
    let x1 = kron(&a1, &b1)?;
    let x2 = kron(&a2, &b2)?;
    let norm_err = (norm(&x1) - norm(&a1) * norm(&b1)).abs();
    let lhs = inner_product(&x1, &x2)?;
    let rhs = inner_product(&a1, &a2)? * inner_product(&b1, &b2)?;
    // relative to the magnitudes involved, which are O(dim)
    let scale = (norm(&x1) * norm(&x2)).max(1.0);
    Ok(norm_err.max((lhs - rhs).norm() / scale))
}

fn orthonormal_case<R: Rng>(rng: &mut R) -> Result<f64> {
    let (da, db) = (random_dim(rng), random_dim(rng));
    let ua = random_unitary(da, rng);
    let ub = random_unitary(db, rng);
    let ka = rng.random_range(1..=da);
    let kb = rng.random_range(1..=db);
    let mut family = Vec::with_capacity(ka * kb);
    for j in 0..ka {
        for l in 0..kb {
            family.push(kron(&ua.column(j), &ub.column(l))?);
        }
    }
    let mut worst: f64 = 0.0;
    for (i, x) in family.iter().enumerate() {
        for (k, y) in family.iter().enumerate() {
            let expected = if i == k { 1.0 } else { 0.0 };
            let ip = inner_product(x, y)?;
            worst = worst.max((ip - expected).norm());
        }
    }
    Ok(worst)
}

fn random_state<R: Rng>(m: usize, rng: &mut R) -> Result<StateVector> {
    StateVector::from_amplitudes(random_unit_vector(1 << m, rng))
}

fn run_gates(state: &StateVector, gates: &[&Gate]) -> Result<StateVector> {
    let mut s = state.clone();
    for g in gates {
        s.apply(g)?;
    }
    Ok(s)
}

fn decomposition_case<R: Rng>(rng: &mut R) -> Result<f64> {
    let m = 6;
    let mut qubits: Vec<usize> = (0..m).collect();
    qubits.shuffle(rng);
    let split = rng.random_range(1..m);
    let q1: BTreeSet<usize> = qubits[..split].iter().copied().collect();
    let q2: BTreeSet<usize> = qubits[split..].iter().copied().collect();
    let sides = [
        q1.iter().copied().collect::<Vec<_>>(),
        q2.iter().copied().collect(),
    ];

    let count = rng.random_range(4..=12);
    let mut gates = Vec::with_capacity(count);
    for step in 1..=count {
        let side = &sides[rng.random_range(0..2)];
        let arity = if side.len() >= 2 && rng.random_bool(0.6) {
            2
        } else {
            1
        };
        let targets: Vec<usize> = side.choose_multiple(rng, arity).copied().collect();
        gates.push(Gate::new(step, targets, random_unitary(1 << arity, rng))?);
    }
    let (c1, c2) = decompose_disjoint(&gates, &q1, &q2)?;
    let original: Vec<&Gate> = gates.iter().collect();
    let first_then_second: Vec<&Gate> = c1.iter().chain(&c2).collect();
    let second_then_first: Vec<&Gate> = c2.iter().chain(&c1).collect();

    let inputs = [
        StateVector::basis(m, rng.random_range(0..1 << m)),
        random_state(m, rng)?,
    ];
    let mut worst: f64 = 0.0;
    for input in &inputs {
        let base = run_gates(input, &original)?;
        for order in [&first_then_second, &second_then_first] {
            let other = run_gates(input, order)?;
            worst = worst.max(max_abs_diff(base.amplitudes(), other.amplitudes()));
        }
    }
    Ok(worst)
}

/// A circuit in which `g_1, …, g_t` on `q` pair it with distinct partners,
/// interleaved with random gates that avoid `q`. Retried until the partner
/// light cones stay away from `q`.
fn postponement_instance<R: Rng>(rng: &mut R) -> (Circuit, usize, Vec<usize>) {
    loop {
        let m = rng.random_range(4..=6);
        let q = rng.random_range(0..m);
        let others: Vec<usize> = (0..m).filter(|&x| x != q).collect();
        let t = rng.random_range(1..=3.min(others.len()));
        let partners: Vec<usize> = others.choose_multiple(rng, t).copied().collect();
        let mut c = Circuit::new(vec![InputLabel::Constant(false); m], q);
        for _ in 0..rng.random_range(0..=2) {
            push_random_avoiding(&mut c, &others, rng);
        }
        for &r in &partners {
            let mut pair = vec![q, r];
            pair.shuffle(rng);
            c.push(pair, random_unitary(4, rng)).expect("valid targets");
            for _ in 0..rng.random_range(0..=3) {
                push_random_avoiding(&mut c, &others, rng);
            }
        }
        if postpone(&c, q, &partners).is_ok() {
            return (c, q, partners);
        }
    }
}

fn push_random_avoiding<R: Rng>(c: &mut Circuit, pool: &[usize], rng: &mut R) {
    let arity = if pool.len() >= 2 && rng.random_bool(0.7) {
        2
    } else {
        1
    };
    let targets: Vec<usize> = pool.choose_multiple(rng, arity).copied().collect();
    c.push(targets, random_unitary(1 << arity, rng))
        .expect("valid targets");
}

fn postponement_case<R: Rng>(rng: &mut R) -> Result<f64> {
    let (c, q, partners) = postponement_instance(rng);
    let p = postpone(&c, q, &partners)?;
    let sim = Simulator::default();
    let before: ComplexMatrix = sim.operator(&c)?;
    let after = sim.operator(&p.circuit)?;
    Ok(before.max_abs_diff(&after))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_a_small_run() {
        for report in verify_lemmas(7, 50).unwrap() {
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = check_lemma(Lemma::Postponement, 11, 20).unwrap();
        let b = check_lemma(Lemma::Postponement, 11, 20).unwrap();
        assert_eq!(a.max_error, b.max_error);
    }

    #[test]
    fn postponement_instances_move_gates() {
        let mut moved = 0;
        for case in 0..50 {
            let mut rng = case_rng(3, Lemma::Postponement, case);
            let (c, q, partners) = postponement_instance(&mut rng);
            moved += postpone(&c, q, &partners).unwrap().moved.len();
        }
        assert!(moved > 0);
    }
}
