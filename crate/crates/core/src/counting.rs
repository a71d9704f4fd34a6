//! Counting bounds for the functions computable by small circuits, and an
//! exhaustive enumerator over finite gate sets to compare them with.
//!
//! All large quantities are handled as base-2 logarithms.

use std::collections::BTreeSet;
use std::f64::consts::E;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{gates, Gate, InputLabel, UNITARITY_TOL};
use crate::error::{Error, Result};
use crate::format::{decode_matrix, encode_matrix};
use crate::linalg::{log2_exact, ComplexMatrix};
use crate::simulator::{decided_function, StateVector};
use crate::truth_table::TruthTable;

/// `log₂ (4e·deg·m/t)^t`.
pub fn warren_bound_log2(m: u64, t: u64, deg: u64) -> Result<f64> {
    if m == 0 || t == 0 || deg == 0 {
        return Err(Error::InvalidArgument(
            "m, t and deg must all be positive".into(),
        ));
    }
    let (m, t, deg) = (m as f64, t as f64, deg as f64);
    Ok(t * (4.0 * E * deg * m / t).log2())
}

/// `(4e·deg·m/t)^t`: the number of consistent strict sign assignments of
/// `m` real polynomials of degree at most `deg` in `t` variables is at
/// most this.
pub fn warren_bound(m: u64, t: u64, deg: u64) -> Result<f64> {
    Ok(warren_bound_log2(m, t, deg)?.exp2())
}

/// Real polynomial as a list of `(coefficient, exponents)` monomials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polynomial {
    pub vars: usize,
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, e)| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                c * e
                    .iter()
                    .zip(x)
                    .map(|(&k, &xi)| xi.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    /// Every monomial of degree at most `deg` with a coefficient uniform in
    /// `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(vars: usize, deg: u32, rng: &mut R) -> Self {
        let mut exps: Vec<Vec<u32>> = vec![vec![]];
        for _ in 0..vars {
            exps = exps
                .into_iter()
                .flat_map(|e| {
                    let used: u32 = e.iter().sum();
                    (0..=deg - used).map(move |k| {
                        let mut next = e.clone();
                        next.push(k);
                        next
                    })
                })
                .collect();
        }
        Self {
            vars,
            terms: exps
                .into_iter()
                .map(|e| (rng.random_range(-1.0..=1.0), e))
                .collect(),
        }
    }
}

/// Points per variable of the sign-pattern grid on `[-2, 2]`.
pub const GRID_POINTS: usize = 41;

/// Distinct strict sign patterns observed on the grid. Points where some
/// polynomial vanishes are skipped. The grid can only miss patterns, so the
/// result is a lower bound on the number of consistent sign assignments.
pub fn grid_sign_patterns(polys: &[Polynomial], vars: usize) -> usize {
    let step = 4.0 / (GRID_POINTS - 1) as f64;
    let total = GRID_POINTS.pow(vars as u32);
    let mut seen = BTreeSet::new();
    let mut x = vec![0.0; vars];
    for idx in 0..total {
        let mut rest = idx;
        for xi in x.iter_mut() {
            *xi = -2.0 + step * (rest % GRID_POINTS) as f64;
            rest /= GRID_POINTS;
        }
        let values: Vec<f64> = polys.iter().map(|p| p.eval(&x)).collect();
        if values.contains(&0.0) {
            continue;
        }
        seen.insert(values.iter().map(|&v| v > 0.0).collect::<Vec<bool>>());
    }
    seen.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountingParams {
    pub n: u64,
    pub size: u64,
    pub d: u64,
    /// Input wires, at most `d·size`.
    pub n_wires: u64,
}

impl CountingParams {
    pub fn new(n: u64, size: u64, d: u64) -> Result<Self> {
        Self::with_wires(n, size, d, d * size)
    }

    pub fn with_wires(n: u64, size: u64, d: u64, n_wires: u64) -> Result<Self> {
        if size == 0 || d == 0 {
            return Err(Error::InvalidArgument("size and d must be positive".into()));
        }
        if n > size {
            return Err(Error::InvalidArgument(format!(
                "n = {n} exceeds the circuit size N = {size}"
            )));
        }
        if n_wires > d * size {
            return Err(Error::InvalidArgument(format!(
                "{n_wires} input wires exceed d·N = {}",
                d * size
            )));
        }
        Ok(Self {
            n,
            size,
            d,
            n_wires,
        })
    }

    /// `μ = 2^{2d}·N`, the number of complex gate entries.
    pub fn mu(&self) -> f64 {
        (4f64).powi(self.d as i32) * self.size as f64
    }
}

fn log2_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    (0..k)
        .map(|i| ((n - i) as f64).log2() - ((i + 1) as f64).log2())
        .sum()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EquivClassBound {
    /// `log₂ C(n', d)^N`.
    pub binomial_log2: f64,
    /// `log₂ (dN)^{dN}`.
    pub crude_log2: f64,
}

pub fn equiv_class_bound(p: &CountingParams) -> EquivClassBound {
    let dn = (p.d * p.size) as f64;
    EquivClassBound {
        binomial_log2: p.size as f64 * log2_binomial(p.n_wires, p.d),
        crude_log2: dn * dn.log2(),
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AppendixBound {
    pub mu: f64,
    /// `log₂ (4eN²2^{n+1}/2μ)^{2μ}`: sign assignments within one class.
    pub sign_log2: f64,
    pub classes: EquivClassBound,
    /// Classes (binomial form) times sign assignments.
    pub total_log2: f64,
}

impl AppendixBound {
    pub fn sign_value(&self) -> f64 {
        self.sign_log2.exp2()
    }
}

pub fn appendix_bound(p: &CountingParams) -> AppendixBound {
    let mu = p.mu();
    let nn = p.size as f64;
    let base_log2 = (4.0 * E).log2() + 2.0 * nn.log2() + (p.n + 1) as f64 - (2.0 * mu).log2();
    let sign_log2 = 2.0 * mu * base_log2;
    let classes = equiv_class_bound(p);
    AppendixBound {
        mu,
        sign_log2,
        classes,
        total_log2: sign_log2 + classes.binomial_log2,
    }
}

/// A finite set of named gates standing in for a continuous gate family.
#[derive(Clone, Debug)]
pub struct GateNet {
    pub gates: Vec<(String, ComplexMatrix)>,
}

#[derive(Serialize, Deserialize)]
struct NetRepr {
    gates: Vec<NetGateRepr>,
}

#[derive(Serialize, Deserialize)]
struct NetGateRepr {
    name: String,
    matrix: Vec<[f64; 2]>,
}

impl GateNet {
    pub fn new(gates: Vec<(String, ComplexMatrix)>) -> Result<Self> {
        for (name, m) in &gates {
            log2_exact(m.rows())?;
            if !m.is_unitary(UNITARITY_TOL) {
                return Err(Error::field(
                    format!("gate {name}"),
                    format!("not unitary (deviation {:.3e})", m.unitarity_deviation()),
                ));
            }
        }
        Ok(Self { gates })
    }

    /// `{I, X, H}`.
    pub fn ixh() -> Self {
        Self {
            gates: vec![
                ("I".into(), gates::identity(1)),
                ("X".into(), gates::x()),
                ("H".into(), gates::h()),
            ],
        }
    }

    pub fn max_arity(&self) -> usize {
        self.gates
            .iter()
            .map(|(_, m)| m.rows().trailing_zeros() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        let repr = NetRepr {
            gates: self
                .gates
                .iter()
                .map(|(name, m)| NetGateRepr {
                    name: name.clone(),
                    matrix: encode_matrix(m),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&repr).expect("net serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: NetRepr = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let gates = repr
            .gates
            .into_iter()
            .enumerate()
            .map(|(i, g)| {
                let m = decode_matrix(&g.matrix)
                    .map_err(|e| Error::field(format!("gates[{i}].matrix"), e.to_string()))?;
                Ok((g.name, m))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(gates)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnumerationParams {
    pub n: usize,
    /// Number of gates.
    pub gates: usize,
    pub qubits: usize,
    /// Gate arity bound.
    pub d: usize,
}

pub const MAX_ENUM_VARIABLES: usize = 3;
pub const MAX_ENUM_GATES: usize = 3;
pub const MAX_ENUM_NET: usize = 8;
pub const MAX_ENUM_QUBITS: usize = 6;
/// Cap on `gate sequences × labelings × outputs`.
pub const MAX_ENUM_WORK: usize = 50_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct Enumeration {
    pub circuits: u64,
    pub functions: Vec<String>,
}

impl Enumeration {
    pub fn count(&self) -> usize {
        self.functions.len()
    }
}

/// Ordered target tuples of `k` distinct qubits out of `m`.
fn placements(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..m)
                    .filter(|q| !p.contains(q))
                    .map(|q| {
                        let mut next = p.clone();
                        next.push(q);
                        next
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// Every labeling of `m` wires by `x1..xn` and the two constants in which
/// each variable appears at least once.
fn labelings(n: usize, m: usize) -> Vec<Vec<InputLabel>> {
    let alphabet: Vec<InputLabel> = (1..=n)
        .map(InputLabel::Variable)
        .chain([InputLabel::Constant(false), InputLabel::Constant(true)])
        .collect();
    let mut out: Vec<Vec<InputLabel>> = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|l| {
                alphabet.iter().map(move |a| {
                    let mut next = l.clone();
                    next.push(*a);
                    next
                })
            })
            .collect();
    }
    out.retain(|l| (1..=n).all(|j| l.contains(&InputLabel::Variable(j))));
    out
}

/// Enumerates every circuit with exactly `gates` gates from the net on
/// `qubits` wires, every labeling that uses each variable, and every output
/// wire; returns the Boolean functions some circuit computes.
pub fn enumerate_functions(params: &EnumerationParams, net: &GateNet) -> Result<Enumeration> {
    let EnumerationParams {
        n,
        gates: t,
        qubits: m,
        d,
    } = *params;
    let cap = |what: &str, value: usize, limit: usize| {
        if value > limit {
            Err(Error::CapExceeded {
                what: format!("{what} {value}"),
                limit,
            })
        } else {
            Ok(())
        }
    };
    cap("variable count", n, MAX_ENUM_VARIABLES)?;
    cap("gate count", t, MAX_ENUM_GATES)?;
    cap("net size", net.gates.len(), MAX_ENUM_NET)?;
    cap("qubit count", m, MAX_ENUM_QUBITS)?;
    if m == 0 || m < n {
        return Err(Error::InvalidArgument(format!(
            "{m} wires cannot carry {n} variables"
        )));
    }

    // (net index, targets) choices for a single gate
    let mut choices: Vec<(usize, Vec<usize>)> = Vec::new();
    for (gi, (_, u)) in net.gates.iter().enumerate() {
        let k = u.rows().trailing_zeros() as usize;
        if k > d || k > m {
            continue;
        }
        for p in placements(m, k) {
            choices.push((gi, p));
        }
    }
    let labels = labelings(n, m);
    let sequences = choices.len().checked_pow(t as u32).unwrap_or(usize::MAX);
    let work = sequences.saturating_mul(labels.len()).saturating_mul(m);
    cap("enumeration work", work, MAX_ENUM_WORK)?;

    // basis state index of each labeling under each assignment
    let starts: Vec<Vec<usize>> = labels
        .iter()
        .map(|l| {
            (0..1usize << n)
                .map(|alpha| {
                    l.iter().enumerate().fold(0usize, |acc, (q, lab)| {
                        let bit = match *lab {
                            InputLabel::Constant(b) => b,
                            InputLabel::Variable(j) => (alpha >> (n - j)) & 1 == 1,
                        };
                        acc | (usize::from(bit) << (m - 1 - q))
                    })
                })
                .collect()
        })
        .collect();

    let dim = 1usize << m;
    let found: BTreeSet<Vec<bool>> = (0..sequences)
        .into_par_iter()
        .fold(BTreeSet::new, |mut acc, seq| {
            let mut rest = seq;
            let mut sequence = Vec::with_capacity(t);
            for _ in 0..t {
                sequence.push(&choices[rest % choices.len()]);
                rest /= choices.len();
            }
            // p1[out][basis]: probability that `out` reads 1 from that basis input
            let mut p1 = vec![vec![0.0f64; dim]; m];
            for basis in 0..dim {
                let mut state = StateVector::basis(m, basis);
                for (gi, targets) in &sequence {
                    let g =
                        Gate::new(1, targets.clone(), net.gates[*gi].1.clone()).expect("net gate");
                    state.apply(&g).expect("placement within register");
                }
                for (out, row) in p1.iter_mut().enumerate() {
                    row[basis] = state.split_norms(out).1;
                }
            }
            for start in &starts {
                for row in &p1 {
                    let probs: Vec<f64> = start.iter().map(|&s| row[s]).collect();
                    if let Some(f) = decided_function(n, &probs) {
                        acc.insert(f.bits().to_vec());
                    }
                }
            }
            acc
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let functions = found
        .into_iter()
        .map(|bits| TruthTable::new(n, bits).map(|t| t.bit_string()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Enumeration {
        circuits: (sequences as u64) * (labels.len() as u64) * (m as u64),
        functions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn warren_substitutions() {
        assert!((warren_bound(1, 1, 1).unwrap() - 4.0 * E).abs() < 1e-12);
        let v = warren_bound(3, 2, 2).unwrap();
        assert!((v - (12.0 * E).powi(2)).abs() < 1e-9);
        assert!((v - 1064.02).abs() < 0.01, "{v}");
        assert!(warren_bound(0, 1, 1).is_err());
    }

    #[test]
    fn linear_polynomial_has_two_patterns() {
        let p = Polynomial {
            vars: 1,
            terms: vec![(1.0, vec![1]), (-0.3, vec![0])],
        };
        assert_eq!(grid_sign_patterns(&[p], 1), 2);
    }

    #[test]
    fn random_polynomial_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = Polynomial::random(2, 2, &mut rng);
        assert_eq!(p.terms.len(), 6);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn equivalence_classes() {
        let b = equiv_class_bound(&CountingParams::with_wires(1, 1, 2, 2).unwrap());
        assert_eq!(b.binomial_log2, 0.0);
        let b = equiv_class_bound(&CountingParams::new(1, 3, 2).unwrap());
        assert!((b.binomial_log2.exp2() - 3375.0).abs() < 1e-6);
        assert!((b.crude_log2.exp2() - 46656.0).abs() < 1e-6);
    }

    #[test]
    fn appendix_smallest_case() {
        let a = appendix_bound(&CountingParams::new(1, 1, 1).unwrap());
        assert_eq!(a.mu, 4.0);
        let expected = (2.0 * E).powi(8);
        assert!((a.sign_value() - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn ixh_single_gate() {
        let params = EnumerationParams {
            n: 1,
            gates: 1,
            qubits: 1,
            d: 1,
        };
        let e = enumerate_functions(&params, &GateNet::ixh()).unwrap();
        assert_eq!(e.circuits, 3);
        assert_eq!(e.functions, vec!["01".to_string(), "10".to_string()]);
    }

    #[test]
    fn no_gates_reads_a_wire() {
        let one = EnumerationParams {
            n: 1,
            gates: 0,
            qubits: 1,
            d: 1,
        };
        let e = enumerate_functions(&one, &GateNet::ixh()).unwrap();
        assert_eq!(e.functions, vec!["01".to_string()]);
        let two = EnumerationParams { qubits: 2, ..one };
        let e = enumerate_functions(&two, &GateNet::ixh()).unwrap();
        assert_eq!(e.functions, vec!["00", "01", "11"]);
    }

    #[test]
    fn net_round_trip() {
        let net = GateNet::ixh();
        let back = GateNet::from_json(&net.to_json()).unwrap();
        assert_eq!(back.gates.len(), 3);
        assert_eq!(back.gates[2].1, net.gates[2].1);
        let bad = r#"{"gates":[{"name":"B","matrix":[[1,0],[0,0],[0,0],[2,0]]}]}"#;
        assert!(GateNet::from_json(bad).is_err());
    }

    #[test]
    fn enumeration_caps() {
        let params = EnumerationParams {
            n: 1,
            gates: 4,
            qubits: 1,
            d: 1,
        };
        assert!(matches!(
            enumerate_functions(&params, &GateNet::ixh()),
            Err(Error::CapExceeded { .. })
        ));
    }
}
