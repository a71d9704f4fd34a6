//! One pass/fail line per acceptance criterion.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{max_entry_diff, operator_oracle, to_dmatrix};
use qformula::counting::{
    appendix_bound, enumerate_functions, grid_sign_patterns, warren_bound, CountingParams,
    EnumerationParams, GateNet, Polynomial,
};
use qformula::examples::{fanout_circuit, tree_circuit};
use qformula::formula::{computation_graph, unique_path_test, Formula};
use qformula::generate::{corpus, CorpusItem, CorpusParams};
use qformula::lemmas::verify_lemmas;
use qformula::nechiporuk::ed_sigma_check;
use qformula::rewrite::{restrict, same_topology, squeeze_all, verify_squeeze, SqueezedCircuit};
use qformula::{is_formula, Circuit, Simulator, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Line {
    id: usize,
    pass: bool,
    detail: String,
}

fn report(id: usize, pass: bool, detail: String) -> Line {
    println!(
        "criterion {id}: {} | {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    Line { id, pass, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn lemma_suite() -> Line {
    let start = Instant::now();
    let reports = verify_lemmas(7, 1000).expect("lemma suites run");
    let elapsed = start.elapsed();
    let all = reports.iter().all(|r| r.passed() && r.cases == 1000);
    let parts: Vec<String> = reports
        .iter()
        .map(|r| format!("{} max {:.1e} (tol {:.0e})", r.lemma, r.max_error, r.tol))
        .collect();
    report(
        1,
        all && elapsed < Duration::from_secs(60),
        format!("{}; {}", parts.join(", "), secs(elapsed)),
    )
}

struct Squeezed {
    item: usize,
    f_rho: Circuit,
    sq: SqueezedCircuit,
}

fn squeeze_corpus(items: &[CorpusItem], generation: Duration) -> (Vec<Squeezed>, Line) {
    let start = Instant::now();
    let sim = Simulator::default();
    let mut out = Vec::new();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut v_hist: BTreeMap<usize, usize> = BTreeMap::new();
    let mut max_width = 0;
    let mut ranks = (usize::MAX, 0);
    for (i, item) in items.iter().enumerate() {
        let f = &item.formula;
        max_width = max_width.max(f.circuit.num_qubits());
        for rho in &item.restrictions {
            let f_rho = restrict(&f.circuit, rho).expect("restriction");
            let sq = squeeze_all(&f_rho, &f.block).expect("squeeze");
            let v = verify_squeeze(&sim, &f_rho, &sq, &f.block).expect("verification");
            worst = worst.max(v.max_deviation);
            ok &= v.max_deviation <= 1e-9
                && v.verdicts_match
                && v.ranks.iter().all(|&d| (1..=16).contains(&d));
            for &d in &v.ranks {
                ranks = (ranks.0.min(d), ranks.1.max(d));
            }
            for seg in sq.segments.iter().filter(|s| s.len >= 3) {
                *v_hist.entry(seg.v).or_default() += 1;
            }
            out.push(Squeezed { item: i, f_rho, sq });
        }
    }
    let elapsed = start.elapsed() + generation;
    let shape = items.len() >= 100 && max_width <= 12 && v_hist.keys().all(|&v| v <= 4);
    let line = report(
        2,
        ok && shape && elapsed < Duration::from_secs(300),
        format!(
            "{} formulas, widths ≤ {max_width}, v histogram {v_hist:?}, ranks {}..={}, worst |Δp| {worst:.2e}; {}",
            items.len(),
            ranks.0,
            ranks.1,
            secs(elapsed)
        ),
    );
    (out, line)
}

fn squeeze_size(squeezed: &[Squeezed]) -> Line {
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    let mut pairs = 0;
    for s in squeezed {
        ok &= s.sq.gate_count() <= s.sq.size_bound();
        worst_ratio = worst_ratio.max(s.sq.gate_count() as f64 / s.sq.size_bound() as f64);
    }
    for w in squeezed.windows(2) {
        if w[0].item == w[1].item {
            ok &= same_topology(&w[0].sq.circuit, &w[1].sq.circuit);
            pairs += 1;
        }
    }
    report(
        3,
        ok && pairs > 0,
        format!(
            "gate count ≤ 4s+1 on {} circuits (max ratio {worst_ratio:.2}), identical topology on {pairs} restriction pairs",
            squeezed.len()
        ),
    )
}

fn formula_detection(items: &[CorpusItem], squeezed: &[Squeezed]) -> Line {
    let top = is_formula(&fanout_circuit());
    let bottom = is_formula(&tree_circuit());
    let mut agree = 0;
    let mut ok = true;
    let circuits = items
        .iter()
        .map(|i| &i.formula.circuit)
        .chain(squeezed.iter().map(|s| &s.f_rho));
    for c in circuits {
        let tree = computation_graph(c).is_tree();
        ok &= tree == unique_path_test(c) && tree && Formula::new(c).is_ok();
        agree += 1;
    }
    report(
        4,
        !top && bottom && ok,
        format!(
            "top formula={top}, bottom formula={bottom}; tree and unique-path tests agree on {agree} circuits"
        ),
    )
}

fn element_distinctness() -> Line {
    let two = ed_sigma_check(2).expect("ED ℓ=2");
    let start = Instant::now();
    let three = ed_sigma_check(3).expect("ED ℓ=3");
    let elapsed = start.elapsed();
    let pass = two.sigmas == vec![4, 4]
        && two.total == 4.0
        && two.meets_lower_bound
        && three.n == 12
        && three.sigmas.iter().all(|&s| s >= 36)
        && three.symmetric
        && elapsed < Duration::from_secs(10);
    report(
        5,
        pass,
        format!(
            "ℓ=2 σ={:?} total {}; ℓ=3 σ={:?} (≥ {}) symmetric={} total {:.3}; {}",
            two.sigmas,
            two.total,
            three.sigmas,
            three.lower_bound,
            three.symmetric,
            three.total,
            secs(elapsed)
        ),
    )
}

fn counting() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut systems = 0;
    let mut dominated = true;
    for deg in 1..=2u32 {
        for t in 1..=2usize {
            for m in 1..=3usize {
                for _ in 0..5 {
                    let polys: Vec<Polynomial> = (0..m)
                        .map(|_| Polynomial::random(t, deg, &mut rng))
                        .collect();
                    let count = grid_sign_patterns(&polys, t) as f64;
                    dominated &=
                        count <= warren_bound(m as u64, t as u64, u64::from(deg)).expect("bound");
                    systems += 1;
                }
            }
        }
    }

    let net = GateNet::ixh();
    let base = enumerate_functions(
        &EnumerationParams {
            n: 1,
            gates: 1,
            qubits: 1,
            d: 1,
        },
        &net,
    )
    .expect("enumeration");
    let mut within = true;
    let mut runs = 0;
    for n in 1..=2usize {
        for gates in n..=3usize {
            for qubits in n..=n + 1 {
                let e = enumerate_functions(
                    &EnumerationParams {
                        n,
                        gates,
                        qubits,
                        d: 1,
                    },
                    &net,
                )
                .expect("enumeration");
                let b = appendix_bound(&CountingParams::new(n as u64, gates as u64, 1).unwrap());
                within &= (e.count() as f64).log2() <= b.total_log2;
                runs += 1;
            }
        }
    }

    let smallest = appendix_bound(&CountingParams::new(1, 1, 1).unwrap()).sign_value();
    let expected = (2.0 * E).powi(8);
    let rel = (smallest - expected).abs() / expected;
    report(
        6,
        systems >= 50 && dominated && base.count() == 2 && within && rel <= 1e-6,
        format!(
            "Warren dominates {systems} systems; n=1 N=1 {{I,X,H}} → {:?}; {runs} enumerations within the appendix bound; (2e)^8 = {smallest:.2} (rel err {rel:.1e})",
            base.functions
        ),
    )
}

fn simulator_oracle(items: &[CorpusItem], squeezed: &[Squeezed]) -> Line {
    let sim = Simulator::default();
    let mut small: Vec<&Circuit> = items
        .iter()
        .map(|i| &i.formula.circuit)
        .chain(squeezed.iter().flat_map(|s| [&s.f_rho, &s.sq.circuit]))
        .filter(|c| c.num_qubits() <= 4)
        .collect();
    let extra = [fanout_circuit(), tree_circuit()];
    small.extend(extra.iter());
    let mut worst: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for c in &small {
        let op = to_dmatrix(&sim.operator(c).expect("operator"));
        worst = worst.max(max_entry_diff(&op, &operator_oracle(c)));
        for basis in 0..1usize << c.num_qubits() {
            let mut state = StateVector::basis(c.num_qubits(), basis);
            for g in c.gates() {
                state.apply(g).expect("gate");
                drift = drift.max((state.norm() - 1.0).abs());
            }
        }
    }
    report(
        7,
        !small.is_empty() && worst <= 1e-10 && drift <= 1e-10,
        format!(
            "{} circuits of ≤ 4 qubits, max entry diff {worst:.1e}, norm drift {drift:.1e}",
            small.len()
        ),
    )
}

fn main() -> ExitCode {
    let lemmas = lemma_suite();
    let start = Instant::now();
    let items = corpus(&CorpusParams::default()).expect("corpus");
    let (squeezed, line) = squeeze_corpus(&items, start.elapsed());
    let mut lines = vec![lemmas];
    lines.push(line);
    lines.push(squeeze_size(&squeezed));
    lines.push(formula_detection(&items, &squeezed));
    lines.push(element_distinctness());
    lines.push(counting());
    lines.push(simulator_oracle(&items, &squeezed));
    let failed: Vec<usize> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", lines.len());
        ExitCode::SUCCESS
    } else {
        for l in lines.iter().filter(|l| !l.pass) {
            eprintln!("criterion {} failed: {}", l.id, l.detail);
        }
        ExitCode::FAILURE
    }
}
