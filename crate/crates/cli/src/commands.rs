use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use qformula::counting::{
    appendix_bound, enumerate_functions, warren_bound_log2, CountingParams, EnumerationParams,
    GateNet,
};
use qformula::format::{read_circuit, write_circuit};
use qformula::formula::{unique_path_test, Formula, SegmentEnd, SegmentStart};
use qformula::lemmas::verify_lemmas;
use qformula::nechiporuk::{
    ed_function, ed_partition, ed_sigma_check, nechiporuk_bound, Partition,
};
use qformula::rewrite::{restrict, squeeze_all, verify_squeeze, Restriction, SegmentAction};
use qformula::simulator::{ACCEPT, REJECT};
use qformula::{computation_graph, Circuit, Error, FunctionVerdict, Result, Simulator, TruthTable};
use serde_json::{json, Value};

use crate::{BoundsCommand, Cli, Command, EnumerateArgs, SqueezeArgs};

pub struct Output {
    pub text: String,
    pub json: Value,
    /// False when a check the command performs did not hold.
    pub verified: bool,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Self {
            text,
            json,
            verified: true,
        }
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            serde_json::to_string_pretty(&self.json).expect("report serializes")
        } else {
            self.text.trim_end().to_string()
        }
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    let sim = Simulator::with_max_qubits(usize::from(cli.max_qubits));
    match &cli.command {
        Command::Simulate {
            circuit,
            assignment,
        } => simulate(&sim, &load(circuit)?, assignment.as_deref()),
        Command::Evaluate { circuit, table } => {
            evaluate(&sim, &load(circuit)?, &TruthTable::read(table)?)
        }
        Command::Analyze { circuit, block } => analyze(&load(circuit)?, block),
        Command::Squeeze(args) => squeeze(&sim, args),
        Command::Nechiporuk { table, partition } => {
            let f = TruthTable::read(table)?;
            let p = Partition::read(f.n(), partition)?;
            nechiporuk(&f, &p)
        }
        Command::Ed { ell, emit, dir } => ed(*ell, emit.then_some(dir.as_path())),
        Command::Bounds { which } => match which {
            BoundsCommand::Warren { m, t, deg } => warren(*m, *t, *deg),
            BoundsCommand::Appendix { n, size, d, wires } => appendix(*n, *size, *d, *wires),
            BoundsCommand::Enumerate(args) => enumerate(args),
        },
        Command::Enumerate(args) => enumerate(args),
        Command::VerifyLemmas { seed, cases } => lemmas(*seed, *cases),
    }
}

fn load(path: &std::path::Path) -> Result<Circuit> {
    let c = read_circuit(path)?;
    c.ensure_valid()?;
    Ok(c)
}

fn class(p: f64) -> &'static str {
    if p > ACCEPT {
        "accept"
    } else if p < REJECT {
        "reject"
    } else {
        "undetermined"
    }
}

fn bits(alpha: usize, n: usize) -> String {
    (0..n)
        .map(|i| {
            if (alpha >> (n - 1 - i)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

fn simulate(sim: &Simulator, c: &Circuit, assignment: Option<&str>) -> Result<Output> {
    let n = c.num_variables();
    if let Some(a) = assignment {
        let values = a
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::field(
                    "assignment",
                    format!("unexpected character {other:?}"),
                )),
            })
            .collect::<Result<Vec<bool>>>()?;
        let (state, outcome) = sim.run(c, &values)?;
        let text = format!(
            "assignment {a}: p = {:.12} ({})\n‖A0‖² = {:.12}, ‖A1‖² = {:.12}, norm {:.12}",
            outcome.p1,
            class(outcome.p1),
            outcome.norm_a0_sqr,
            outcome.norm_a1_sqr,
            state.norm()
        );
        let json = json!({
            "assignment": a,
            "p": outcome.p1,
            "class": class(outcome.p1),
            "norm_a0_sqr": outcome.norm_a0_sqr,
            "norm_a1_sqr": outcome.norm_a1_sqr,
        });
        return Ok(Output::ok(text, json));
    }
    let probs = sim.probabilities(c)?;
    let mut text = format!(
        "{} qubits, {} gates, output qubit {}\n",
        c.num_qubits(),
        c.gates().len(),
        c.output_qubit()
    );
    let rows: Vec<Value> = probs
        .iter()
        .enumerate()
        .map(|(alpha, &p)| {
            let _ = writeln!(text, "{}  p = {p:.12}  {}", bits(alpha, n), class(p));
            json!({ "assignment": bits(alpha, n), "p": p, "class": class(p) })
        })
        .collect();
    Ok(Output::ok(
        text,
        json!({ "num_variables": n, "rows": rows }),
    ))
}

fn evaluate(sim: &Simulator, c: &Circuit, f: &TruthTable) -> Result<Output> {
    let verdict = sim.evaluate(c, f)?;
    let text = match verdict {
        FunctionVerdict::Computes => format!("computes {}", f.bit_string()),
        FunctionVerdict::FailsAt { alpha, p } => {
            format!(
                "fails at {}: p = {p:.12}, f = {}",
                bits(alpha, f.n()),
                u8::from(f.get(alpha))
            )
        }
        FunctionVerdict::UndeterminedAt { alpha, p } => {
            format!("undetermined at {}: p = {p:.12}", bits(alpha, f.n()))
        }
    };
    Ok(Output {
        text,
        json: serde_json::to_value(verdict).expect("verdict serializes"),
        verified: verdict == FunctionVerdict::Computes,
    })
}

fn start_name(s: SegmentStart) -> String {
    match s {
        SegmentStart::Wire(q) => format!("wire {q}"),
        SegmentStart::Gate(g) => format!("step {}", g + 1),
    }
}

fn end_name(e: SegmentEnd) -> String {
    match e {
        SegmentEnd::Gate(g) => format!("step {}", g + 1),
        SegmentEnd::Output => "output".into(),
    }
}

fn analyze(c: &Circuit, block: &[usize]) -> Result<Output> {
    let graph = computation_graph(c);
    let tree = graph.is_tree();
    let unique = unique_path_test(c);
    let outside: Vec<usize> = (0..c.gates().len())
        .filter(|g| !graph.contains(*g))
        .map(|g| g + 1)
        .collect();
    let mut text = format!(
        "{} qubits, {} gates, output qubit {}\n{}\ncomputation graph: {} gates, {} edges; gates outside it: {:?}\n",
        c.num_qubits(),
        c.gates().len(),
        c.output_qubit(),
        if tree { "formula" } else { "not a formula" },
        graph.nodes.len(),
        graph.edges.len(),
        outside
    );
    let mut json = json!({
        "num_qubits": c.num_qubits(),
        "gates": c.gates().len(),
        "formula": tree,
        "unique_path_test": unique,
        "graph_gates": graph.nodes.len(),
        "graph_edges": graph.edges.len(),
        "outside_graph": outside,
    });
    if block.is_empty() {
        return Ok(Output::ok(text, json));
    }
    let formula = Formula::new(c)?;
    let block: BTreeSet<usize> = block.iter().copied().collect();
    let ps = formula.path_sets(&block);
    let merges: Vec<usize> = formula
        .intersection_gates(&ps)
        .iter()
        .map(|g| g + 1)
        .collect();
    let _ = writeln!(
        text,
        "block {block:?}: s = {}, merge steps {merges:?}",
        ps.s()
    );
    let mut segments = Vec::new();
    for (i, seg) in formula.segments(&ps).iter().enumerate() {
        let companions = if seg.len() > 2 {
            match formula.companion_set(&ps, seg, i) {
                Ok(comp) => json!({ "q_pi": comp.q_pi, "v": comp.q_pi.len() }),
                Err(e) => json!({ "error": e.to_string() }),
            }
        } else {
            Value::Null
        };
        let _ = writeln!(
            text,
            "segment {i}: {} → {}, m = {}, entries {:?}, exit {}{}",
            start_name(seg.start),
            end_name(seg.end),
            seg.len(),
            seg.entries,
            seg.exit,
            match &companions {
                Value::Null => String::new(),
                v if v.get("error").is_some() => format!(", {}", v["error"].as_str().unwrap()),
                v => format!(", Q_π = {}", v["q_pi"]),
            }
        );
        segments.push(json!({
            "index": i,
            "start": start_name(seg.start),
            "end": end_name(seg.end),
            "m": seg.len(),
            "entries": seg.entries,
            "exit": seg.exit,
            "companions": companions,
        }));
    }
    json["block"] = json!({
        "variables": block,
        "s": ps.s(),
        "merge_steps": merges,
        "segments": segments,
    });
    Ok(Output::ok(text, json))
}

fn parse_rho(text: &str) -> Result<BTreeMap<usize, bool>> {
    let mut values = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || Error::field("rho", format!("expected `j=0` or `j=1`, found {part:?}"));
        let (var, value) = part.split_once('=').ok_or_else(bad)?;
        let var: usize = var
            .trim()
            .trim_start_matches('x')
            .parse()
            .map_err(|_| bad())?;
        let value = match value.trim() {
            "0" => false,
            "1" => true,
            _ => return Err(bad()),
        };
        values.insert(var, value);
    }
    Ok(values)
}

fn squeeze(sim: &Simulator, args: &SqueezeArgs) -> Result<Output> {
    let c = load(&args.circuit)?;
    let block: BTreeSet<usize> = args.block.iter().copied().collect();
    let rho = match (&args.rho, args.rho_index) {
        (Some(text), _) => Restriction::new(block.clone(), parse_rho(text)?),
        (None, Some(index)) => {
            let outside =
                c.num_variables() - block.iter().filter(|&&j| j <= c.num_variables()).count();
            if index >= 1usize << outside {
                return Err(Error::field(
                    "rho-index",
                    format!("{index} needs more than {outside} bits"),
                ));
            }
            Restriction::from_index(c.num_variables(), &block, index)
        }
        (None, None) => Restriction::new(block.clone(), BTreeMap::new()),
    };
    let f_rho = restrict(&c, &rho)?;
    let sq = squeeze_all(&f_rho, &block)?;
    let v = verify_squeeze(sim, &f_rho, &sq, &block)?;
    let passed = v.passes(args.tol);
    if let Some(path) = &args.output {
        write_circuit(&sq.circuit, path)?;
    }

    let mut text = format!(
        "{} → {} qubits, {} → {} gates (bound 4s+1 = {}), s = {}\n",
        f_rho.num_qubits(),
        sq.circuit.num_qubits(),
        f_rho.gates().len(),
        sq.gate_count(),
        sq.size_bound(),
        sq.s
    );
    if sq.unchanged {
        text.push_str("no segment to squeeze; circuit unchanged\n");
    }
    if !sq.dropped.is_empty() {
        let _ = writeln!(
            text,
            "dropped gates outside the computation graph: {:?}",
            sq.dropped
        );
    }
    for seg in &sq.segments {
        let action = match seg.action {
            SegmentAction::Kept => "kept".to_string(),
            SegmentAction::Fused => format!("fused into step {}", seg.new_step.unwrap_or(0)),
            SegmentAction::Squeezed => format!(
                "squeezed into step {}, v = {}, rank {}{}",
                seg.new_step.unwrap_or(0),
                seg.v,
                seg.rank.unwrap_or(0),
                if seg.borderline_rank {
                    " (borderline)"
                } else {
                    ""
                }
            ),
        };
        let _ = writeln!(
            text,
            "segment {}: {} → {}, m = {}: {action}",
            seg.index,
            start_name(seg.start),
            end_name(seg.end),
            seg.len
        );
    }
    if sq.exceeds_arity_bound {
        let _ = writeln!(
            text,
            "composite gates widen the arity bound to {}",
            sq.circuit.arity_bound()
        );
    }
    let _ = writeln!(
        text,
        "max |Δp| = {:.3e} over {} assignments, verdicts {}, unitarity deviation {:.1e}: {}",
        v.max_deviation,
        v.original.len(),
        if v.verdicts_match { "match" } else { "differ" },
        v.max_unitarity_deviation,
        if passed {
            "verified"
        } else {
            "VERIFICATION FAILED"
        }
    );
    let json = json!({
        "verified": passed,
        "tol": args.tol,
        "restriction": rho.values,
        "s": sq.s,
        "gate_count": sq.gate_count(),
        "size_bound": sq.size_bound(),
        "num_qubits": sq.circuit.num_qubits(),
        "unchanged": sq.unchanged,
        "dropped": sq.dropped,
        "exceeds_arity_bound": sq.exceeds_arity_bound,
        "segments": sq.segments,
        "verification": v,
    });
    Ok(Output {
        text,
        json,
        verified: passed,
    })
}

fn nechiporuk(f: &TruthTable, p: &Partition) -> Result<Output> {
    let report = nechiporuk_bound(f, p)?;
    let mut text = String::new();
    for b in &report.blocks {
        let _ = writeln!(
            text,
            "block {} ({} vars): σ = {}, term {:.6}",
            b.block, b.size, b.sigma, b.term
        );
    }
    let _ = writeln!(text, "total bound {:.6}", report.total);
    Ok(Output::ok(
        text,
        serde_json::to_value(&report).expect("report serializes"),
    ))
}

fn ed(ell: usize, emit: Option<&std::path::Path>) -> Result<Output> {
    let report = ed_sigma_check(ell)?;
    let mut text = format!(
        "ED with ℓ = {ell}: n = {}, σ = {:?}, C(ℓ², ℓ−1) = {}, symmetric {}, total bound {:.6}\n",
        report.n, report.sigmas, report.lower_bound, report.symmetric, report.total
    );
    let mut json = serde_json::to_value(&report).expect("report serializes");
    if let Some(dir) = emit {
        let table = dir.join(format!("ed{}.tt", report.n));
        let part = dir.join(format!("ed{}.part", report.n));
        ed_function(ell)?.write(&table)?;
        ed_partition(ell)?.write(&part)?;
        let _ = writeln!(text, "wrote {} and {}", table.display(), part.display());
        json["files"] = json!([table, part]);
    }
    Ok(Output {
        text,
        json,
        verified: report.meets_lower_bound && report.symmetric,
    })
}

fn warren(m: u64, t: u64, deg: u64) -> Result<Output> {
    let log2 = warren_bound_log2(m, t, deg)?;
    let value = log2.exp2();
    Ok(Output::ok(
        format!("(4e·{deg}·{m}/{t})^{t} = {value:.6} ({log2:.6} bits)"),
        json!({ "m": m, "t": t, "deg": deg, "value": value, "log2": log2 }),
    ))
}

fn appendix(n: u64, size: u64, d: u64, wires: Option<u64>) -> Result<Output> {
    let p = match wires {
        Some(w) => CountingParams::with_wires(n, size, d, w)?,
        None => CountingParams::new(n, size, d)?,
    };
    let a = appendix_bound(&p);
    let value = if a.sign_log2 < 1000.0 {
        format!(" = {:.6e}", a.sign_value())
    } else {
        String::new()
    };
    let text = format!(
        "μ = {}\nsign assignments: {:.6} bits{value}\nclasses C(n',d)^N: {:.6} bits, (dN)^(dN): {:.6} bits\ntotal: {:.6} bits",
        a.mu, a.sign_log2, a.classes.binomial_log2, a.classes.crude_log2, a.total_log2
    );
    let json = json!({ "params": p, "bound": a });
    Ok(Output::ok(text, json))
}

fn enumerate(args: &EnumerateArgs) -> Result<Output> {
    let net = match &args.net {
        Some(path) => GateNet::read(path)?,
        None => GateNet::ixh(),
    };
    let params = EnumerationParams {
        n: args.n,
        gates: args.gates,
        qubits: args.qubits.unwrap_or(args.n),
        d: args.d.unwrap_or_else(|| net.max_arity()),
    };
    let e = enumerate_functions(&params, &net)?;
    let names: Vec<&str> = net.gates.iter().map(|(name, _)| name.as_str()).collect();
    let text = format!(
        "n = {}, N = {}, {} qubits, net {:?}: {} circuits, {} functions\n{}",
        params.n,
        params.gates,
        params.qubits,
        names,
        e.circuits,
        e.count(),
        e.functions.join("\n")
    );
    Ok(Output::ok(
        text,
        json!({ "params": params, "net": names, "circuits": e.circuits, "count": e.count(), "functions": e.functions }),
    ))
}

fn lemmas(seed: u64, cases: usize) -> Result<Output> {
    let reports = verify_lemmas(seed, cases)?;
    let mut text = format!("seed {seed}, {cases} cases per suite\n");
    for r in &reports {
        let _ = writeln!(
            text,
            "{:<32} {} failures {}, max error {:.2e} (tol {:.0e})",
            r.lemma,
            if r.passed() { "pass" } else { "FAIL" },
            r.failures,
            r.max_error,
            r.tol
        );
    }
    let verified = reports.iter().all(|r| r.passed());
    Ok(Output {
        text,
        json: json!({ "seed": seed, "cases": cases, "suites": reports, "passed": verified }),
        verified,
    })
}
