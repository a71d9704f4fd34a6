use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Quantum formula toolkit: simulation, formula analysis, path squeezing and
/// subfunction-counting lower bounds.
#[derive(Parser, Debug)]
#[command(name = "qf", version)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Largest register to simulate.
    #[arg(long, global = true, default_value_t = 20,
          value_parser = clap::value_parser!(u8).range(1..=20))]
    max_qubits: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Acceptance probabilities of a circuit for every assignment (or one).
    Simulate {
        #[arg(short, long)]
        circuit: PathBuf,
        /// Bits of x1..xn, x1 first.
        #[arg(short, long)]
        assignment: Option<String>,
    },
    /// Checks whether a circuit computes the function in a truth-table file.
    Evaluate {
        #[arg(short, long)]
        circuit: PathBuf,
        #[arg(short = 'f', long)]
        table: PathBuf,
    },
    /// Validity, formula structure and, for a block, its paths and segments.
    Analyze {
        #[arg(short, long)]
        circuit: PathBuf,
        /// Block variables, e.g. `1,2`.
        #[arg(short, long, value_delimiter = ',')]
        block: Vec<usize>,
    },
    /// Restricts a formula outside a block, squeezes it and verifies the result.
    Squeeze(SqueezeArgs),
    /// Subfunction counts and the lower bound for a function and partition.
    Nechiporuk {
        #[arg(short = 'f', long)]
        table: PathBuf,
        #[arg(short, long)]
        partition: PathBuf,
    },
    /// Element distinctness on ℓ strings.
    Ed {
        #[arg(long)]
        ell: usize,
        /// Write `ed<n>.tt` and `ed<n>.part`.
        #[arg(long)]
        emit: bool,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
    /// Counting bounds.
    Bounds {
        #[command(subcommand)]
        which: BoundsCommand,
    },
    /// Functions computed by every circuit over a finite gate net.
    Enumerate(EnumerateArgs),
    /// Randomized property suites for the tensor and rewrite lemmas.
    VerifyLemmas {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
}

#[derive(Args, Debug)]
struct SqueezeArgs {
    #[arg(short, long)]
    circuit: PathBuf,
    #[arg(short, long, value_delimiter = ',', required = true)]
    block: Vec<usize>,
    /// Values outside the block, e.g. `3=0,4=1`.
    #[arg(long, conflicts_with = "rho_index")]
    rho: Option<String>,
    /// Outside variables in ascending order as the bits of an index.
    #[arg(long)]
    rho_index: Option<usize>,
    /// Where to write the squeezed circuit.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Largest allowed |p(F_ρ) − p(squeezed)|.
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    tol: f64,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(short)]
    n: usize,
    /// Number of gates.
    #[arg(short = 'N')]
    gates: usize,
    /// Gate net file; defaults to {I, X, H}.
    #[arg(long)]
    net: Option<PathBuf>,
    /// Wires; defaults to n.
    #[arg(long)]
    qubits: Option<usize>,
    /// Gate arity bound; defaults to the widest net gate.
    #[arg(short)]
    d: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// (4e·deg·m/t)^t.
    Warren {
        #[arg(short)]
        m: u64,
        #[arg(short)]
        t: u64,
        #[arg(long)]
        deg: u64,
    },
    /// Sign-assignment and equivalence-class counts for size-N circuits.
    Appendix {
        #[arg(short)]
        n: u64,
        #[arg(short = 'N')]
        size: u64,
        #[arg(short)]
        d: u64,
        /// Input wires; defaults to d·N.
        #[arg(long)]
        wires: Option<u64>,
    },
    Enumerate(EnumerateArgs),
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, found {s:?}")),
    }
}

const EXIT_DOMAIN: u8 = 1;
const EXIT_VERIFICATION: u8 = 2;
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            println!("{}", out.render(cli.json));
            if out.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFICATION)
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::json!({ "error": e.to_string() }));
            }
            eprintln!("qf: {e}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}
