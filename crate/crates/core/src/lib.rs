//! Quantum formulas: simulation, formula structure, path squeezing and the
//! subfunction-counting lower bound.

pub mod circuit;
pub mod counting;
pub mod error;
pub mod examples;
pub mod format;
pub mod formula;
pub mod generate;
pub mod lemmas;
pub mod linalg;
pub mod nechiporuk;
pub mod rewrite;
pub mod simulator;
pub mod truth_table;

pub use circuit::{Circuit, Gate, InputLabel};
pub use error::{Error, Result};
pub use formula::{computation_graph, is_formula, ComputationGraph};
pub use simulator::{FunctionVerdict, Outcome, Simulator, StateVector};
pub use truth_table::TruthTable;
