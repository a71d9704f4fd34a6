//! Circuit transformations: restriction, the two reordering rules for
//! subcircuits on disjoint qubits, and path squeezing.

mod decompose;
mod restrict;
mod squeeze;

pub use decompose::{decompose_disjoint, postpone, Postponement};
pub use restrict::{restrict, Restriction};
pub use squeeze::{
    build_composite_gate, composite_matrix, composite_matrix_with_order, same_topology,
    squeeze_all, squeeze_path, verify_squeeze, SegmentAction, SegmentReport, SqueezeRecord,
    SqueezeVerification, SqueezedCircuit,
};
