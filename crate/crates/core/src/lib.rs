//! Numerical laboratory for the gauge-Higgs subsystem code on an open
//! lattice with rough and smooth boundaries.
//!
//! The crate covers the Pauli and GF(2) algebra behind the code structure,
//! exact state-vector methods for the toric-code and gauge-Higgs
//! Hamiltonians, the dephasing channel and its information measures, the
//! random-bond Ising model that describes the decohered state, and the
//! perturbative stability of a logical coupling.

pub mod channel;
pub mod code;
pub mod error;
pub mod exact;
pub mod gf2;
pub mod lattice;
pub mod pauli;
pub mod rbim;
pub mod seed;
pub mod stability;

pub use code::{build_lghm_code, build_tc_code, gauge_out, verify_code, CodeReport, CodeStructure, Model};
pub use error::{GhError, Result};
pub use lattice::{LatticeGeometry, LghmLayout, LinkClass};
pub use pauli::{centralizer_in_span, Phase, PauliOperator, PauliSpan};
