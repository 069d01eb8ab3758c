//! Exact state-vector engine: Hamiltonians, ground states, the mapping
//! circuit and expectation values.

pub mod circuit;
pub mod dump;
pub mod ground;
pub mod hamiltonian;
pub mod lanczos;
pub mod mapping;
pub mod operator;
pub mod state;

/// Largest register handled as a dense state vector.
pub const MAX_STATE_QUBITS: usize = 26;

pub use circuit::{apply_mapping_to_state, apply_mapping_to_sum, mapping_circuit, Circuit, Direction, Gate};
pub use ground::{ground_state_in_sector, sector_operators, GroundOptions, GroundState, Sector};
pub use hamiltonian::{build_hamiltonian, HamiltonianModel, HamiltonianSpec};
pub use lanczos::{lowest_eigenpair, LanczosOptions};
pub use mapping::{verify_mapping, MappingCheck, MappingReport};
pub use operator::{PauliSum, SparseMatrix};
pub use state::{expectation, StateVector};
