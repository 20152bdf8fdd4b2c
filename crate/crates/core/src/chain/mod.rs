//! Chain parameters, the truncated occupation basis and the Hamiltonian.

mod basis;
mod hamiltonian;
mod spec;

pub use basis::Basis;
pub use hamiltonian::{build_hamiltonian, HamiltonianMatrix};
pub use spec::{
    apply_diagonal_disorder, apply_offdiagonal_disorder, build_abc_chain, build_storage_chain,
    build_trimer, decouple_site, ChainSpec, CouplingScale,
};

/// Protocols inject at most two excitations.
pub const DEFAULT_MAX_EXCITATIONS: usize = 2;
