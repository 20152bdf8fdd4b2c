//! Exact-diagonalization simulator for entanglement generation and storage
//! in dimerized spin chains with three topological defects.
//!
//! The crate is organized bottom-up:
//!
//! * [`chain`]: chain parameters, basis, Hamiltonian and static disorder
//! * [`dynamics`]: eigendecomposition, state preparation, propagation,
//!   injection and sudden quenches
//! * [`entanglement`]: reduced density matrices, concurrence, EoF, fidelity
//! * [`analytic`]: closed-form three-site model used as an oracle
//! * [`disorder`]: seeded Monte Carlo over disorder realizations
//! * [`protocols`]: entangling, asynchronous-injection and storage runs
//! * [`output`]: CSV encodings of the results

pub mod analytic;
pub mod chain;
pub mod disorder;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod output;
pub mod protocols;
pub mod rng;
pub mod stats;

pub use chain::{Basis, ChainSpec, CouplingScale, HamiltonianMatrix};
pub use dynamics::{BranchEnsemble, EigenDecomposition, InitialStateSpec, PureState, QuantumState};
pub use entanglement::TwoQubitDensity;
pub use error::{Error, Result};
