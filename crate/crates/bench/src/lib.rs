//! Shared fixtures for the criterion benchmarks.

use solitonchain_core::chain::{build_abc_chain, build_storage_chain};
use solitonchain_core::{ChainSpec, CouplingScale};

pub fn abc_chain() -> ChainSpec {
    build_abc_chain(0, CouplingScale::standard()).expect("standard chain")
}

pub fn storage_chain() -> ChainSpec {
    build_storage_chain(CouplingScale::standard()).expect("standard chain")
}
