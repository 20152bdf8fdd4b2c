use std::sync::Arc;

use nalgebra::DMatrix;

use super::{Basis, ChainSpec};
use crate::error::{Error, Result};

/// Dense real-symmetric Hamiltonian over a truncated occupation basis.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    basis: Arc<Basis>,
    matrix: DMatrix<f64>,
}

impl HamiltonianMatrix {
    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Sub-matrix of the sector with exactly `k` excitations.
    pub fn block(&self, k: usize) -> DMatrix<f64> {
        let r = self.basis.block(k);
        self.matrix
            .view((r.start, r.start), (r.len(), r.len()))
            .into_owned()
    }
}

/// Hopping Hamiltonian `Σ ε_i n_i + Σ J_i (σ⁺_i σ⁻_{i+1} + h.c.)` in `basis`.
pub fn build_hamiltonian(spec: &ChainSpec, basis: &Arc<Basis>) -> Result<HamiltonianMatrix> {
    if basis.n_sites() != spec.n_sites() {
        return Err(Error::BasisMismatch(format!(
            "basis has {} sites, chain has {}",
            basis.n_sites(),
            spec.n_sites()
        )));
    }
    let dim = basis.len();
    let mut matrix = DMatrix::zeros(dim, dim);
    for (a, &pattern) in basis.states().iter().enumerate() {
        matrix[(a, a)] = spec
            .onsite()
            .iter()
            .enumerate()
            .filter(|(i, _)| pattern & (1 << i) != 0)
            .map(|(_, e)| e)
            .sum();
        for (i, &j) in spec.couplings().iter().enumerate() {
            let pair = 0b11u64 << i;
            if (pattern & pair).count_ones() == 1 {
                let b = basis
                    .index_of(pattern ^ pair)
                    .expect("hopping conserves excitation count");
                matrix[(a, b)] = j;
            }
        }
    }
    Ok(HamiltonianMatrix {
        basis: Arc::clone(basis),
        matrix,
    })
}
