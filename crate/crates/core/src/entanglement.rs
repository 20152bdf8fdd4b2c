//! Two-site reduced density matrices, concurrence and entanglement of formation.

use std::sync::Arc;

use nalgebra::{DMatrix, Matrix4, Vector4};

use crate::chain::Basis;
use crate::dynamics::{PureState, QuantumState, C64};
use crate::error::{Error, Result};

const DENSITY_TOL: f64 = 1e-10;
/// Pivots of the Cholesky factor below this are treated as round-off.
const PIVOT_FLOOR: f64 = 1e-15;

/// `σ_y ⊗ σ_y` in the `{|00⟩, |01⟩, |10⟩, |11⟩}` basis; real.
fn spin_flip() -> Matrix4<C64> {
    let o = C64::new(0.0, 0.0);
    let p = C64::new(1.0, 0.0);
    Matrix4::new(o, o, o, -p, o, o, p, o, o, p, o, o, -p, o, o, o)
}

/// Density matrix of two qubits over `{|00⟩, |01⟩, |10⟩, |11⟩}`, first
/// qubit being the lower site index.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensity {
    matrix: Matrix4<C64>,
}

impl TwoQubitDensity {
    /// Validates hermiticity, unit trace and positivity to 1e-10.
    pub fn new(matrix: Matrix4<C64>) -> Result<Self> {
        let herm = (matrix - matrix.adjoint()).camax();
        if herm > DENSITY_TOL {
            return Err(Error::Domain(format!(
                "density matrix not Hermitian ({herm:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(Error::Domain(format!(
                "density matrix trace {trace} differs from 1"
            )));
        }
        let hermitian = (matrix + matrix.adjoint()).scale(0.5);
        let min_eig = hermitian.symmetric_eigenvalues().min();
        if min_eig < -DENSITY_TOL {
            return Err(Error::Domain(format!(
                "density matrix has eigenvalue {min_eig:e}"
            )));
        }
        Ok(TwoQubitDensity { matrix: hermitian })
    }

    /// `|v⟩⟨v|` for a normalized two-qubit vector.
    pub fn from_pure(v: Vector4<C64>) -> Result<Self> {
        Self::new(v * v.adjoint())
    }

    /// Gram sums from a reduction are PSD by construction.
    pub(crate) fn from_gram(matrix: Matrix4<C64>) -> Self {
        TwoQubitDensity {
            matrix: (matrix + matrix.adjoint()).scale(0.5),
        }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.matrix
    }

    /// Wootters λ's, descending: the square roots of the spectrum of `ρρ̃`.
    ///
    /// With `ρ = LL†`, these are the singular values of `Lᵀ(σ_y⊗σ_y)L`, the
    /// factored form of `√ρ ρ̃ √ρ`.
    pub fn wootters_values(&self) -> [f64; 4] {
        let factor = pivoted_cholesky(&self.matrix);
        let mut out = [0.0; 4];
        if factor.ncols() == 0 {
            return out;
        }
        let flip = DMatrix::from_iterator(4, 4, spin_flip().iter().copied());
        let t = factor.transpose() * flip * &factor;
        let mut sv: Vec<f64> = t.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        for (o, s) in out.iter_mut().zip(sv) {
            *o = s.max(0.0);
        }
        out
    }
}

/// Lower factor `L` (4 × rank) with `LLᵀ* = m`, dropping pivots below [`PIVOT_FLOOR`].
fn pivoted_cholesky(m: &Matrix4<C64>) -> DMatrix<C64> {
    let mut a = *m;
    let mut cols: Vec<Vector4<C64>> = Vec::with_capacity(4);
    let mut remaining: Vec<usize> = (0..4).collect();
    while !remaining.is_empty() {
        let (pos, &p) = remaining
            .iter()
            .enumerate()
            .max_by(|x, y| a[(*x.1, *x.1)].re.total_cmp(&a[(*y.1, *y.1)].re))
            .expect("non-empty");
        let d = a[(p, p)].re;
        if d <= PIVOT_FLOOR {
            break;
        }
        let s = d.sqrt();
        let mut col = Vector4::zeros();
        for &i in &remaining {
            col[i] = a[(i, p)] / s;
        }
        for &i in &remaining {
            for &j in &remaining {
                a[(i, j)] -= col[i] * col[j].conj();
            }
        }
        remaining.remove(pos);
        cols.push(col);
    }
    DMatrix::from_fn(4, cols.len(), |i, j| cols[j][i])
}

/// Partial trace onto a fixed site pair, precomputed for a basis.
///
/// Basis states are grouped by the configuration of the traced-out sites;
/// every group contributes one (unnormalized) vector to the Gram sum.
#[derive(Debug, Clone)]
pub struct PairReducer {
    basis: Arc<Basis>,
    sites: (usize, usize),
    groups: Vec<[Option<usize>; 4]>,
}

impl PairReducer {
    pub fn new(basis: &Arc<Basis>, site1: usize, site2: usize) -> Result<Self> {
        basis.check_site(site1)?;
        basis.check_site(site2)?;
        if site1 == site2 {
            return Err(Error::param(
                "site2",
                format!("pair sites coincide ({site1})"),
            ));
        }
        let (lo, hi) = (site1.min(site2), site1.max(site2));
        let (lo_bit, hi_bit) = (1u64 << lo, 1u64 << hi);
        let mut rest_index = std::collections::HashMap::new();
        let mut groups: Vec<[Option<usize>; 4]> = Vec::new();
        for (i, &pattern) in basis.states().iter().enumerate() {
            let rest = pattern & !(lo_bit | hi_bit);
            let slot = 2 * usize::from(pattern & lo_bit != 0) + usize::from(pattern & hi_bit != 0);
            let g = *rest_index.entry(rest).or_insert_with(|| {
                groups.push([None; 4]);
                groups.len() - 1
            });
            groups[g][slot] = Some(i);
        }
        Ok(PairReducer {
            basis: Arc::clone(basis),
            sites: (lo, hi),
            groups,
        })
    }

    pub fn sites(&self) -> (usize, usize) {
        self.sites
    }

    pub fn reduce<S: QuantumState>(&self, state: &S) -> Result<TwoQubitDensity> {
        let basis = state.basis();
        if !(Arc::ptr_eq(basis, &self.basis) || **basis == *self.basis) {
            return Err(Error::BasisMismatch(
                "reducer built for another basis".into(),
            ));
        }
        let mut rho = Matrix4::<C64>::zeros();
        for (w, branch) in state.weighted_branches() {
            let amps = branch.amplitudes();
            for group in &self.groups {
                let v = Vector4::from_fn(|k, _| group[k].map_or(C64::new(0.0, 0.0), |i| amps[i]));
                rho += (v * v.adjoint()).scale(w);
            }
        }
        Ok(TwoQubitDensity::from_gram(rho))
    }
}

/// Reduced density matrix of `(site1, site2)`, all other sites traced out.
pub fn reduce_to_two_sites<S: QuantumState>(
    state: &S,
    site1: usize,
    site2: usize,
) -> Result<TwoQubitDensity> {
    PairReducer::new(state.basis(), site1, site2)?.reduce(state)
}

/// Wootters concurrence `max(λ₁ − λ₂ − λ₃ − λ₄, 0)`.
pub fn concurrence(rho: &TwoQubitDensity) -> f64 {
    let l = rho.wootters_values();
    (l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0)
}

/// Binary entropy in bits, continuous at 0 and 1.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Entanglement of formation as a function of the concurrence.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt()))
}

pub fn eof(rho: &TwoQubitDensity) -> f64 {
    eof_from_concurrence(concurrence(rho))
}

/// `|⟨reference|state⟩|²`.
pub fn fidelity(reference: &PureState, state: &PureState) -> Result<f64> {
    Ok(reference.inner(state)?.norm_sqr().clamp(0.0, 1.0))
}
