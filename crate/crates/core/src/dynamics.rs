//! Exact propagation through the eigendecomposition of the Hamiltonian.
//!
//! The Hamiltonian conserves excitation number, so every sector is
//! diagonalized on its own and the eigenvectors are exactly block-sparse.
//! Evolution is `ψ(t) = V exp(-iΛt) Vᵀ ψ(0)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::chain::{Basis, HamiltonianMatrix};
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

const NORM_TOL: f64 = 1e-10;
/// Branches lighter than this are discarded by the injection channel.
pub const BRANCH_WEIGHT_FLOOR: f64 = 1e-12;

/// Ascending eigenvalues and orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    basis: Arc<Basis>,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Eigenvalues whose eigenvectors live in the `k`-excitation sector.
    pub fn sector_values(&self, k: usize) -> Vec<f64> {
        let range = self.basis.block(k);
        (0..self.values.len())
            .filter(|&j| range.contains(&self.sector_row(j)))
            .map(|j| self.values[j])
            .collect()
    }

    fn sector_row(&self, column: usize) -> usize {
        self.vectors
            .column(column)
            .iter()
            .position(|v| *v != 0.0)
            .unwrap_or(0)
    }

    /// `max |VΛVᵀ - H|`.
    pub fn reconstruction_error(&self, h: &HamiltonianMatrix) -> f64 {
        let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(&self.values));
        let rebuilt = &self.vectors * lambda * self.vectors.transpose();
        (rebuilt - h.matrix()).amax()
    }

    /// `max |VᵀV - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.values.len();
        (self.vectors.transpose() * &self.vectors - DMatrix::identity(n, n)).amax()
    }

    fn to_eigenbasis(&self, amplitudes: &DVector<C64>) -> DVector<C64> {
        let re = self.vectors.tr_mul(&amplitudes.map(|z| z.re));
        let im = self.vectors.tr_mul(&amplitudes.map(|z| z.im));
        re.zip_map(&im, C64::new)
    }

    fn site_amplitudes_at(&self, coeffs: &DVector<C64>, t: f64) -> DVector<C64> {
        let mut re = DVector::zeros(coeffs.len());
        let mut im = DVector::zeros(coeffs.len());
        for (k, (c, &e)) in coeffs.iter().zip(&self.values).enumerate() {
            let z = c * C64::from_polar(1.0, -e * t);
            re[k] = z.re;
            im[k] = z.im;
        }
        let re = &self.vectors * re;
        let im = &self.vectors * im;
        re.zip_map(&im, C64::new)
    }
}

/// Diagonalizes each excitation sector of `h`.
pub fn diagonalize(h: &HamiltonianMatrix) -> Result<EigenDecomposition> {
    let basis = Arc::clone(h.basis());
    let dim = basis.len();
    let mut pairs: Vec<(f64, usize, DVector<f64>)> = Vec::with_capacity(dim);
    for (k, range) in basis.blocks().iter().enumerate() {
        let block = h.block(k);
        if block.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite entry in the {k}-excitation block"
            )));
        }
        let eig = SymmetricEigen::try_new(block, f64::EPSILON, 10_000).ok_or_else(|| {
            Error::Numerical(format!(
                "symmetric eigensolver did not converge on the {k}-excitation block \
                 (dimension {})",
                range.len()
            ))
        })?;
        for (j, &value) in eig.eigenvalues.iter().enumerate() {
            let mut v = DVector::zeros(dim);
            v.rows_mut(range.start, range.len())
                .copy_from(&eig.eigenvectors.column(j));
            pairs.push((value, range.start, v));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let values = pairs.iter().map(|p| p.0).collect();
    let columns: Vec<DVector<f64>> = pairs.into_iter().map(|p| p.2).collect();
    let vectors = DMatrix::from_columns(&columns);
    Ok(EigenDecomposition {
        basis,
        values,
        vectors,
    })
}

fn check_basis(a: &Arc<Basis>, b: &Arc<Basis>, what: &str) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::BasisMismatch(format!(
            "{what}: {} sites / {} excitations vs {} sites / {} excitations",
            a.n_sites(),
            a.max_excitations(),
            b.n_sites(),
            b.max_excitations()
        )))
    }
}

/// Normalized complex amplitude vector over a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    basis: Arc<Basis>,
    amplitudes: DVector<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized to 1e-10.
    pub fn new(basis: Arc<Basis>, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "{} amplitudes for a basis of {} states",
                amplitudes.len(),
                basis.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!("state norm {norm} differs from 1")));
        }
        Ok(PureState { basis, amplitudes })
    }

    /// Normalizes `amplitudes`; fails on the zero vector.
    pub fn normalized(basis: Arc<Basis>, amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain("cannot normalize a zero state".into()));
        }
        Self::new(basis, amplitudes.unscale(norm))
    }

    /// The all-zero (vacuum) configuration.
    pub fn vacuum(basis: Arc<Basis>) -> Self {
        let mut amplitudes = DVector::zeros(basis.len());
        amplitudes[0] = C64::new(1.0, 0.0);
        PureState { basis, amplitudes }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, pattern: u64) -> C64 {
        self.basis
            .index_of(pattern)
            .map_or(C64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        check_basis(&self.basis, &other.basis, "inner product")?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Norm carried by each excitation sector.
    pub fn sector_norms(&self) -> Vec<f64> {
        self.basis
            .blocks()
            .iter()
            .map(|r| self.amplitudes.rows(r.start, r.len()).norm())
            .collect()
    }
}

/// Convex mixture of pure states sharing one basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchEnsemble {
    branches: Vec<(f64, PureState)>,
}

impl BranchEnsemble {
    pub fn new(branches: Vec<(f64, PureState)>) -> Result<Self> {
        let Some((_, first)) = branches.first() else {
            return Err(Error::Domain("ensemble needs at least one branch".into()));
        };
        let basis = Arc::clone(first.basis());
        let mut total = 0.0;
        for (w, s) in &branches {
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::Domain(format!("branch weight {w} is not positive")));
            }
            check_basis(&basis, s.basis(), "ensemble branch")?;
            total += w;
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!("branch weights sum to {total}")));
        }
        Ok(BranchEnsemble { branches })
    }

    pub fn branches(&self) -> &[(f64, PureState)] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }
}

impl From<PureState> for BranchEnsemble {
    fn from(state: PureState) -> Self {
        BranchEnsemble {
            branches: vec![(1.0, state)],
        }
    }
}

/// A pure state or a branch mixture.
pub trait QuantumState {
    fn basis(&self) -> &Arc<Basis>;

    /// `(weight, state)` pairs; a pure state is one branch of weight 1.
    fn weighted_branches(&self) -> impl Iterator<Item = (f64, &PureState)>;
}

impl QuantumState for PureState {
    fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    fn weighted_branches(&self) -> impl Iterator<Item = (f64, &PureState)> {
        std::iter::once((1.0, self))
    }
}

impl QuantumState for BranchEnsemble {
    fn basis(&self) -> &Arc<Basis> {
        self.branches[0].1.basis()
    }

    fn weighted_branches(&self) -> impl Iterator<Item = (f64, &PureState)> {
        self.branches.iter().map(|(w, s)| (*w, s))
    }
}

/// Local preparation of one or two sites on top of the vacuum.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialStateSpec {
    /// `α|0⟩ + β|1⟩` on one site.
    Single { site: usize, amplitudes: [C64; 2] },
    /// `α|00⟩ + β|10⟩ + γ|01⟩ + κ|11⟩` on `(first, second)`.
    Pair {
        first: usize,
        second: usize,
        amplitudes: [C64; 4],
    },
}

impl InitialStateSpec {
    /// `|+⟩` on `site`.
    pub fn plus(site: usize) -> Self {
        let one = C64::new(1.0, 0.0);
        InitialStateSpec::Single {
            site,
            amplitudes: [one, one],
        }
    }

    /// `|+⟩|+⟩` on two sites (α = β = γ = κ = 1).
    pub fn plus_pair(first: usize, second: usize) -> Self {
        InitialStateSpec::Pair {
            first,
            second,
            amplitudes: [C64::new(1.0, 0.0); 4],
        }
    }
}

/// Builds the normalized state described by `spec` in `basis`.
pub fn prepare_initial(spec: &InitialStateSpec, basis: &Arc<Basis>) -> Result<PureState> {
    let mut amps = DVector::zeros(basis.len());
    let mut place = |pattern: u64, z: C64| -> Result<()> {
        if z == C64::new(0.0, 0.0) {
            return Ok(());
        }
        let idx = basis.index_of(pattern).ok_or(Error::Capacity {
            needed: pattern.count_ones() as usize,
            cap: basis.max_excitations(),
        })?;
        amps[idx] += z;
        Ok(())
    };
    match *spec {
        InitialStateSpec::Single { site, amplitudes } => {
            basis.check_site(site)?;
            place(0, amplitudes[0])?;
            place(1 << site, amplitudes[1])?;
        }
        InitialStateSpec::Pair {
            first,
            second,
            amplitudes,
        } => {
            basis.check_site(first)?;
            basis.check_site(second)?;
            if first == second {
                return Err(Error::param("second", "injection sites must differ"));
            }
            let (a, c) = (1u64 << first, 1u64 << second);
            for (pattern, z) in [0, a, c, a | c].into_iter().zip(amplitudes) {
                place(pattern, z)?;
            }
        }
    }
    PureState::normalized(Arc::clone(basis), amps)
}

/// `ψ(t)` under the Hamiltonian behind `eig`.
pub fn evolve(state: &PureState, eig: &EigenDecomposition, t: f64) -> Result<PureState> {
    check_basis(state.basis(), eig.basis(), "evolve")?;
    let coeffs = eig.to_eigenbasis(&state.amplitudes);
    Ok(PureState {
        basis: Arc::clone(&state.basis),
        amplitudes: eig.site_amplitudes_at(&coeffs, t),
    })
}

/// A state (or mixture) frozen at a quench instant and evolved afterwards
/// under a fixed Hamiltonian.
///
/// Times passed to [`Trajectory::at`] are measured from the quench instant.
#[derive(Debug, Clone)]
pub struct Trajectory {
    eig: Arc<EigenDecomposition>,
    branches: Vec<(f64, DVector<C64>)>,
}

impl Trajectory {
    pub fn new<S: QuantumState>(state: &S, eig: Arc<EigenDecomposition>) -> Result<Self> {
        check_basis(state.basis(), eig.basis(), "trajectory")?;
        let branches = state
            .weighted_branches()
            .map(|(w, s)| (w, eig.to_eigenbasis(&s.amplitudes)))
            .collect();
        Ok(Trajectory { eig, branches })
    }

    pub fn eigen(&self) -> &Arc<EigenDecomposition> {
        &self.eig
    }

    pub fn is_pure(&self) -> bool {
        self.branches.len() == 1
    }

    /// State of the first (for pure trajectories, the only) branch.
    pub fn pure_at(&self, t: f64) -> PureState {
        PureState {
            basis: Arc::clone(self.eig.basis()),
            amplitudes: self.eig.site_amplitudes_at(&self.branches[0].1, t),
        }
    }

    pub fn at(&self, t: f64) -> BranchEnsemble {
        BranchEnsemble {
            branches: self
                .branches
                .iter()
                .map(|(w, c)| {
                    let state = PureState {
                        basis: Arc::clone(self.eig.basis()),
                        amplitudes: self.eig.site_amplitudes_at(c, t),
                    };
                    (*w, state)
                })
                .collect(),
        }
    }
}

/// Sudden quench: amplitudes are carried over unchanged and later times are
/// propagated with `new_eig`.
pub fn requench<S: QuantumState>(
    state: &S,
    new_eig: Arc<EigenDecomposition>,
) -> Result<Trajectory> {
    Trajectory::new(state, new_eig)
}

/// Reset channel that discards the qubit at `site` and replaces it by `|+⟩`.
///
/// Each input branch splits by the measured value of the site; branches
/// with weight below [`BRANCH_WEIGHT_FLOOR`] are dropped.
pub fn inject_plus<S: QuantumState>(state: &S, site: usize) -> Result<BranchEnsemble> {
    let basis = Arc::clone(state.basis());
    basis.check_site(site)?;
    let bit = 1u64 << site;
    let mut out: Vec<(f64, PureState)> = Vec::new();
    for (weight, branch) in state.weighted_branches() {
        for occupied in [false, true] {
            let mut amps = DVector::<C64>::zeros(basis.len());
            let mut overflow = 0.0;
            for (i, &pattern) in basis.states().iter().enumerate() {
                if (pattern & bit != 0) != occupied {
                    continue;
                }
                let z = branch.amplitudes[i] * FRAC_1_SQRT_2;
                let rest = pattern & !bit;
                amps[basis
                    .index_of(rest)
                    .expect("removing an excitation stays in basis")] += z;
                match basis.index_of(rest | bit) {
                    Some(j) => amps[j] += z,
                    None => overflow += z.norm_sqr(),
                }
            }
            let w = amps.norm_squared() + overflow;
            if weight * w < BRANCH_WEIGHT_FLOOR {
                continue;
            }
            if overflow > BRANCH_WEIGHT_FLOOR {
                return Err(Error::Capacity {
                    needed: basis.max_excitations() + 1,
                    cap: basis.max_excitations(),
                });
            }
            let norm = amps.norm();
            out.push((
                weight * w,
                PureState {
                    basis: Arc::clone(&basis),
                    amplitudes: amps.unscale(norm),
                },
            ));
        }
    }
    let total: f64 = out.iter().map(|b| b.0).sum();
    for b in &mut out {
        b.0 /= total;
    }
    BranchEnsemble::new(out)
}
