//! The three experiments: entangling run, asynchronous injection sweep and
//! generation-plus-storage.

use std::sync::Arc;

use serde::Serialize;

use crate::chain::{build_hamiltonian, decouple_site, Basis, ChainSpec, DEFAULT_MAX_EXCITATIONS};
use crate::dynamics::{
    diagonalize, evolve, inject_plus, prepare_initial, requench, EigenDecomposition,
    InitialStateSpec, PureState, Trajectory,
};
use crate::entanglement::{eof, fidelity, PairReducer};
use crate::error::{Error, Result};

/// Sample times `{0, dt, 2dt, …}` up to and including `t_max`.
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(Error::param(
            "t_max",
            format!("must be non-negative, got {t_max}"),
        ));
    }
    let steps = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

/// Time series recorded by a protocol run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolTrace {
    pub times: Vec<f64>,
    /// `|⟨Ψ(0)|Ψ(t)⟩|²`.
    pub fidelity_initial: Vec<f64>,
    /// `|⟨Ψ_ref|Ψ(t)⟩|²` where a protocol defines a reference state.
    pub fidelity_reference: Option<Vec<f64>>,
    /// EoF between `pair`.
    pub eof: Vec<f64>,
    pub pair: (usize, usize),
    pub spec: ChainSpec,
    pub t_mirror: Option<f64>,
    pub seed: Option<u64>,
}

impl ProtocolTrace {
    pub fn with_mirroring_time(mut self, t_mirror: f64) -> Self {
        self.t_mirror = Some(t_mirror);
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index and value of the largest EoF sample with `t` in `[from, to]`.
    pub fn max_eof_in(&self, from: f64, to: f64) -> Option<(usize, f64)> {
        self.times
            .iter()
            .zip(&self.eof)
            .enumerate()
            .filter(|(_, (t, _))| (from..=to).contains(*t))
            .map(|(i, (_, e))| (i, *e))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Chain prepared for the two-injection protocol: basis, spectrum, the
/// injected state and the reducer onto the injection sites.
#[derive(Debug, Clone)]
pub struct EntanglingRun {
    initial: PureState,
    trajectory: Trajectory,
    reducer: PairReducer,
}

pub(crate) fn spectrum_of(spec: &ChainSpec, basis: &Arc<Basis>) -> Result<Arc<EigenDecomposition>> {
    let h = build_hamiltonian(spec, basis)?;
    Ok(Arc::new(diagonalize(&h)?))
}

impl EntanglingRun {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        let (a, c) = spec.injection_sites()?;
        let basis = Arc::new(Basis::new(spec.n_sites(), DEFAULT_MAX_EXCITATIONS)?);
        let eig = spectrum_of(spec, &basis)?;
        let initial = prepare_initial(&InitialStateSpec::plus_pair(a, c), &basis)?;
        let trajectory = Trajectory::new(&initial, eig)?;
        let reducer = PairReducer::new(&basis, a, c)?;
        Ok(EntanglingRun {
            initial,
            trajectory,
            reducer,
        })
    }

    pub fn initial(&self) -> &PureState {
        &self.initial
    }

    pub fn state_at(&self, t: f64) -> PureState {
        self.trajectory.pure_at(t)
    }

    pub fn eof_at(&self, t: f64) -> Result<f64> {
        Ok(eof(&self.reducer.reduce(&self.state_at(t))?))
    }

    /// Returns `(fidelity with Ψ(0), EoF)` at `t`.
    pub fn sample(&self, t: f64) -> Result<(f64, f64)> {
        let psi = self.state_at(t);
        Ok((
            fidelity(&self.initial, &psi)?,
            eof(&self.reducer.reduce(&psi)?),
        ))
    }
}

/// Injects `|+⟩|+⟩` on the end defects and records fidelity and EoF on
/// `{0, dt, …, t_max}`.
pub fn run_entangling(spec: &ChainSpec, t_max: f64, dt: f64) -> Result<ProtocolTrace> {
    let times = time_grid(t_max, dt)?;
    let run = EntanglingRun::new(spec)?;
    let mut fidelity_initial = Vec::with_capacity(times.len());
    let mut eofs = Vec::with_capacity(times.len());
    for &t in &times {
        let (f, e) = run.sample(t)?;
        fidelity_initial.push(f);
        eofs.push(e);
    }
    Ok(ProtocolTrace {
        times,
        fidelity_initial,
        fidelity_reference: None,
        eof: eofs,
        pair: spec.injection_sites()?,
        spec: spec.clone(),
        t_mirror: None,
        seed: None,
    })
}

/// Which end defect receives the late injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InjectionOrder {
    /// A at t = 0, C delayed.
    AFirst,
    /// C at t = 0, A delayed.
    CFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsyncPoint {
    /// Delay as a fraction of the mirroring time.
    pub delay: f64,
    /// EoF between A and C at `t_mirror` after the first injection.
    pub eof: f64,
}

/// EoF at `t_mirror` when the second `|+⟩` arrives `delay · t_mirror` late.
///
/// The late injection is a reset of the target site to `|+⟩`.
pub fn run_async_sweep(
    spec: &ChainSpec,
    t_mirror: f64,
    delays: &[f64],
    order: InjectionOrder,
) -> Result<Vec<AsyncPoint>> {
    if !(t_mirror.is_finite() && t_mirror > 0.0) {
        return Err(Error::param(
            "t_mirror",
            format!("must be positive, got {t_mirror}"),
        ));
    }
    let (a, c) = spec.injection_sites()?;
    let (first, second) = match order {
        InjectionOrder::AFirst => (a, c),
        InjectionOrder::CFirst => (c, a),
    };
    let basis = Arc::new(Basis::new(spec.n_sites(), DEFAULT_MAX_EXCITATIONS)?);
    let eig = spectrum_of(spec, &basis)?;
    let reducer = PairReducer::new(&basis, a, c)?;
    let start = prepare_initial(&InitialStateSpec::plus(first), &basis)?;
    delays
        .iter()
        .map(|&delay| {
            if !(0.0..=0.5).contains(&delay) {
                return Err(Error::param("delays", format!("{delay} outside [0, 0.5]")));
            }
            let t_inject = delay * t_mirror;
            let before = evolve(&start, &eig, t_inject)?;
            let mixed = inject_plus(&before, second)?;
            let after = requench(&mixed, Arc::clone(&eig))?.at(t_mirror - t_inject);
            Ok(AsyncPoint {
                delay,
                eof: eof(&reducer.reduce(&after)?),
            })
        })
        .collect()
}

/// Entangle, then cut the centre defect out at `t_mirror` and keep evolving.
///
/// The grid holds `{0, dt, …} < t_mirror`, then `t_mirror + {0, dt, …, t_max_after}`;
/// samples from `t_mirror` on use the decoupled Hamiltonian. The reference
/// state is the state at the quench instant.
pub fn run_storage(
    spec: &ChainSpec,
    t_mirror: f64,
    t_max_after: f64,
    dt: f64,
) -> Result<ProtocolTrace> {
    if !(t_mirror.is_finite() && t_mirror > 0.0) {
        return Err(Error::param(
            "t_mirror",
            format!("must be positive, got {t_mirror}"),
        ));
    }
    let (a, c) = spec.injection_sites()?;
    let b = spec
        .site_b()
        .ok_or_else(|| Error::param("site_b", "storage protocol needs a centre defect"))?;
    let run = EntanglingRun::new(spec)?;
    let basis = Arc::clone(run.initial.basis());
    let cut = decouple_site(spec, b)?;
    let at_quench = run.state_at(t_mirror);
    let after = requench(&at_quench, spectrum_of(&cut, &basis)?)?;

    let before_grid: Vec<f64> = time_grid(t_mirror, dt)?
        .into_iter()
        .filter(|&t| t < t_mirror)
        .collect();
    let after_grid = time_grid(t_max_after, dt)?;

    let mut trace = ProtocolTrace {
        times: Vec::with_capacity(before_grid.len() + after_grid.len()),
        fidelity_initial: Vec::new(),
        fidelity_reference: Some(Vec::new()),
        eof: Vec::new(),
        pair: (a, c),
        spec: spec.clone(),
        t_mirror: Some(t_mirror),
        seed: None,
    };
    let mut record = |t: f64, psi: PureState| -> Result<()> {
        trace.times.push(t);
        trace.fidelity_initial.push(fidelity(&run.initial, &psi)?);
        if let Some(r) = trace.fidelity_reference.as_mut() {
            r.push(fidelity(&at_quench, &psi)?);
        }
        trace.eof.push(eof(&run.reducer.reduce(&psi)?));
        Ok(())
    };
    for &t in &before_grid {
        record(t, run.state_at(t))?;
    }
    for &s in &after_grid {
        record(t_mirror + s, after.pure_at(s))?;
    }
    Ok(trace)
}

/// Single-excitation eigenstates of a chain with their site occupations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizedModeReport {
    /// Ascending energies.
    pub energies: Vec<f64>,
    /// `occupations[k][i] = |⟨i|φ_k⟩|²`.
    pub occupations: Vec<Vec<f64>>,
    /// Index of the eigenstate closest to zero energy.
    pub zero_mode: usize,
    /// Number of eigenstates with `|E| < 1e-10`.
    pub zero_count: usize,
}

impl LocalizedModeReport {
    pub fn zero_mode_occupation(&self, site: usize) -> f64 {
        self.occupations[self.zero_mode][site]
    }
}

pub fn localized_mode_report(spec: &ChainSpec) -> Result<LocalizedModeReport> {
    let basis = Arc::new(Basis::new(spec.n_sites(), 1)?);
    let eig = spectrum_of(spec, &basis)?;
    let one = basis.block(1);
    let mut energies = Vec::new();
    let mut occupations = Vec::new();
    for (k, &e) in eig.values().iter().enumerate() {
        let col = eig.vectors().column(k);
        if col.rows(one.start, one.len()).norm() < 0.5 {
            continue;
        }
        energies.push(e);
        occupations.push(
            col.rows(one.start, one.len())
                .iter()
                .map(|v| v * v)
                .collect(),
        );
    }
    let zero_mode = energies
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Numerical("empty single-excitation sector".into()))?;
    let zero_count = energies.iter().filter(|e| e.abs() < 1e-10).count();
    Ok(LocalizedModeReport {
        energies,
        occupations,
        zero_mode,
        zero_count,
    })
}
