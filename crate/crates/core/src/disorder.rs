//! Monte Carlo over static disorder realizations.
//!
//! Realization `r` draws its on-site and coupling noise from independent
//! streams seeded by `(base_seed, r, tag)`, so a realization is fixed by
//! its index alone: levels reuse the same `d_i` and results do not depend
//! on the number of worker threads.

use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{effective_eta, mirroring_time};
use crate::chain::{
    apply_diagonal_disorder, apply_offdiagonal_disorder, build_hamiltonian, Basis, ChainSpec,
    CouplingScale, DEFAULT_MAX_EXCITATIONS,
};
use crate::dynamics::diagonalize;
use crate::error::{Error, Result};
use crate::protocols::{time_grid, EntanglingRun};
use crate::rng::{DisorderStream, StreamTag};
use crate::stats::EnsembleStats;

/// Fraction of aborted realizations above which a run fails.
pub const MAX_ABORTED_FRACTION: f64 = 0.01;
/// Spectrum entries below this magnitude count as zero modes.
pub const ZERO_ENERGY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisorderKind {
    Diagonal,
    #[serde(alias = "off-diagonal")]
    Offdiagonal,
    Both,
}

impl DisorderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DisorderKind::Diagonal => "diagonal",
            DisorderKind::Offdiagonal => "offdiagonal",
            DisorderKind::Both => "both",
        }
    }
}

impl std::fmt::Display for DisorderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DisorderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diagonal" => Ok(DisorderKind::Diagonal),
            "offdiagonal" | "off-diagonal" => Ok(DisorderKind::Offdiagonal),
            "both" => Ok(DisorderKind::Both),
            other => Err(Error::param(
                "kind",
                format!("unknown disorder kind `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scenario {
    /// EoF at the clean-chain mirroring time.
    AtMirroringTime,
    /// Largest EoF over the sampling window.
    WindowMaximum,
}

impl Scenario {
    pub fn number(self) -> u8 {
        match self {
            Scenario::AtMirroringTime => 1,
            Scenario::WindowMaximum => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderConfig {
    pub kind: DisorderKind,
    /// Disorder strengths `E`; perturbations are `E·d·δ` with `d ∈ [-1/2, 1/2)`.
    pub levels: Vec<f64>,
    pub n_realizations: usize,
    pub window: f64,
    pub dt: f64,
    pub base_seed: u64,
}

impl Default for DisorderConfig {
    fn default() -> Self {
        DisorderConfig {
            kind: DisorderKind::Offdiagonal,
            levels: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            n_realizations: 200,
            window: 500.0,
            dt: 0.25,
            base_seed: 20_180_515,
        }
    }
}

impl DisorderConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.levels.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::param(
                "levels",
                format!("level {bad} must be non-negative"),
            ));
        }
        if self.n_realizations == 0 {
            return Err(Error::param("n_realizations", "must be at least 1"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param(
                "dt",
                format!("must be positive, got {}", self.dt),
            ));
        }
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(Error::param(
                "window",
                format!("must be positive, got {}", self.window),
            ));
        }
        Ok(())
    }
}

/// Chain for realization `realization` at disorder strength `level`.
pub fn disordered_spec(
    spec: &ChainSpec,
    delta: f64,
    kind: DisorderKind,
    level: f64,
    base_seed: u64,
    realization: u64,
) -> Result<ChainSpec> {
    let mut out = spec.clone();
    if matches!(kind, DisorderKind::Diagonal | DisorderKind::Both) {
        let mut rng = DisorderStream::for_realization(base_seed, realization, StreamTag::Diagonal);
        out = apply_diagonal_disorder(&out, level, delta, &mut rng)?;
    }
    if matches!(kind, DisorderKind::Offdiagonal | DisorderKind::Both) {
        let mut rng =
            DisorderStream::for_realization(base_seed, realization, StreamTag::OffDiagonal);
        out = apply_offdiagonal_disorder(&out, level, delta, &mut rng)?;
    }
    Ok(out)
}

/// Per-level result of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelOutcome {
    pub level: f64,
    pub stats: EnsembleStats,
    /// Per-realization values, `None` where the realization aborted.
    pub values: Vec<Option<f64>>,
    pub aborted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub kind: DisorderKind,
    pub t_mirror: f64,
    pub levels: Vec<LevelOutcome>,
}

/// Both scenarios, evaluated on the same realizations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisorderSweep {
    pub at_mirroring_time: ScenarioReport,
    pub window_maximum: ScenarioReport,
}

struct Measurement {
    at_mirror: f64,
    window_max: f64,
}

fn measure(spec: &ChainSpec, t_mirror: f64, grid: Option<&[f64]>) -> Result<Measurement> {
    let run = EntanglingRun::new(spec)?;
    let at_mirror = run.eof_at(t_mirror)?;
    let mut window_max = at_mirror;
    if let Some(grid) = grid {
        for &t in grid {
            window_max = window_max.max(run.eof_at(t)?);
        }
    }
    if !(at_mirror.is_finite() && window_max.is_finite()) {
        return Err(Error::Numerical("non-finite EoF".into()));
    }
    Ok(Measurement {
        at_mirror,
        window_max,
    })
}

fn outcome(level: f64, values: Vec<Option<f64>>) -> Result<LevelOutcome> {
    let n = values.len();
    let ok: Vec<f64> = values.iter().flatten().copied().collect();
    let aborted = n - ok.len();
    if aborted as f64 > MAX_ABORTED_FRACTION * n as f64 {
        return Err(Error::Numerical(format!(
            "{aborted} of {n} realizations aborted at level {level}"
        )));
    }
    let stats = EnsembleStats::from_values(&ok)
        .ok_or_else(|| Error::Numerical(format!("no realization completed at level {level}")))?;
    Ok(LevelOutcome {
        level,
        stats,
        values,
        aborted,
    })
}

fn sweep(
    spec: &ChainSpec,
    scale: CouplingScale,
    cfg: &DisorderConfig,
    with_window: bool,
) -> Result<DisorderSweep> {
    cfg.validate()?;
    spec.injection_sites()?;
    let t_mirror = mirroring_time(effective_eta(scale)?)?;
    // the window grid always contains the scenario-1 sample time
    let grid = if with_window {
        let mut g = time_grid(cfg.window, cfg.dt)?;
        if t_mirror <= cfg.window {
            g.push(t_mirror);
        }
        Some(g)
    } else {
        None
    };
    let mut first = Vec::with_capacity(cfg.levels.len());
    let mut second = Vec::with_capacity(cfg.levels.len());
    for &level in &cfg.levels {
        let results: Vec<Option<Measurement>> = (0..cfg.n_realizations as u64)
            .into_par_iter()
            .map(|r| {
                disordered_spec(spec, scale.delta, cfg.kind, level, cfg.base_seed, r)
                    .and_then(|s| measure(&s, t_mirror, grid.as_deref()))
                    .ok()
            })
            .collect();
        first.push(outcome(
            level,
            results
                .iter()
                .map(|m| m.as_ref().map(|m| m.at_mirror))
                .collect(),
        )?);
        second.push(outcome(
            level,
            results
                .iter()
                .map(|m| m.as_ref().map(|m| m.window_max))
                .collect(),
        )?);
    }
    Ok(DisorderSweep {
        at_mirroring_time: ScenarioReport {
            scenario: Scenario::AtMirroringTime,
            kind: cfg.kind,
            t_mirror,
            levels: first,
        },
        window_maximum: ScenarioReport {
            scenario: Scenario::WindowMaximum,
            kind: cfg.kind,
            t_mirror,
            levels: second,
        },
    })
}

/// EoF(A, C) at the clean-chain mirroring time, ensemble-averaged per level.
pub fn run_scenario1(
    spec: &ChainSpec,
    scale: CouplingScale,
    cfg: &DisorderConfig,
) -> Result<ScenarioReport> {
    Ok(sweep(spec, scale, cfg, false)?.at_mirroring_time)
}

/// Largest EoF(A, C) over `{0, dt, …, window}` (plus the mirroring time),
/// ensemble-averaged per level.
pub fn run_scenario2(
    spec: &ChainSpec,
    scale: CouplingScale,
    cfg: &DisorderConfig,
) -> Result<ScenarioReport> {
    Ok(sweep(spec, scale, cfg, true)?.window_maximum)
}

/// Both scenarios from one pass over the realizations.
pub fn run_scenarios(
    spec: &ChainSpec,
    scale: CouplingScale,
    cfg: &DisorderConfig,
) -> Result<DisorderSweep> {
    sweep(spec, scale, cfg, true)
}

/// Index-wise statistics of the sorted one- plus two-excitation spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Indices whose mean and spread are both below [`ZERO_ENERGY_TOL`].
    pub zero_count: usize,
    /// Number of `|ε| < ZERO_ENERGY_TOL` levels in each realization.
    pub realization_zero_counts: Vec<usize>,
    pub aborted: usize,
}

/// Sorted one- plus two-excitation energies of `spec` (vacuum excluded).
pub fn excited_spectrum(spec: &ChainSpec) -> Result<Vec<f64>> {
    let basis = Arc::new(Basis::new(spec.n_sites(), DEFAULT_MAX_EXCITATIONS)?);
    let h = build_hamiltonian(spec, &basis)?;
    let eig = diagonalize(&h)?;
    let mut values: Vec<f64> = (1..=DEFAULT_MAX_EXCITATIONS)
        .flat_map(|k| eig.sector_values(k))
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn spectrum_statistics(
    spec: &ChainSpec,
    delta: f64,
    kind: DisorderKind,
    scale_e: f64,
    n_realizations: usize,
    base_seed: u64,
) -> Result<SpectrumStats> {
    if n_realizations == 0 {
        return Err(Error::param("n_realizations", "must be at least 1"));
    }
    let spectra: Vec<Option<Vec<f64>>> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|r| {
            disordered_spec(spec, delta, kind, scale_e, base_seed, r)
                .and_then(|s| excited_spectrum(&s))
                .ok()
        })
        .collect();
    let ok: Vec<&Vec<f64>> = spectra.iter().flatten().collect();
    let aborted = n_realizations - ok.len();
    if aborted as f64 > MAX_ABORTED_FRACTION * n_realizations as f64 || ok.is_empty() {
        return Err(Error::Numerical(format!(
            "{aborted} of {n_realizations} spectra failed"
        )));
    }
    let dim = ok[0].len();
    let mut mean = Vec::with_capacity(dim);
    let mut std = Vec::with_capacity(dim);
    for i in 0..dim {
        let column: Vec<f64> = ok.iter().map(|s| s[i]).collect();
        let s = EnsembleStats::from_values(&column).expect("non-empty");
        mean.push(s.mean);
        std.push(s.std);
    }
    let zero_count = mean
        .iter()
        .zip(&std)
        .filter(|(m, s)| m.abs() < ZERO_ENERGY_TOL && **s < ZERO_ENERGY_TOL)
        .count();
    let realization_zero_counts = ok
        .iter()
        .map(|s| s.iter().filter(|e| e.abs() < ZERO_ENERGY_TOL).count())
        .collect();
    Ok(SpectrumStats {
        mean,
        std,
        zero_count,
        realization_zero_counts,
        aborted,
    })
}
