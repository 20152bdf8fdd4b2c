//! Acceptance criteria A1–A9. Each test prints one `PASS`/`FAIL` line and
//! asserts the criterion at its stated tolerance.
//!
//! Run with `cargo test -p solitonchain-core --test acceptance -- --nocapture`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{Matrix2, Matrix4, Vector4};
use solitonchain_core::analytic::{analytic_eof_profile, effective_eta, mirroring_time};
use solitonchain_core::chain::{
    build_abc_chain, build_hamiltonian, build_storage_chain, build_trimer, decouple_site, Basis,
    ChainSpec, CouplingScale,
};
use solitonchain_core::disorder::{
    run_scenario1, run_scenarios, spectrum_statistics, DisorderConfig, DisorderKind,
};
use solitonchain_core::dynamics::{diagonalize, evolve, prepare_initial, InitialStateSpec, C64};
use solitonchain_core::entanglement::{concurrence, eof, TwoQubitDensity};
use solitonchain_core::protocols::{
    localized_mode_report, run_async_sweep, run_entangling, run_storage, InjectionOrder,
};

const SEED: u64 = 20_180_515;
const REALIZATIONS: usize = 200;

fn report(id: &str, pass: bool, detail: impl AsRef<str>) {
    println!(
        "{id} {} {}",
        if pass { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
}

fn standard() -> (ChainSpec, f64) {
    let scale = CouplingScale::standard();
    let spec = build_abc_chain(0, scale).unwrap();
    let t_m = mirroring_time(effective_eta(scale).unwrap()).unwrap();
    (spec, t_m)
}

/// Local maxima of `values` (interior points not smaller than both neighbours).
fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] >= values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

#[test]
fn a1_clean_entangling_protocol() {
    let start = Instant::now();
    let (spec, t_m) = standard();
    let eta = effective_eta(CouplingScale::standard()).unwrap();
    let trace = run_entangling(&spec, 2.1 * t_m, 0.25).unwrap();
    let elapsed = start.elapsed();

    let (i_max, max_eof) = trace.max_eof_in(0.0, 1.1 * t_m).unwrap();
    let t_peak = trace.times[i_max];
    let peak_ok = max_eof >= 0.99 && (t_peak - t_m).abs() <= 0.02 * t_m;

    let f_peak = local_maxima(&trace.fidelity_initial)
        .into_iter()
        .filter(|&i| (trace.times[i] - 2.0 * t_m).abs() <= 0.02 * 2.0 * t_m)
        .map(|i| (trace.times[i], trace.fidelity_initial[i]))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    let fid_ok = f_peak.is_some_and(|(_, f)| f >= 0.95);
    let eta_ok = (eta - 0.009_854_2).abs() < 5e-8;
    let time_ok = elapsed < Duration::from_secs(5);

    let pass = peak_ok && fid_ok && eta_ok && time_ok;
    report(
        "A1",
        pass,
        format!(
            "eta={eta:.7} t_M={t_m:.3} maxEoF={max_eof:.4}@t={t_peak:.2} ({:+.3}%) \
             F_local_max={f_peak:?} runtime={elapsed:?}",
            100.0 * (t_peak / t_m - 1.0)
        ),
    );
    assert!(pass);
}

#[test]
fn a2_effective_coupling_is_exact() {
    let mut worst: f64 = 0.0;
    for ratio in [5.0, 10.0, 20.0] {
        let scale = CouplingScale::new(1.0, 1.0 / ratio).unwrap();
        let eta = effective_eta(scale).unwrap();
        let spec = build_abc_chain(0, scale).unwrap();
        let basis = Arc::new(Basis::new(7, 1).unwrap());
        let eig = diagonalize(&build_hamiltonian(&spec, &basis).unwrap()).unwrap();
        let smallest_positive = eig
            .sector_values(1)
            .into_iter()
            .filter(|&e| e > 1e-9)
            .fold(f64::INFINITY, f64::min);
        let rel = (std::f64::consts::SQRT_2 * eta - smallest_positive).abs() / smallest_positive;
        worst = worst.max(rel);
    }
    let pass = worst <= 1e-10;
    report(
        "A2",
        pass,
        format!("worst relative error {worst:.3e} over Δ/δ ∈ {{5,10,20}}"),
    );
    assert!(pass);
}

#[test]
fn a3_analytic_vs_numeric_eof() {
    let eta = effective_eta(CouplingScale::standard()).unwrap();
    let t_m = mirroring_time(eta).unwrap();

    let trimer = run_entangling(&build_trimer(eta).unwrap(), 2.0 * t_m, 0.25).unwrap();
    let trimer_err = trimer
        .times
        .iter()
        .zip(&trimer.eof)
        .map(|(&t, &e)| (e - analytic_eof_profile(eta, t).unwrap()).abs())
        .fold(0.0, f64::max);

    let (spec, _) = standard();
    let run = solitonchain_core::protocols::EntanglingRun::new(&spec).unwrap();
    let mut chain_err: f64 = 0.0;
    for t in [0.5 * t_m, t_m] {
        let diff = (run.eof_at(t).unwrap() - analytic_eof_profile(eta, t).unwrap()).abs();
        chain_err = chain_err.max(diff);
    }
    let pass = trimer_err <= 1e-8 && chain_err <= 0.05;
    report(
        "A3",
        pass,
        format!("trimer max |Δ|={trimer_err:.3e}; N=7 max |Δ| at t_M/2, t_M = {chain_err:.4}"),
    );
    assert!(pass);
}

#[test]
fn a4_scenario_one() {
    let start = Instant::now();
    let (spec, _) = standard();
    let scale = CouplingScale::standard();
    let cfg = |kind, levels: Vec<f64>| DisorderConfig {
        kind,
        levels,
        n_realizations: REALIZATIONS,
        base_seed: SEED,
        ..Default::default()
    };
    let off = run_scenario1(
        &spec,
        scale,
        &cfg(DisorderKind::Offdiagonal, vec![0.1, 0.5]),
    )
    .unwrap();
    let diag = run_scenario1(&spec, scale, &cfg(DisorderKind::Diagonal, vec![0.5])).unwrap();
    let elapsed = start.elapsed();
    let off_01 = off.levels[0].stats.mean;
    let off_05 = off.levels[1].stats.mean;
    let diag_05 = diag.levels[0].stats.mean;
    let pass = off_01 > 0.9
        && (0.1..=0.35).contains(&diag_05)
        && (0.45..=0.75).contains(&off_05)
        && elapsed < Duration::from_secs(300);
    report(
        "A4",
        pass,
        format!(
            "offdiag E=0.1 mean={off_01:.4} (>0.9); diag E=0.5 mean={diag_05:.4} ([0.1,0.35]); \
             offdiag E=0.5 mean={off_05:.4} ([0.45,0.75]); n={REALIZATIONS} runtime={elapsed:?}"
        ),
    );
    assert!(pass);
}

#[test]
fn a5_scenario_two() {
    let (spec, _) = standard();
    let scale = CouplingScale::standard();
    let cfg = |kind| DisorderConfig {
        kind,
        levels: vec![0.5],
        n_realizations: REALIZATIONS,
        base_seed: SEED,
        ..Default::default()
    };
    let off = run_scenarios(&spec, scale, &cfg(DisorderKind::Offdiagonal)).unwrap();
    let diag = run_scenarios(&spec, scale, &cfg(DisorderKind::Diagonal)).unwrap();

    let dominates = [&off, &diag].iter().all(|s| {
        let one = &s.at_mirroring_time.levels[0].values;
        let two = &s.window_maximum.levels[0].values;
        one.iter().zip(two).all(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => b >= a,
            _ => true,
        })
    });
    let off_max = off.window_maximum.levels[0].stats;
    let diag_max = diag.window_maximum.levels[0].stats;
    let off_ok = off_max.mean > 0.9;
    let diag_ok = diag_max.mean >= 0.4;
    let pass = off_ok && diag_ok && dominates;
    report(
        "A5",
        pass,
        format!(
            "offdiag E=0.5 mean max-EoF={:.4}±{:.4} (>0.9: {}); diag E=0.5 mean max-EoF={:.4}±{:.4} \
             (>=0.4: {}); per-realization s2>=s1: {dominates}",
            off_max.mean,
            off_max.sem,
            if off_ok { "ok" } else { "NOT MET" },
            diag_max.mean,
            diag_max.sem,
            if diag_ok { "ok" } else { "NOT MET" },
        ),
    );
    assert!(pass);
}

#[test]
fn a6_zero_mode_protection() {
    let (spec, _) = standard();
    let off = spectrum_statistics(&spec, 0.1, DisorderKind::Offdiagonal, 1.0, 100, SEED).unwrap();
    let diag = spectrum_statistics(&spec, 0.1, DisorderKind::Diagonal, 1.0, 100, SEED).unwrap();
    let off_all_four = off.realization_zero_counts.iter().all(|&c| c == 4);
    let diag_broken = diag
        .realization_zero_counts
        .iter()
        .filter(|&&c| c != 4)
        .count();
    let pass = off_all_four && off.zero_count == 4 && diag_broken > 0;
    report(
        "A6",
        pass,
        format!(
            "offdiag E=1: every realization has 4 zero modes: {off_all_four}, index-wise zero count {}; \
             diag E=1: {diag_broken}/100 realizations lose protection",
            off.zero_count
        ),
    );
    assert!(pass);
}

#[test]
fn a7_asynchronous_injection() {
    let (spec, t_m) = standard();
    let points = run_async_sweep(&spec, t_m, &[0.0, 0.10], InjectionOrder::AFirst).unwrap();
    let (f0, f10) = (points[0].eof, points[1].eof);
    let pass = f0 >= 0.99 && (f10 - 0.91).abs() <= 0.03;
    report(
        "A7",
        pass,
        format!("EoF(t_M): f=0 → {f0:.4} (>=0.99); f=0.10 → {f10:.4} (0.91±0.03)"),
    );
    assert!(pass);
}

#[test]
fn a8_storage_protocol() {
    let start = Instant::now();
    let scale = CouplingScale::standard();
    let spec = build_storage_chain(scale).unwrap();
    let t_m = mirroring_time(effective_eta(scale).unwrap()).unwrap();
    let trace = run_storage(&spec, t_m, 500.0, 0.25).unwrap();
    let half = decouple_site(&spec, 5).unwrap().sub_chain(0, 5).unwrap();
    let modes = localized_mode_report(&half).unwrap();
    let elapsed = start.elapsed();

    let reference = trace.fidelity_reference.as_ref().unwrap();
    let after: Vec<usize> = (0..trace.len())
        .filter(|&i| trace.times[i] >= t_m && trace.times[i] <= t_m + 500.0)
        .collect();
    let min_ref = after.iter().map(|&i| reference[i]).fold(1.0, f64::min);
    let min_eof = after.iter().map(|&i| trace.eof[i]).fold(1.0, f64::min);
    let below = after.iter().filter(|&&i| trace.eof[i] < 0.9).count();
    let occupation = modes.zero_mode_occupation(2);
    let fid_ok = min_ref >= 0.9;
    let eof_ok = min_eof >= 0.9;
    let occ_ok = (occupation - 0.9804).abs() <= 1e-4;
    let time_ok = elapsed < Duration::from_secs(30);
    let pass = fid_ok && eof_ok && occ_ok && time_ok;
    report(
        "A8",
        pass,
        format!(
            "min F vs Ψ(t_M⁺)={min_ref:.4} (>=0.9: {}); min EoF(X_L,X_R)={min_eof:.4} (>=0.9: {}, \
             {below}/{} samples below); X occupation={occupation:.6} (0.9804±1e-4: {}); runtime={elapsed:?}",
            if fid_ok { "ok" } else { "NOT MET" },
            if eof_ok { "ok" } else { "NOT MET" },
            after.len(),
            if occ_ok { "ok" } else { "NOT MET" },
        ),
    );
    assert!(pass);
}

fn random_unitary2(a: f64, b: f64, c: f64, d: f64) -> Matrix2<C64> {
    // e^{iφ} [[e^{iα}cosθ, e^{iβ}sinθ], [-e^{-iβ}sinθ, e^{-iα}cosθ]]
    let e = |x: f64| C64::from_polar(1.0, x);
    let (s, co) = c.sin_cos();
    Matrix2::new(e(a) * co, e(b) * s, -e(-b) * s, e(-a) * co) * e(d)
}

fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

#[test]
fn a9_property_suite() {
    let mut checks: Vec<(&str, bool, String)> = Vec::new();
    let (spec, _) = standard();
    let basis = Arc::new(Basis::new(7, 2).unwrap());
    let h = build_hamiltonian(&spec, &basis).unwrap();
    let eig = diagonalize(&h).unwrap();
    let psi0 = prepare_initial(&InitialStateSpec::plus_pair(0, 6), &basis).unwrap();

    // unitarity, composition and sector-norm conservation
    let mut norm_err: f64 = 0.0;
    let mut compose_err: f64 = 0.0;
    let mut sector_err: f64 = 0.0;
    let sectors0 = psi0.sector_norms();
    for (t1, t2) in [(3.0, 17.5), (100.0, 125.43), (0.25, 400.0)] {
        let a = evolve(&psi0, &eig, t1 + t2).unwrap();
        let b = evolve(&evolve(&psi0, &eig, t1).unwrap(), &eig, t2).unwrap();
        norm_err = norm_err.max((a.norm() - 1.0).abs());
        compose_err = compose_err.max((a.amplitudes() - b.amplitudes()).camax());
        for (s, s0) in a.sector_norms().iter().zip(&sectors0) {
            sector_err = sector_err.max((s - s0).abs());
        }
    }
    checks.push(("unitarity", norm_err <= 1e-10, format!("{norm_err:.2e}")));
    checks.push((
        "composition",
        compose_err <= 1e-9,
        format!("{compose_err:.2e}"),
    ));
    checks.push((
        "sector norms",
        sector_err <= 1e-10,
        format!("{sector_err:.2e}"),
    ));

    // free-fermion additivity of the two-excitation sector
    let one = eig.sector_values(1);
    let mut sums: Vec<f64> = Vec::new();
    for i in 0..one.len() {
        for j in i + 1..one.len() {
            sums.push(one[i] + one[j]);
        }
    }
    sums.sort_by(f64::total_cmp);
    let mut two = eig.sector_values(2);
    two.sort_by(f64::total_cmp);
    let additivity = sums
        .iter()
        .zip(&two)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    checks.push((
        "free-fermion additivity",
        additivity <= 1e-8,
        format!("{additivity:.2e}"),
    ));

    // concurrence reference states
    let r = |x: f64| C64::new(x, 0.0);
    let h2 = std::f64::consts::FRAC_1_SQRT_2;
    let bell = Vector4::new(r(h2), r(0.0), r(0.0), r(h2));
    let bell_rho = TwoQubitDensity::from_pure(bell).unwrap();
    let product = TwoQubitDensity::from_pure(Vector4::new(r(1.0), r(0.0), r(0.0), r(0.0))).unwrap();
    let werner =
        TwoQubitDensity::new((bell * bell.adjoint()).scale(0.8) + Matrix4::identity().scale(0.05))
            .unwrap();
    let (cb, cp, cw) = (
        concurrence(&bell_rho),
        concurrence(&product),
        concurrence(&werner),
    );
    let conc_ok = (cb - 1.0).abs() < 1e-12 && cp.abs() < 1e-12 && (cw - 0.7).abs() < 1e-12;
    checks.push((
        "concurrence oracles",
        conc_ok,
        format!("Bell={cb:.12} product={cp:.1e} Werner={cw:.12}"),
    ));

    // local-unitary invariance of EoF on states from the protocol
    let reducer = solitonchain_core::entanglement::PairReducer::new(&basis, 0, 6).unwrap();
    let mut lu_err: f64 = 0.0;
    for (k, t) in [37.0, 112.7, 180.0, 225.43].into_iter().enumerate() {
        let rho = reducer.reduce(&evolve(&psi0, &eig, t).unwrap()).unwrap();
        let k = k as f64;
        let u = kron(
            &random_unitary2(0.3 + k, 1.1 * k, 0.7 + 0.2 * k, -0.4),
            &random_unitary2(-1.2, 0.5 + k, 1.3 - 0.3 * k, 0.9 * k),
        );
        let rotated = TwoQubitDensity::new(u * rho.matrix() * u.adjoint()).unwrap();
        lu_err = lu_err.max((eof(&rho) - eof(&rotated)).abs());
    }
    checks.push((
        "local-unitary invariance",
        lu_err <= 1e-9,
        format!("{lu_err:.2e}"),
    ));

    // ensemble determinism under permuted level order and thread count
    let cfg = DisorderConfig {
        kind: DisorderKind::Both,
        levels: vec![0.1, 0.3, 0.5],
        n_realizations: 12,
        window: 60.0,
        dt: 0.5,
        base_seed: SEED,
    };
    let forward = run_scenarios(&spec, CouplingScale::standard(), &cfg).unwrap();
    let reversed_cfg = DisorderConfig {
        levels: cfg.levels.iter().rev().copied().collect(),
        ..cfg.clone()
    };
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let reversed = single
        .install(|| run_scenarios(&spec, CouplingScale::standard(), &reversed_cfg))
        .unwrap();
    let same = forward
        .window_maximum
        .levels
        .iter()
        .zip(reversed.window_maximum.levels.iter().rev())
        .chain(
            forward
                .at_mirroring_time
                .levels
                .iter()
                .zip(reversed.at_mirroring_time.levels.iter().rev()),
        )
        .all(|(a, b)| a == b);
    checks.push((
        "deterministic ensembles",
        same,
        "level order reversed, 1 thread vs pool".into(),
    ));

    let pass = checks.iter().all(|c| c.1);
    let detail: Vec<String> = checks
        .iter()
        .map(|(n, ok, d)| format!("{n}: {} ({d})", if *ok { "ok" } else { "NOT MET" }))
        .collect();
    report("A9", pass, detail.join("; "));
    assert!(pass);
}
