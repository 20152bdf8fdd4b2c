//! Experiment dispatch and artifact writing.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use solitonchain_core::analytic::analytic_eof_profile;
use solitonchain_core::disorder::{run_scenarios, spectrum_statistics};
use solitonchain_core::output::{
    async_csv, disorder_csv, modes_csv, oracle_csv, spectrum_csv, trace_csv,
};
use solitonchain_core::protocols::{
    localized_mode_report, run_async_sweep, run_entangling, run_storage,
};
use solitonchain_core::Error;

use crate::config::{to_object, Experiment, Resolved};
use crate::CliError;

pub const MANIFEST: &str = "manifest.json";

/// Named CSV documents produced by one run, in write order.
pub type Artifacts = Vec<(String, String)>;

fn core_err(e: Error) -> CliError {
    match e {
        Error::Parameter { .. } | Error::SiteOutOfRange { .. } | Error::Domain(_) => {
            CliError::Config(e.to_string())
        }
        Error::Capacity { .. } | Error::BasisMismatch(_) | Error::Numerical(_) => {
            CliError::Numerical(e.to_string())
        }
    }
}

fn check_finite(name: &str, csv: &str) -> Result<(), CliError> {
    if csv.contains("NaN") || csv.contains("inf") {
        return Err(CliError::Numerical(format!(
            "{name}: non-finite value in output"
        )));
    }
    Ok(())
}

/// Run the experiment entirely in memory.
pub fn execute(r: &Resolved) -> Result<Artifacts, CliError> {
    let c = &r.config;
    let stem = c.experiment.file_stem();
    let mut out: Artifacts = Vec::new();
    match c.experiment {
        Experiment::Dynamics => {
            let trace = run_entangling(&r.spec, c.dynamics.t_max, c.dynamics.dt)
                .map_err(core_err)?
                .with_mirroring_time(r.t_mirror);
            out.push((format!("{stem}.csv"), trace_csv(&trace)));
        }
        Experiment::DisorderSweep => {
            let sweep =
                run_scenarios(&r.spec, c.scale()?, &c.disorder_config()).map_err(core_err)?;
            out.push((
                format!("{stem}.csv"),
                disorder_csv(&[&sweep.at_mirroring_time, &sweep.window_maximum]),
            ));
        }
        Experiment::AsyncSweep => {
            let points = run_async_sweep(
                &r.spec,
                r.t_mirror,
                &c.async_sweep.delays,
                c.async_sweep.order.into(),
            )
            .map_err(core_err)?;
            out.push((format!("{stem}.csv"), async_csv(&points)));
        }
        Experiment::Storage => {
            let trace = run_storage(&r.spec, r.t_mirror, c.storage.t_after, c.storage.dt)
                .map_err(core_err)?;
            let modes = localized_mode_report(&r.spec).map_err(core_err)?;
            out.push((format!("{stem}.csv"), trace_csv(&trace)));
            out.push(("modes.csv".into(), modes_csv(&modes)));
        }
        Experiment::Spectrum => {
            let stats = spectrum_statistics(
                &r.spec,
                c.chain.delta,
                c.spectrum.kind,
                c.spectrum.level,
                c.spectrum.n_realizations,
                c.base_seed,
            )
            .map_err(core_err)?;
            out.push((format!("{stem}.csv"), spectrum_csv(&stats)));
        }
        Experiment::TrimerOracle => {
            let t_max = c.trimer_oracle.t_max.expect("resolved");
            let trace = run_entangling(&r.spec, t_max, c.trimer_oracle.dt).map_err(core_err)?;
            let analytic = trace
                .times
                .iter()
                .map(|&t| analytic_eof_profile(r.eta, t))
                .collect::<Result<Vec<_>, _>>()
                .map_err(core_err)?;
            out.push((
                format!("{stem}.csv"),
                oracle_csv(&trace.times, &analytic, &trace.eof),
            ));
        }
    }
    for (name, csv) in &out {
        check_finite(name, csv)?;
    }
    Ok(out)
}

pub fn manifest(r: &Resolved, artifacts: &Artifacts) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": r.config.experiment,
        "seed": r.config.base_seed,
        "eta": r.eta,
        "t_mirror": r.t_mirror,
        "outputs": artifacts.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
        "config": to_object(&r.config),
    })
}

/// Write every CSV and then the manifest into `dir`.
pub fn write_artifacts(
    dir: &Path,
    r: &Resolved,
    artifacts: &Artifacts,
) -> Result<Vec<PathBuf>, CliError> {
    let io = |p: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", p.display()));
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    for (name, body) in artifacts {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    let path = dir.join(MANIFEST);
    let mut text = serde_json::to_string_pretty(&manifest(r, artifacts)).expect("serializable");
    text.push('\n');
    fs::write(&path, text).map_err(|e| io(&path, e))?;
    written.push(path);
    Ok(written)
}
