//! Run configuration: one JSON document, defaults filled in, dot-path overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use solitonchain_core::analytic::{effective_eta, mirroring_time};
use solitonchain_core::chain::{build_abc_chain, build_storage_chain, build_trimer};
use solitonchain_core::disorder::{DisorderConfig, DisorderKind};
use solitonchain_core::protocols::InjectionOrder;
use solitonchain_core::{ChainSpec, CouplingScale};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Dynamics,
    DisorderSweep,
    AsyncSweep,
    Storage,
    Spectrum,
    TrimerOracle,
}

impl Experiment {
    pub fn file_stem(self) -> &'static str {
        match self {
            Experiment::Dynamics => "dynamics",
            Experiment::DisorderSweep => "disorder",
            Experiment::AsyncSweep => "async",
            Experiment::Storage => "storage",
            Experiment::Spectrum => "spectrum",
            Experiment::TrimerOracle => "trimer_oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builder {
    /// Pick the chain the experiment is defined on.
    Auto,
    Abc,
    Storage,
    Trimer,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    AFirst,
    CFirst,
}

impl From<Order> for InjectionOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::AFirst => InjectionOrder::AFirst,
            Order::CFirst => InjectionOrder::CFirst,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    pub builder: Builder,
    pub big_delta: f64,
    pub delta: f64,
    pub extension_m: usize,
    pub spec_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    pub t_max: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSection {
    pub kind: DisorderKind,
    pub levels: Vec<f64>,
    pub n_realizations: usize,
    pub window: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsyncSection {
    pub delays: Vec<f64>,
    pub order: Order,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageSection {
    pub t_after: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub kind: DisorderKind,
    pub level: f64,
    pub n_realizations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    /// `null` means two mirroring periods.
    pub t_max: Option<f64>,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub base_seed: u64,
    pub output: PathBuf,
    pub chain: ChainSection,
    pub dynamics: DynamicsSection,
    pub disorder: DisorderSection,
    #[serde(rename = "async")]
    pub async_sweep: AsyncSection,
    pub storage: StorageSection,
    pub spectrum: SpectrumSection,
    pub trimer_oracle: OracleSection,
}

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let d = DisorderConfig::default();
        RunConfig {
            experiment,
            base_seed: d.base_seed,
            output: PathBuf::from("out"),
            chain: ChainSection {
                builder: Builder::Auto,
                big_delta: 1.0,
                delta: 0.1,
                extension_m: 0,
                spec_file: None,
            },
            dynamics: DynamicsSection {
                t_max: 500.0,
                dt: 0.25,
            },
            disorder: DisorderSection {
                kind: d.kind,
                levels: d.levels,
                n_realizations: d.n_realizations,
                window: d.window,
                dt: d.dt,
            },
            async_sweep: AsyncSection {
                delays: (0..=10).map(|k| k as f64 * 0.05).collect(),
                order: Order::AFirst,
            },
            storage: StorageSection {
                t_after: 500.0,
                dt: 0.25,
            },
            spectrum: SpectrumSection {
                kind: DisorderKind::Offdiagonal,
                level: 1.0,
                n_realizations: 200,
            },
            trimer_oracle: OracleSection {
                t_max: None,
                dt: 0.25,
            },
        }
    }

    pub fn scale(&self) -> Result<CouplingScale, CliError> {
        CouplingScale::new(self.chain.big_delta, self.chain.delta)
            .map_err(|e| CliError::Config(format!("chain: {e}")))
    }

    pub fn disorder_config(&self) -> DisorderConfig {
        DisorderConfig {
            kind: self.disorder.kind,
            levels: self.disorder.levels.clone(),
            n_realizations: self.disorder.n_realizations,
            window: self.disorder.window,
            dt: self.disorder.dt,
            base_seed: self.base_seed,
        }
    }
}

/// Everything derived from a validated config before any work starts.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub spec: ChainSpec,
    pub eta: f64,
    pub t_mirror: f64,
}

/// Defaults, then the config file, then `key=value` overrides, then validation.
pub fn load(
    experiment: Experiment,
    path: Option<&Path>,
    overrides: &[String],
) -> Result<RunConfig, CliError> {
    let mut doc = serde_json::to_value(RunConfig::defaults(experiment)).expect("serializable");
    if let Some(path) = path {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if !file.is_object() {
            return Err(CliError::Config("config must be a JSON object".into()));
        }
        merge(&mut doc, file);
    }
    for raw in overrides {
        apply_override(&mut doc, raw)?;
    }
    // The subcommand decides what runs.
    doc["experiment"] = serde_json::to_value(experiment).expect("serializable");
    parse(doc)
}

fn parse(doc: Value) -> Result<RunConfig, CliError> {
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{path}: {}", e.into_inner()))
    })
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// `a.b.c=value`; the value is JSON if it parses as such, a string otherwise.
pub fn apply_override(doc: &mut Value, raw: &str) -> Result<(), CliError> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{raw}` is not key=value")))?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(CliError::Config(format!(
            "override `{raw}` has an empty key segment"
        )));
    }
    let value = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.into()));
    let mut node = doc;
    let mut segments = key.split('.').peekable();
    while let Some(seg) = segments.next() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("{key}: `{seg}` is not inside an object")))?;
        if !obj.contains_key(seg) {
            return Err(CliError::Config(format!("{key}: unknown key `{seg}`")));
        }
        if segments.peek().is_none() {
            obj.insert(seg.to_string(), value);
            return Ok(());
        }
        node = obj.get_mut(seg).expect("checked");
    }
    unreachable!("split yields at least one segment")
}

/// Build the chain and check every experiment parameter without running anything.
pub fn resolve(mut config: RunConfig) -> Result<Resolved, CliError> {
    let scale = config.scale()?;
    let eta = effective_eta(scale).map_err(|e| CliError::Config(format!("chain: {e}")))?;
    let t_mirror = mirroring_time(eta).map_err(|e| CliError::Config(format!("chain: {e}")))?;

    if config.chain.builder == Builder::Auto {
        config.chain.builder = match config.experiment {
            Experiment::Storage => Builder::Storage,
            Experiment::TrimerOracle => Builder::Trimer,
            _ => Builder::Abc,
        };
    }
    let chain_err = |e: solitonchain_core::Error| CliError::Config(format!("chain: {e}"));
    let spec = match config.chain.builder {
        Builder::Abc => build_abc_chain(config.chain.extension_m, scale).map_err(chain_err)?,
        Builder::Storage => build_storage_chain(scale).map_err(chain_err)?,
        Builder::Trimer => build_trimer(eta).map_err(chain_err)?,
        Builder::File => {
            let path = config.chain.spec_file.as_ref().ok_or_else(|| {
                CliError::Config("chain.spec_file: required when chain.builder is \"file\"".into())
            })?;
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!(
                    "chain.spec_file: cannot read {}: {e}",
                    path.display()
                ))
            })?;
            ChainSpec::from_json(&text)
                .map_err(|e| CliError::Config(format!("chain.spec_file: {e}")))?
        }
        Builder::Auto => unreachable!("resolved above"),
    };

    if config.trimer_oracle.t_max.is_none() {
        config.trimer_oracle.t_max = Some(2.0 * t_mirror);
    }
    validate(&config, &spec)?;
    Ok(Resolved {
        config,
        spec,
        eta,
        t_mirror,
    })
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name}: must be positive, got {x}"
        )))
    }
}

fn non_negative(name: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name}: must be non-negative, got {x}"
        )))
    }
}

fn validate(c: &RunConfig, spec: &ChainSpec) -> Result<(), CliError> {
    let needs_ends = || {
        spec.injection_sites()
            .map(|_| ())
            .map_err(|e| CliError::Config(format!("chain: {e}")))
    };
    match c.experiment {
        Experiment::Dynamics => {
            non_negative("dynamics.t_max", c.dynamics.t_max)?;
            positive("dynamics.dt", c.dynamics.dt)?;
            needs_ends()?;
        }
        Experiment::DisorderSweep => {
            c.disorder_config()
                .validate()
                .map_err(|e| CliError::Config(format!("disorder: {e}")))?;
            needs_ends()?;
        }
        Experiment::AsyncSweep => {
            if c.async_sweep.delays.is_empty() {
                return Err(CliError::Config("async.delays: must not be empty".into()));
            }
            if let Some(bad) = c
                .async_sweep
                .delays
                .iter()
                .find(|d| !(0.0..=0.5).contains(*d))
            {
                return Err(CliError::Config(format!(
                    "async.delays: {bad} outside [0, 0.5]"
                )));
            }
            needs_ends()?;
        }
        Experiment::Storage => {
            non_negative("storage.t_after", c.storage.t_after)?;
            positive("storage.dt", c.storage.dt)?;
            needs_ends()?;
            if spec.site_b().is_none() {
                return Err(CliError::Config(
                    "chain: storage needs a centre defect site_b".into(),
                ));
            }
        }
        Experiment::Spectrum => {
            non_negative("spectrum.level", c.spectrum.level)?;
            if c.spectrum.n_realizations == 0 {
                return Err(CliError::Config(
                    "spectrum.n_realizations: must be at least 1".into(),
                ));
            }
        }
        Experiment::TrimerOracle => {
            non_negative("trimer_oracle.t_max", c.trimer_oracle.t_max.unwrap_or(0.0))?;
            positive("trimer_oracle.dt", c.trimer_oracle.dt)?;
        }
    }
    Ok(())
}

/// Object with the keys of `value`, for manifest output.
pub fn to_object(config: &RunConfig) -> Map<String, Value> {
    match serde_json::to_value(config).expect("serializable") {
        Value::Object(m) => m,
        _ => unreachable!("struct serializes to an object"),
    }
}
