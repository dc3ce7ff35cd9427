//! Parameter sweeps and the row schema shared by every dataset.

use serde::{Deserialize, Serialize};

use crate::analytic::{self, Method, OutageEstimate};
use crate::error::{Error, Result};
use crate::evt;
use crate::experiments::config::{ExperimentConfig, SweptParameter, TargetSpec};
use crate::model::{threshold_x, EhModel};
use crate::montecarlo::{simulate_outage_with_workers, Target, TrialConfig};

/// One dataset line. Column order is the on-disk CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub scheme: String,
    pub k: usize,
    pub j: Option<usize>,
    #[serde(rename = "M")]
    pub m: usize,
    pub pt_dbm: f64,
    pub t1: f64,
    pub q_db: f64,
    pub sigma_n_dbm: f64,
    pub sigma_e2: f64,
    pub model: EhModel,
    pub method: Method,
    pub x_threshold: f64,
    /// Empty when the evaluator failed; the reason is in the metadata.
    pub outage: Option<f64>,
    pub stderr: Option<f64>,
}

/// Evaluator failure attached to a row index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowError {
    pub row: usize,
    pub message: String,
}

/// A sweep: every target under every method at every grid value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweptParameter,
    pub grid: Vec<f64>,
    pub base: ExperimentConfig,
    pub targets: Vec<TargetSpec>,
    pub methods: Vec<Method>,
    /// Overrides `base.trials` for Monte Carlo rows.
    pub mc_trials: Option<u64>,
}

impl SweepSpec {
    /// Sweep of the config's own target and method over its `[sweep]` grid.
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let section = cfg
            .sweep
            .as_ref()
            .ok_or_else(|| Error::invalid("config has no [sweep] section"))?;
        let mut base = cfg.clone();
        base.sweep = None;
        Ok(SweepSpec {
            parameter: section.parameter,
            grid: section.grid()?,
            targets: vec![cfg.target()],
            methods: vec![cfg.method],
            base,
            mc_trials: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::invalid("sweep grid is empty"));
        }
        if self.targets.is_empty() || self.methods.is_empty() {
            return Err(Error::invalid("sweep needs at least one target and one method"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub parameter: SweptParameter,
    pub grid: Vec<f64>,
    pub base: ExperimentConfig,
    pub targets: Vec<TargetSpec>,
    pub methods: Vec<Method>,
    pub mc_trials: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<Row>,
    pub errors: Vec<RowError>,
    pub metadata: Metadata,
}

/// Evaluates one target with one method at one configuration point.
/// Monte Carlo runs on the current worker pool.
pub fn evaluate(cfg: &ExperimentConfig, target: &TargetSpec, method: Method, trials: u64) -> Result<OutageEstimate> {
    let params = cfg.params()?;
    let x = threshold_x(&params);
    let pair = target.pair_spec()?;
    if method != Method::MonteCarlo && cfg.sigma_e2 != 0.0 {
        return Err(Error::invalid(format!(
            "{method} assumes perfect channel knowledge; estimation error needs Monte Carlo"
        )));
    }
    match (method, pair) {
        (Method::Analytic, None) => analytic::outage(x, &target.scheme_spec(), &params),
        (Method::Analytic, Some(p)) => analytic::outage_pair(x, &p, &params, target.model),
        (Method::HighSnr, None) => match target.model {
            EhModel::NonLinear => analytic::outage_high_snr(x, &target.scheme_spec(), &params),
            // Without saturation, outage vanishes as the power grows.
            EhModel::Linear => {
                target.scheme_spec().validate(params.num_devices())?;
                Ok(OutageEstimate::exact(
                    if x.is_infinite() { 1.0 } else { 0.0 },
                    Method::HighSnr,
                ))
            }
        },
        (Method::HighSnr, Some(p)) => match target.model {
            EhModel::NonLinear => analytic::outage_pair_high_snr(x, &p, &params),
            EhModel::Linear => Err(Error::invalid(
                "pair floor is only defined for the saturating harvester",
            )),
        },
        (Method::Evt, None) => evt::outage_evt(x, &target.scheme_spec(), &params),
        (Method::Evt, Some(p)) => evt::outage_evt_pair(x, &p, &params, target.model),
        (Method::MonteCarlo, pair) => {
            let t = match pair {
                None => Target::Single(target.scheme_spec()),
                Some(pair) => Target::Pair {
                    pair,
                    model: target.model,
                },
            };
            let trial = TrialConfig::new(t, params, trials, cfg.seed).with_estimation_error(cfg.sigma_e2);
            simulate_outage_with_workers(&trial, None)
        }
    }
}

/// Row skeleton for `cfg`, with the outage left empty.
pub fn row_for(cfg: &ExperimentConfig, target: &TargetSpec, method: Method) -> Row {
    let x = cfg.params().map(|p| threshold_x(&p)).unwrap_or(f64::NAN);
    Row {
        scheme: target.scheme.as_str().to_string(),
        k: target.k,
        j: target.j,
        m: cfg.m,
        pt_dbm: cfg.pt_dbm,
        t1: cfg.t1,
        q_db: cfg.q_db,
        sigma_n_dbm: cfg.noise_dbm,
        sigma_e2: cfg.sigma_e2,
        model: target.model,
        method,
        x_threshold: x,
        outage: None,
        stderr: None,
    }
}

fn point_rows(spec: &SweepSpec, value: f64, trials: u64) -> Vec<(Row, Option<String>)> {
    let mut out = Vec::with_capacity(spec.targets.len() * spec.methods.len());
    for target in &spec.targets {
        for &method in &spec.methods {
            let cfg = spec.base.with_value(spec.parameter, value);
            let mut t = *target;
            if let Ok(c) = &cfg {
                t.k = if spec.parameter == SweptParameter::K { c.k } else { t.k };
                t.j = if spec.parameter == SweptParameter::J { c.j } else { t.j };
            }
            let (row, err) = match cfg {
                Err(e) => {
                    let mut row = row_for(&spec.base, &t, method);
                    row.outage = None;
                    (row, Some(e.to_string()))
                }
                Ok(cfg) => {
                    let mut row = row_for(&cfg, &t, method);
                    match evaluate(&cfg, &t, method, trials) {
                        Ok(est) => {
                            row.outage = Some(est.value);
                            row.stderr = est.stderr;
                            (row, None)
                        }
                        Err(e) => (row, Some(e.to_string())),
                    }
                }
            };
            out.push((row, err));
        }
    }
    out
}

/// Runs `spec`. Evaluator failures become rows with an empty outage and an
/// entry in `errors`; the sweep always completes. Rows are ordered by grid
/// index, then target, then method, regardless of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let trials = spec.mc_trials.unwrap_or(spec.base.trials);
    let per_point = map_points(&spec.grid, |&v| point_rows(spec, v, trials));
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (row, err) in per_point.into_iter().flatten() {
        if let Some(message) = err {
            log::warn!("row {}: {message}", rows.len());
            errors.push(RowError {
                row: rows.len(),
                message,
            });
        }
        rows.push(row);
    }
    Ok(SweepResult {
        rows,
        errors,
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            parameter: spec.parameter,
            grid: spec.grid.clone(),
            base: spec.base.clone(),
            targets: spec.targets.clone(),
            methods: spec.methods.clone(),
            mc_trials: trials,
            seed: spec.base.seed,
            notes: Vec::new(),
        },
    })
}

#[cfg(feature = "parallel")]
fn map_points<T: Send>(grid: &[f64], f: impl Fn(&f64) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    grid.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_points<T>(grid: &[f64], f: impl Fn(&f64) -> T) -> Vec<T> {
    grid.iter().map(f).collect()
}

/// Runs `f` on a pool capped at `workers` threads, or on the default pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    #[cfg(feature = "parallel")]
    if let Some(n) = workers {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {n} workers: {e}")))?;
        return Ok(pool.install(f));
    }
    let _ = workers;
    Ok(f())
}
