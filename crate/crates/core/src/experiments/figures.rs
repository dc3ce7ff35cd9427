//! Datasets behind each evaluation figure, one CSV per figure.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytic::{Method, PairScheme, Scheme};
use crate::error::{Error, Result};
use crate::experiments::config::{arithmetic_grid, ExperimentConfig, SweptParameter, TargetSpec};
use crate::experiments::io::write_dataset;
use crate::experiments::optimize::{find_optimal_t1, T1Optimum};
use crate::experiments::sweep::{run_sweep, Metadata, Row, RowError, SweepSpec};
use crate::model::EhModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            FigureId::Fig2a => "outage vs transmit power, k = 2, M = 5",
            FigureId::Fig2b => "outage vs transmit power, k = 4, M = 5",
            FigureId::Fig3a => "outage vs k, M = 10, Pt = -10 dBm",
            FigureId::Fig3b => "outage vs k, M = 20, Pt = -10 dBm",
            FigureId::Fig4 => "SBS pair outage vs j, k in {1, 2}, M in {10, 20, 30}, Q = -4 dB, Pt = -40 dBm",
            FigureId::Fig5 => "extreme value approximation vs M, k in {1, 2}, Pt = -40 dBm",
            FigureId::Fig6 => "outage vs t1 under estimation error, k = 2, Pt = -10 dBm",
        }
    }
}

impl std::fmt::Display for FigureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase();
        let key = key.trim_start_matches("fig");
        FigureId::ALL
            .into_iter()
            .find(|f| f.as_str().trim_start_matches("fig") == key)
            .ok_or_else(|| Error::invalid(format!("unknown figure '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    /// Monte Carlo trials per row; 0 drops the simulated rows.
    pub mc_trials: u64,
    pub seed: u64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            mc_trials: 100_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureMetadata {
    pub figure: FigureId,
    pub description: String,
    pub options: FigureOptions,
    pub sweeps: Vec<Metadata>,
    pub errors: Vec<RowError>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureDataset {
    pub rows: Vec<Row>,
    pub metadata: FigureMetadata,
}

fn all_schemes(k: usize) -> Vec<TargetSpec> {
    EhModel::ALL
        .into_iter()
        .flat_map(|model| Scheme::ALL.into_iter().map(move |s| TargetSpec::single(s, k, model)))
        .collect()
}

fn with_mc(mut methods: Vec<Method>, opts: &FigureOptions) -> Vec<Method> {
    if opts.mc_trials > 0 {
        methods.push(Method::MonteCarlo);
    }
    methods
}

/// The sweeps making up a figure, with notes on any grid choices.
pub fn figure_sweeps(id: FigureId, opts: &FigureOptions) -> Result<(Vec<SweepSpec>, Vec<String>)> {
    let base = ExperimentConfig {
        seed: opts.seed,
        trials: opts.mc_trials,
        ..ExperimentConfig::default()
    };
    let sweep = |parameter, grid, base: ExperimentConfig, targets, methods| SweepSpec {
        parameter,
        grid,
        base,
        targets,
        methods,
        mc_trials: Some(opts.mc_trials),
    };
    let mut notes = Vec::new();
    let sweeps = match id {
        FigureId::Fig2a | FigureId::Fig2b => {
            let k = if id == FigureId::Fig2a { 2 } else { 4 };
            notes.push("transmit power grid -40..20 dBm in 5 dB steps".into());
            vec![sweep(
                SweptParameter::PtDbm,
                arithmetic_grid(-40.0, 20.0, 5.0)?,
                base,
                all_schemes(k),
                with_mc(vec![Method::Analytic, Method::HighSnr], opts),
            )]
        }
        FigureId::Fig3a | FigureId::Fig3b => {
            let m = if id == FigureId::Fig3a { 10 } else { 20 };
            notes.push(format!("k grid 1..{m}"));
            vec![sweep(
                SweptParameter::K,
                arithmetic_grid(1.0, m as f64, 1.0)?,
                ExperimentConfig { m, ..base },
                all_schemes(1),
                with_mc(vec![Method::Analytic], opts),
            )]
        }
        FigureId::Fig4 => {
            notes.push("pair outage means both scheduled devices are below the SINR threshold".into());
            notes.push("evt rows are the product of the two per-device outage probabilities".into());
            [10usize, 20, 30]
                .into_iter()
                .map(|m| {
                    Ok(sweep(
                        SweptParameter::J,
                        arithmetic_grid(3.0, m as f64, 1.0)?,
                        ExperimentConfig {
                            m,
                            pt_dbm: -40.0,
                            q_db: -4.0,
                            ..base.clone()
                        },
                        vec![
                            TargetSpec::pair(PairScheme::Sbs, 1, 3, EhModel::NonLinear),
                            TargetSpec::pair(PairScheme::Sbs, 2, 3, EhModel::NonLinear),
                        ],
                        with_mc(vec![Method::Analytic, Method::Evt], opts),
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
        FigureId::Fig5 => {
            notes.push("M grid 10..100 in steps of 10".into());
            let targets = [1, 2]
                .into_iter()
                .flat_map(|k| {
                    [Scheme::Sbs, Scheme::Ebs, Scheme::Ibs, Scheme::Mms]
                        .into_iter()
                        .map(move |s| TargetSpec::single(s, k, EhModel::NonLinear))
                })
                .collect();
            vec![sweep(
                SweptParameter::M,
                arithmetic_grid(10.0, 100.0, 10.0)?,
                ExperimentConfig { pt_dbm: -40.0, ..base },
                targets,
                with_mc(vec![Method::Evt, Method::Analytic], opts),
            )]
        }
        FigureId::Fig6 => {
            notes.push("t1 grid 0.05..0.95 in steps of 0.05; estimation error variances 0, 0.1, 0.3".into());
            let targets: Vec<TargetSpec> = Scheme::ALL
                .into_iter()
                .map(|s| TargetSpec::single(s, 2, EhModel::NonLinear))
                .collect();
            let grid = arithmetic_grid(0.05, 0.95, 0.05)?;
            let mut v = vec![sweep(
                SweptParameter::T1,
                grid.clone(),
                base.clone(),
                targets.clone(),
                with_mc(vec![Method::Analytic], opts),
            )];
            if opts.mc_trials > 0 {
                for sigma_e2 in [0.1, 0.3] {
                    v.push(sweep(
                        SweptParameter::T1,
                        grid.clone(),
                        ExperimentConfig {
                            sigma_e2,
                            ..base.clone()
                        },
                        targets.clone(),
                        vec![Method::MonteCarlo],
                    ));
                }
            }
            v
        }
    };
    Ok((sweeps, notes))
}

/// Computes the dataset of one figure.
pub fn build_figure(id: FigureId, opts: &FigureOptions) -> Result<FigureDataset> {
    let (sweeps, mut notes) = figure_sweeps(id, opts)?;
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut metas = Vec::new();
    for spec in &sweeps {
        let res = run_sweep(spec)?;
        let offset = rows.len();
        errors.extend(res.errors.into_iter().map(|e| RowError {
            row: e.row + offset,
            message: e.message,
        }));
        rows.extend(res.rows);
        metas.push(res.metadata);
    }
    if id == FigureId::Fig6 {
        let params = sweeps[0].base.params()?;
        for t in &sweeps[0].targets {
            if t.scheme == Scheme::Rs {
                continue;
            }
            let T1Optimum { t_star, outage, .. } = find_optimal_t1(&t.scheme_spec(), &params, 1e-4)?;
            notes.push(format!(
                "optimal t1 for {} k={}: {t_star:.4} (outage {outage:.4e})",
                t.scheme, t.k
            ));
        }
    }
    Ok(FigureDataset {
        rows,
        metadata: FigureMetadata {
            figure: id,
            description: id.description().to_string(),
            options: *opts,
            sweeps: metas,
            errors,
            notes,
        },
    })
}

/// Writes `<dir>/<figure>.csv` and its metadata sidecar; returns the CSV path.
pub fn reproduce_figure(id: FigureId, dir: &Path, opts: &FigureOptions) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let data = build_figure(id, opts)?;
    let path = dir.join(format!("{}.csv", id.as_str()));
    write_dataset(&path, &data.rows, &data.metadata)?;
    Ok(path)
}
