//! Experiment configuration: a TOML file layered over built-in defaults,
//! with command-line overrides on top.

use serde::{Deserialize, Serialize};

use crate::analytic::{Method, PairScheme, PairSpec, Scheme, SchemeSpec};
use crate::error::{Error, Result};
use crate::model::{dbm_to_watts, EhModel, RectennaParams, SystemParams};

/// Rectenna curve-fit constants as they appear in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectennaConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for RectennaConfig {
    fn default() -> Self {
        let r = RectennaParams::default();
        RectennaConfig {
            a: r.a(),
            b: r.b(),
            c: r.c(),
        }
    }
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    PtDbm,
    K,
    J,
    M,
    T1,
    SigmaE2,
}

impl SweptParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweptParameter::PtDbm => "pt_dbm",
            SweptParameter::K => "k",
            SweptParameter::J => "j",
            SweptParameter::M => "m",
            SweptParameter::T1 => "t1",
            SweptParameter::SigmaE2 => "sigma_e2",
        }
    }

    fn is_integral(&self) -> bool {
        matches!(self, SweptParameter::K | SweptParameter::J | SweptParameter::M)
    }
}

impl std::str::FromStr for SweptParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "pt_dbm" | "pt" => Ok(SweptParameter::PtDbm),
            "k" => Ok(SweptParameter::K),
            "j" => Ok(SweptParameter::J),
            "m" => Ok(SweptParameter::M),
            "t1" => Ok(SweptParameter::T1),
            "sigma_e2" => Ok(SweptParameter::SigmaE2),
            other => Err(Error::invalid(format!("unknown sweep parameter '{other}'"))),
        }
    }
}

/// Sweep grid, either listed or as an inclusive arithmetic range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweptParameter,
    #[serde(default)]
    pub values: Vec<f64>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
}

impl SweepSection {
    pub fn grid(&self) -> Result<Vec<f64>> {
        match (self.start, self.stop, self.step) {
            (None, None, None) if !self.values.is_empty() => Ok(self.values.clone()),
            (Some(a), Some(b), Some(h)) if self.values.is_empty() => arithmetic_grid(a, b, h),
            _ => Err(Error::invalid(
                "a sweep needs either `values` or all of `start`, `stop`, `step`",
            )),
        }
    }
}

/// Inclusive grid `a, a + h, ...` up to `b`, built by index to avoid drift.
pub fn arithmetic_grid(a: f64, b: f64, h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid(format!("bad grid {a}:{b}:{h}")));
    }
    let n = ((b - a) / h + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a + i as f64 * h).collect())
}

/// One experiment point, in configuration units (dBm, dB).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub k: usize,
    /// Second order index; set for pair selection.
    pub j: Option<usize>,
    pub model: EhModel,
    pub method: Method,
    pub pt_dbm: f64,
    pub t1: f64,
    pub q_db: f64,
    pub noise_dbm: f64,
    pub m: usize,
    pub sigma_e2: f64,
    pub trials: u64,
    pub seed: u64,
    pub rectenna: RectennaConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scheme: Scheme::Sbs,
            k: 2,
            j: None,
            model: EhModel::NonLinear,
            method: Method::Analytic,
            pt_dbm: -10.0,
            t1: 0.5,
            q_db: 0.0,
            noise_dbm: -50.0,
            m: 5,
            sigma_e2: 0.0,
            trials: 1_000_000,
            seed: 1,
            rectenna: RectennaConfig::default(),
            sweep: None,
        }
    }
}

/// Optional values from the command line; `Some` wins over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub scheme: Option<Scheme>,
    pub k: Option<usize>,
    pub j: Option<usize>,
    pub model: Option<EhModel>,
    pub method: Option<Method>,
    pub pt_dbm: Option<f64>,
    pub t1: Option<f64>,
    pub q_db: Option<f64>,
    pub noise_dbm: Option<f64>,
    pub m: Option<usize>,
    pub sigma_e2: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    pub fn apply(&mut self, o: &ConfigOverrides) {
        macro_rules! take {
            ($($f:ident),*) => {$(if let Some(v) = o.$f { self.$f = v; })*};
        }
        take!(scheme, k, model, method, pt_dbm, t1, q_db, noise_dbm, m, sigma_e2, trials, seed);
        if o.j.is_some() {
            self.j = o.j;
        }
    }

    pub fn params(&self) -> Result<SystemParams> {
        let rect = RectennaParams::new(self.rectenna.a, self.rectenna.b, self.rectenna.c)?;
        let q = crate::model::db_to_linear(self.q_db);
        SystemParams::new(
            rect,
            dbm_to_watts(self.pt_dbm),
            dbm_to_watts(self.noise_dbm),
            self.t1,
            q,
            self.m,
        )
    }

    pub fn target(&self) -> TargetSpec {
        TargetSpec {
            scheme: self.scheme,
            k: self.k,
            j: self.j,
            model: self.model,
        }
    }

    /// Copy with one swept parameter set to `v`.
    pub fn with_value(&self, parameter: SweptParameter, v: f64) -> Result<Self> {
        if parameter.is_integral() && (v.fract() != 0.0 || v < 0.0) {
            return Err(Error::invalid(format!(
                "{} must be a non-negative integer, got {v}",
                parameter.as_str()
            )));
        }
        let mut c = self.clone();
        match parameter {
            SweptParameter::PtDbm => c.pt_dbm = v,
            SweptParameter::K => c.k = v as usize,
            SweptParameter::J => c.j = Some(v as usize),
            SweptParameter::M => c.m = v as usize,
            SweptParameter::T1 => c.t1 = v,
            SweptParameter::SigmaE2 => c.sigma_e2 = v,
        }
        Ok(c)
    }
}

/// The scheduled device(s): a single-device rule, or a pair when `j` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TargetSpec {
    pub scheme: Scheme,
    pub k: usize,
    pub j: Option<usize>,
    pub model: EhModel,
}

impl TargetSpec {
    pub fn single(scheme: Scheme, k: usize, model: EhModel) -> Self {
        TargetSpec {
            scheme,
            k,
            j: None,
            model,
        }
    }

    pub fn pair(scheme: PairScheme, k: usize, j: usize, model: EhModel) -> Self {
        let scheme = match scheme {
            PairScheme::Rs => Scheme::Rs,
            PairScheme::Sbs => Scheme::Sbs,
        };
        TargetSpec {
            scheme,
            k,
            j: Some(j),
            model,
        }
    }

    pub fn scheme_spec(&self) -> SchemeSpec {
        SchemeSpec::new(self.scheme, self.k, self.model)
    }

    pub fn pair_spec(&self) -> Result<Option<PairSpec>> {
        let Some(j) = self.j else { return Ok(None) };
        let scheme = match self.scheme {
            Scheme::Rs => PairScheme::Rs,
            Scheme::Sbs => PairScheme::Sbs,
            other => {
                return Err(Error::invalid(format!(
                    "pair selection supports rs and sbs, not {other}"
                )))
            }
        };
        Ok(Some(PairSpec::new(scheme, self.k, j)))
    }
}
