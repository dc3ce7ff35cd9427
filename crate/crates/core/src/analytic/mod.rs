//! Exact finite-M outage probabilities for every selection scheme, both
//! harvester models, and the high-SNR floors they saturate to.

pub mod forms;
pub mod geometry;
mod pair;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EhModel, SystemParams};
use crate::special::{binomial, reg_inc_beta, CompensatedSum};

use forms::{guarded, SeriesValue};
use geometry::{LinkRegime, ParentSnr};

pub use pair::{outage_pair, outage_pair_high_snr, pair_marginals, PairMarginals};

/// Single-device selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Random selection.
    Rs,
    /// Rank by end-to-end SNR.
    Sbs,
    /// Rank by harvested energy (downlink gain).
    Ebs,
    /// Rank by uplink gain.
    Ibs,
    /// Rank by the weaker of the two links.
    Mms,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::Rs, Scheme::Sbs, Scheme::Ebs, Scheme::Ibs, Scheme::Mms];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Rs => "rs",
            Scheme::Sbs => "sbs",
            Scheme::Ebs => "ebs",
            Scheme::Ibs => "ibs",
            Scheme::Mms => "mms",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rs" => Ok(Scheme::Rs),
            "sbs" => Ok(Scheme::Sbs),
            "ebs" => Ok(Scheme::Ebs),
            "ibs" => Ok(Scheme::Ibs),
            "mms" => Ok(Scheme::Mms),
            other => Err(Error::invalid(format!("unknown scheme '{other}'"))),
        }
    }
}

/// A selection rule, the order index of the device it schedules, and the
/// harvester model. `k = 1` is the best device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub scheme: Scheme,
    pub k: usize,
    pub model: EhModel,
}

impl SchemeSpec {
    pub fn new(scheme: Scheme, k: usize, model: EhModel) -> Self {
        SchemeSpec { scheme, k, model }
    }

    pub fn validate(&self, num_devices: usize) -> Result<()> {
        if self.k == 0 || self.k > num_devices {
            return Err(Error::invalid(format!(
                "order index k={} outside [1, M={num_devices}]",
                self.k
            )));
        }
        Ok(())
    }
}

/// Rule for scheduling two devices at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairScheme {
    Rs,
    Sbs,
}

impl PairScheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            PairScheme::Rs => "rs",
            PairScheme::Sbs => "sbs",
        }
    }
}

/// Joint selection of the k-th and j-th best devices, `k < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairSpec {
    pub scheme: PairScheme,
    pub k: usize,
    pub j: usize,
}

impl PairSpec {
    pub fn new(scheme: PairScheme, k: usize, j: usize) -> Self {
        PairSpec { scheme, k, j }
    }

    pub fn validate(&self, num_devices: usize) -> Result<()> {
        if !(1 <= self.k && self.k < self.j && self.j <= num_devices) {
            return Err(Error::invalid(format!(
                "pair needs 1 <= k < j <= M, got k={}, j={}, M={num_devices}",
                self.k, self.j
            )));
        }
        Ok(())
    }
}

/// How an outage value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    #[serde(rename = "highsnr")]
    HighSnr,
    Evt,
    #[serde(rename = "mc")]
    MonteCarlo,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Analytic, Method::HighSnr, Method::Evt, Method::MonteCarlo];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::HighSnr => "highsnr",
            Method::Evt => "evt",
            Method::MonteCarlo => "mc",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Method::Analytic),
            "highsnr" | "high-snr" => Ok(Method::HighSnr),
            "evt" => Ok(Method::Evt),
            "mc" | "montecarlo" | "monte-carlo" => Ok(Method::MonteCarlo),
            other => Err(Error::invalid(format!("unknown method '{other}'"))),
        }
    }
}

/// An outage probability with its provenance. `stderr` is present only for
/// Monte Carlo estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub value: f64,
    pub method: Method,
    pub stderr: Option<f64>,
}

impl OutageEstimate {
    /// Deterministic estimate; float noise outside `[0, 1]` is clamped.
    pub fn exact(value: f64, method: Method) -> Self {
        debug_assert!(
            (-1e-9..=1.0 + 1e-9).contains(&value),
            "{method} outage {value} left [0, 1] by more than rounding"
        );
        OutageEstimate {
            value: value.clamp(0.0, 1.0),
            method,
            stderr: None,
        }
    }

    pub fn monte_carlo(value: f64, stderr: f64) -> Self {
        OutageEstimate {
            value,
            method: Method::MonteCarlo,
            stderr: Some(stderr),
        }
    }
}

pub(crate) fn check_threshold(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("SNR threshold must be non-negative, got {x}")));
    }
    Ok(())
}

/// Evaluates `spec` with the exact finite-M expressions.
pub fn outage(x: f64, spec: &SchemeSpec, params: &SystemParams) -> Result<OutageEstimate> {
    match spec.scheme {
        Scheme::Rs => {
            spec.validate(params.num_devices())?;
            outage_rs(x, params, spec.model)
        }
        Scheme::Sbs => outage_sbs(x, spec, params),
        Scheme::Ebs => outage_ebs(x, spec, params),
        Scheme::Ibs => outage_ibs(x, spec, params),
        Scheme::Mms => outage_mms(x, spec, params),
    }
}

/// The `P_t -> inf` floor of `spec` (the harvester model is irrelevant there).
pub fn outage_high_snr(x: f64, spec: &SchemeSpec, params: &SystemParams) -> Result<OutageEstimate> {
    spec.validate(params.num_devices())?;
    match spec.scheme {
        Scheme::Rs => outage_rs_high_snr(x, params),
        Scheme::Sbs => outage_sbs_high_snr(x, spec.k, params),
        Scheme::Ebs => outage_ebs_high_snr(x, params),
        Scheme::Ibs => outage_ibs_high_snr(x, spec.k, params),
        Scheme::Mms => outage_mms_high_snr(x, spec.k, params),
    }
}

fn trivial(x: f64, method: Method) -> Option<OutageEstimate> {
    if x == 0.0 {
        Some(OutageEstimate::exact(0.0, method))
    } else if x.is_infinite() {
        Some(OutageEstimate::exact(1.0, method))
    } else {
        None
    }
}

/// Random selection: the parent SNR CDF `1 - e^{-r} u K1(u)`, `u = 2 sqrt(kappa)`.
pub fn outage_rs(x: f64, params: &SystemParams, model: EhModel) -> Result<OutageEstimate> {
    check_threshold(x)?;
    let parent = ParentSnr::new(params, model.into());
    Ok(OutageEstimate::exact(parent.cdf(x), Method::Analytic))
}

/// Random selection floor `1 - e^{-r}`.
pub fn outage_rs_high_snr(x: f64, params: &SystemParams) -> Result<OutageEstimate> {
    check_threshold(x)?;
    let parent = ParentSnr::new(params, LinkRegime::Saturated);
    Ok(OutageEstimate::exact(parent.cdf(x), Method::HighSnr))
}

fn sbs_value(x: f64, k: usize, params: &SystemParams, regime: LinkRegime) -> Result<f64> {
    let parent = ParentSnr::new(params, regime);
    let m = params.num_devices();
    reg_inc_beta(parent.cdf(x), (m - k + 1) as f64, k as f64)
}

/// SNR-based selection: `I_{F(x)}(M - k + 1, k)`.
pub fn outage_sbs(x: f64, spec: &SchemeSpec, params: &SystemParams) -> Result<OutageEstimate> {
    check_threshold(x)?;
    spec.validate(params.num_devices())?;
    if let Some(t) = trivial(x, Method::Analytic) {
        return Ok(t);
    }
    let v = sbs_value(x, spec.k, params, spec.model.into())?;
    Ok(OutageEstimate::exact(v, Method::Analytic))
}

/// SNR-based selection floor: the same order statistic of the saturated
/// parent `1 - e^{-r}`.
pub fn outage_sbs_high_snr(x: f64, k: usize, params: &SystemParams) -> Result<OutageEstimate> {
    check_threshold(x)?;
    SchemeSpec::new(Scheme::Sbs, k, EhModel::NonLinear).validate(params.num_devices())?;
    if let Some(t) = trivial(x, Method::HighSnr) {
        return Ok(t);
    }
    Ok(OutageEstimate::exact(
        sbs_value(x, k, params, LinkRegime::Saturated)?,
        Method::HighSnr,
    ))
}

fn single(
    x: f64,
    spec: &SchemeSpec,
    params: &SystemParams,
    closed: fn(f64, usize, &SystemParams, LinkRegime) -> Result<SeriesValue>,
    integral: fn(f64, usize, &SystemParams, LinkRegime) -> Result<f64>,
) -> Result<OutageEstimate> {
    check_threshold(x)?;
    spec.validate(params.num_devices())?;
    if let Some(t) = trivial(x, Method::Analytic) {
        return Ok(t);
    }
    let regime = spec.model.into();
    let v = guarded(
        || closed(x, spec.k, params, regime),
        || integral(x, spec.k, params, regime),
        params.num_devices(),
    )?;
    Ok(OutageEstimate::exact(v, Method::Analytic))
}

/// Energy-based selection.
pub fn outage_ebs(x: f64, spec: &SchemeSpec, params: &SystemParams) -> Result<OutageEstimate> {
    single(
        x,
        spec,
        params,
        |x, k, p, g| Ok(forms::ebs_closed(x, k, p, g)),
        forms::ebs_integral,
    )
}

/// Energy-based selection floor. The selected downlink gain no longer
/// matters once the rectenna saturates, so this is the random-selection
/// floor for every `k`.
pub fn outage_ebs_high_snr(x: f64, params: &SystemParams) -> Result<OutageEstimate> {
    outage_rs_high_snr(x, params)
}

/// Uplink-channel-based selection.
pub fn outage_ibs(x: f64, spec: &SchemeSpec, params: &SystemParams) -> Result<OutageEstimate> {
    single(
        x,
        spec,
        params,
        |x, k, p, g| Ok(forms::ibs_closed(x, k, p, g)),
        forms::ibs_integral,
    )
}

/// Uplink-channel-based selection floor
/// `1 - k C(M,k) sum_m (-1)^m C(M-k,m) e^{-(k+m) r} / (k+m)`.
///
/// Algebraically this is `I_{1-e^{-r}}(M-k+1, k)`, the SNR-based floor; the
/// incomplete-beta route is used when the sum loses precision.
pub fn outage_ibs_high_snr(x: f64, k: usize, params: &SystemParams) -> Result<OutageEstimate> {
    check_threshold(x)?;
    let m_total = params.num_devices();
    SchemeSpec::new(Scheme::Ibs, k, EhModel::NonLinear).validate(m_total)?;
    if let Some(t) = trivial(x, Method::HighSnr) {
        return Ok(t);
    }
    let r = ParentSnr::new(params, LinkRegime::Saturated).at(x).r;
    let v = guarded(
        || {
            let coef = k as f64 * binomial(m_total, k);
            let sum: CompensatedSum = (0..=m_total - k)
                .map(|m| {
                    let delta = (k + m) as f64;
                    let s = if m % 2 == 0 { 1.0 } else { -1.0 };
                    s * binomial(m_total - k, m) * (-delta * r).exp() / delta
                })
                .collect();
            Ok(SeriesValue {
                value: 1.0 - coef * sum.value(),
                error_bound: coef * sum.rounding_bound() + 4.0 * f64::EPSILON,
            })
        },
        || sbs_value(x, k, params, LinkRegime::Saturated),
        m_total,
    )?;
    Ok(OutageEstimate::exact(v, Method::HighSnr))
}

/// Max-min selection.
pub fn outage_mms(x: f64, spec: &SchemeSpec, params: &SystemParams) -> Result<OutageEstimate> {
    single(x, spec, params, forms::mms_closed, forms::mms_integral)
}

/// Max-min selection floor
/// `k C(M,k) sum_m (-1)^m C(M-k,m) [(1 - e^{-2 delta r})/delta - (e^{-r} - e^{-2 delta r})/(2 delta - 1)]`.
pub fn outage_mms_high_snr(x: f64, k: usize, params: &SystemParams) -> Result<OutageEstimate> {
    check_threshold(x)?;
    let spec = SchemeSpec::new(Scheme::Mms, k, EhModel::NonLinear);
    spec.validate(params.num_devices())?;
    if let Some(t) = trivial(x, Method::HighSnr) {
        return Ok(t);
    }
    let v = guarded(
        || forms::mms_closed(x, k, params, LinkRegime::Saturated),
        || forms::mms_integral(x, k, params, LinkRegime::Saturated),
        params.num_devices(),
    )?;
    Ok(OutageEstimate::exact(v, Method::HighSnr))
}
