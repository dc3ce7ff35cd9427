//! Physical-layer primitives: parameters, the rectenna transfer curve, the
//! uplink SNR and the rate-to-SNR threshold mapping.
//!
//! Every public quantity here is in SI units (watts, linear ratios). dBm and
//! dB only appear in the conversion helpers used at the configuration edge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(v: f64) -> f64 {
    10.0 * v.log10()
}

/// Curve-fit constants of the saturating rectenna model
/// `E = t1 * ((a P |g|^2 + b) / (P |g|^2 + c) - b / c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectennaParams {
    a: f64,
    b: f64,
    c: f64,
}

impl RectennaParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(Error::invalid(format!(
                "rectenna constants must be positive, got a={a}, b={b}, c={c}"
            )));
        }
        if !(a * c - b > 0.0) {
            return Err(Error::invalid(format!(
                "rectenna constants need a*c - b > 0 (got {}), otherwise no energy is harvested",
                a * c - b
            )));
        }
        Ok(RectennaParams { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `a c - b`, positive by construction.
    pub fn gap(&self) -> f64 {
        self.a * self.c - self.b
    }

    /// Saturation level `a - b/c` of the normalized harvested energy.
    pub fn saturation(&self) -> f64 {
        self.a - self.b / self.c
    }
}

impl Default for RectennaParams {
    /// Constants of the reference rectifier used throughout the evaluation.
    fn default() -> Self {
        RectennaParams {
            a: 2.463,
            b: 1.635,
            c: 0.826,
        }
    }
}

/// Energy harvesting model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EhModel {
    NonLinear,
    Linear,
}

impl EhModel {
    pub const ALL: [EhModel; 2] = [EhModel::NonLinear, EhModel::Linear];

    pub fn as_str(&self) -> &'static str {
        match self {
            EhModel::NonLinear => "nonlinear",
            EhModel::Linear => "linear",
        }
    }
}

impl std::fmt::Display for EhModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EhModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nonlinear" | "non-linear" | "nl" => Ok(EhModel::NonLinear),
            "linear" | "l" => Ok(EhModel::Linear),
            other => Err(Error::invalid(format!("unknown EH model '{other}'"))),
        }
    }
}

/// Full parameterization of one network snapshot. The slot length is fixed
/// at one time unit, so `harvest_fraction` carries all timing freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    rectenna: RectennaParams,
    transmit_power: f64,
    noise_variance: f64,
    harvest_fraction: f64,
    rate_threshold: f64,
    num_devices: usize,
}

impl SystemParams {
    /// Powers in watts, `rate_threshold` as the linear-scale `Q`.
    pub fn new(
        rectenna: RectennaParams,
        transmit_power: f64,
        noise_variance: f64,
        harvest_fraction: f64,
        rate_threshold: f64,
        num_devices: usize,
    ) -> Result<Self> {
        let p = SystemParams {
            rectenna,
            transmit_power,
            noise_variance,
            harvest_fraction,
            rate_threshold,
            num_devices,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.transmit_power > 0.0) || !self.transmit_power.is_finite() {
            return Err(Error::invalid(format!(
                "transmit power must be positive, got {}",
                self.transmit_power
            )));
        }
        if !(self.noise_variance > 0.0) || !self.noise_variance.is_finite() {
            return Err(Error::invalid(format!(
                "noise variance must be positive, got {}",
                self.noise_variance
            )));
        }
        if !(self.harvest_fraction > 0.0 && self.harvest_fraction < 1.0) {
            return Err(Error::invalid(format!(
                "harvest fraction t1 must lie in (0, 1), got {}",
                self.harvest_fraction
            )));
        }
        if !(self.rate_threshold >= 0.0) || !self.rate_threshold.is_finite() {
            return Err(Error::invalid(format!(
                "rate threshold must be non-negative, got {}",
                self.rate_threshold
            )));
        }
        if self.num_devices == 0 {
            return Err(Error::invalid("at least one device is required"));
        }
        Ok(())
    }

    pub fn rectenna(&self) -> &RectennaParams {
        &self.rectenna
    }

    /// Energy transmitter power `P_t` in watts.
    pub fn transmit_power(&self) -> f64 {
        self.transmit_power
    }

    /// Receiver noise variance in watts.
    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    /// Harvesting share `t1` of the unit slot.
    pub fn harvest_fraction(&self) -> f64 {
        self.harvest_fraction
    }

    /// Communication share `t2 = 1 - t1`.
    pub fn t2(&self) -> f64 {
        1.0 - self.harvest_fraction
    }

    /// Linear-scale rate threshold `Q`.
    pub fn rate_threshold(&self) -> f64 {
        self.rate_threshold
    }

    pub fn num_devices(&self) -> usize {
        self.num_devices
    }

    pub fn with_rectenna(mut self, rectenna: RectennaParams) -> Self {
        self.rectenna = rectenna;
        self
    }

    pub fn with_transmit_power(mut self, watts: f64) -> Result<Self> {
        self.transmit_power = watts;
        self.validate().map(|_| self)
    }

    pub fn with_transmit_power_dbm(self, dbm: f64) -> Result<Self> {
        self.with_transmit_power(dbm_to_watts(dbm))
    }

    pub fn with_noise_variance(mut self, watts: f64) -> Result<Self> {
        self.noise_variance = watts;
        self.validate().map(|_| self)
    }

    pub fn with_harvest_fraction(mut self, t1: f64) -> Result<Self> {
        self.harvest_fraction = t1;
        self.validate().map(|_| self)
    }

    pub fn with_rate_threshold(mut self, q: f64) -> Result<Self> {
        self.rate_threshold = q;
        self.validate().map(|_| self)
    }

    pub fn with_rate_threshold_db(self, q_db: f64) -> Result<Self> {
        self.with_rate_threshold(db_to_linear(q_db))
    }

    pub fn with_num_devices(mut self, m: usize) -> Result<Self> {
        self.num_devices = m;
        self.validate().map(|_| self)
    }
}

impl Default for SystemParams {
    /// `P_t = -10 dBm`, `sigma_n^2 = -50 dBm`, `t1 = 0.5`, `Q = 0 dB`, `M = 5`
    /// with the reference rectenna.
    fn default() -> Self {
        SystemParams {
            rectenna: RectennaParams::default(),
            transmit_power: dbm_to_watts(-10.0),
            noise_variance: dbm_to_watts(-50.0),
            harvest_fraction: 0.5,
            rate_threshold: 1.0,
            num_devices: 5,
        }
    }
}

/// Energy harvested in the `t1` phase for downlink gain `|g|^2`.
pub fn harvested_energy(gain_g: f64, params: &SystemParams, model: EhModel) -> f64 {
    debug_assert!(gain_g >= 0.0);
    let t1 = params.harvest_fraction();
    let p = params.transmit_power() * gain_g;
    match model {
        EhModel::Linear => t1 * p,
        EhModel::NonLinear => {
            let RectennaParams { a: _, b: _, c } = *params.rectenna();
            // (a p + b)/(p + c) - b/c rewritten as p (ac - b) / (c (p + c)),
            // which is exact at p = 0 and saturates cleanly as p -> inf.
            if p.is_infinite() {
                t1 * params.rectenna().saturation()
            } else {
                t1 * p * params.rectenna().gap() / (c * (p + c))
            }
        }
    }
}

/// Uplink SNR `|h|^2 E / (t2 sigma_n^2)`.
pub fn snr(gain_h: f64, energy: f64, params: &SystemParams) -> f64 {
    gain_h * energy / (params.t2() * params.noise_variance())
}

/// SNR threshold `x = 2^(Q / t2) - 1` equivalent to the rate threshold.
pub fn threshold_x(params: &SystemParams) -> f64 {
    (params.rate_threshold() / params.t2() * std::f64::consts::LN_2).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_conversions() {
        assert!((dbm_to_watts(-10.0) - 1e-4).abs() < 1e-18);
        assert!((dbm_to_watts(-50.0) - 1e-8).abs() < 1e-22);
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((watts_to_dbm(1e-4) + 10.0).abs() < 1e-12);
        assert!((linear_to_db(db_to_linear(-4.0)) + 4.0).abs() < 1e-12);
    }

    #[test]
    fn reference_rectenna_is_admissible() {
        let r = RectennaParams::default();
        assert!((r.gap() - 0.399_438).abs() < 1e-12);
        assert!(RectennaParams::new(1.0, 2.0, 1.0).is_err());
        assert!(RectennaParams::new(-1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn parameter_validation() {
        let p = SystemParams::default();
        assert!(p.with_harvest_fraction(0.0).is_err());
        assert!(p.with_harvest_fraction(1.0).is_err());
        assert!(p.with_num_devices(0).is_err());
        assert!(p.with_transmit_power(-1.0).is_err());
        assert!(p.with_noise_variance(0.0).is_err());
        assert!((p.t2() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn harvested_energy_endpoints() {
        let p = SystemParams::default();
        for model in EhModel::ALL {
            assert_eq!(harvested_energy(0.0, &p, model), 0.0);
        }
        let sat = harvested_energy(f64::INFINITY, &p, EhModel::NonLinear);
        assert!((sat - 0.5 * (2.463 - 1.635 / 0.826)).abs() < 1e-12);
        assert!((sat - 0.241_790_556_900_726).abs() < 1e-12);
        for g in [0.1, 1.0, 10.0, 100.0] {
            assert!(harvested_energy(g, &p, EhModel::NonLinear) < sat);
        }
        assert!((harvested_energy(2.0, &p, EhModel::Linear) - 0.5 * 1e-4 * 2.0).abs() < 1e-18);
    }

    #[test]
    fn nonlinear_energy_matches_textbook_form() {
        let p = SystemParams::default().with_transmit_power(0.37).unwrap();
        let (a, b, c) = (2.463, 1.635, 0.826);
        for g in [0.01, 0.5, 3.0, 40.0] {
            let pg = 0.37 * g;
            let direct = 0.5 * ((a * pg + b) / (pg + c) - b / c);
            assert!((harvested_energy(g, &p, EhModel::NonLinear) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn nonlinear_energy_is_monotone() {
        let p = SystemParams::default();
        let mut prev = -1.0;
        for i in 0..100 {
            let e = harvested_energy(i as f64 * 0.37, &p, EhModel::NonLinear);
            assert!(e >= prev);
            prev = e;
        }
    }

    #[test]
    fn snr_is_bilinear() {
        let p = SystemParams::default();
        assert_eq!(snr(1.0, 0.0, &p), 0.0);
        assert_eq!(snr(0.0, 0.3, &p), 0.0);
        let base = snr(1.0, 0.1, &p);
        assert!((base - 2e7).abs() < 1e-6);
        assert!((snr(1.0, 0.2, &p) - 2.0 * base).abs() < 1e-6);
        assert!((snr(2.0, 0.1, &p) - 2.0 * base).abs() < 1e-6);
    }

    #[test]
    fn threshold_mapping() {
        let p = SystemParams::default();
        assert!((threshold_x(&p) - 3.0).abs() < 1e-14);
        let p0 = p.with_rate_threshold(0.0).unwrap();
        assert_eq!(threshold_x(&p0), 0.0);
        let p4 = p.with_rate_threshold_db(-4.0).unwrap();
        let expected = 2f64.powf(2.0 * 10f64.powf(-0.4)) - 1.0;
        assert!((threshold_x(&p4) - expected).abs() < 1e-14);
        assert!((threshold_x(&p4) - 0.736_538_433_438_135_5).abs() < 1e-12);
    }
}
