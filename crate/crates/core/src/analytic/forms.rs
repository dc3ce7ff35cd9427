//! Both evaluation routes for the schemes with alternating binomial sums.
//!
//! The closed forms are the finite sums over `m = 0..=M-k` with Bessel
//! terms; they are fast but cancel catastrophically once `C(M-k, m)` grows.
//! The integral forms integrate a positive integrand against the density
//! of the selected order statistic and stay accurate for any `M`. Both are
//! public so they can be checked against each other.

use crate::analytic::geometry::{Geometry, LinkRegime, ParentSnr};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::special::{
    binomial, integrate_finite, integrate_semi_infinite, ln_binomial, reg_inc_beta, x_k1, CompensatedSum,
    QuadratureSpec,
};

/// Value of an alternating sum plus a bound on its accumulated error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub error_bound: f64,
}

impl SeriesValue {
    /// True when the error bound is small relative to the value.
    pub fn is_reliable(&self, relative: f64) -> bool {
        self.value.is_finite() && self.error_bound <= relative * self.value.abs()
    }
}

fn tight() -> QuadratureSpec {
    QuadratureSpec::relative(1e-12)
}

/// Density of the k-th largest of `M` i.i.d. exponentials with the given
/// rate, evaluated in log space.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KthLargestExp {
    k: usize,
    m: usize,
    rate: f64,
    ln_coef: f64,
}

impl KthLargestExp {
    pub(crate) fn new(k: usize, m: usize, rate: f64) -> Self {
        KthLargestExp {
            k,
            m,
            rate,
            ln_coef: rate.ln() + (k as f64).ln() + ln_binomial(m, k),
        }
    }

    pub(crate) fn pdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return if self.k == self.m { self.ln_coef.exp() } else { 0.0 };
        }
        if y.is_infinite() {
            return 0.0;
        }
        let t = self.rate * y;
        let mut l = self.ln_coef - self.k as f64 * t;
        if self.m > self.k {
            l += (self.m - self.k) as f64 * (-(-t).exp_m1()).ln();
        }
        l.exp()
    }

    /// `P(Y <= y)`.
    pub(crate) fn cdf(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        let psi = -(-self.rate * y).exp_m1();
        reg_inc_beta(psi, (self.m - self.k + 1) as f64, self.k as f64)
    }
}

fn sign(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `u K1(u)` at `u = 2 sqrt(kappa delta)`, divided by `delta`.
fn bessel_term(kappa: f64, delta: f64) -> f64 {
    x_k1(2.0 * (kappa * delta).sqrt()) / delta
}

/// Energy-based selection, closed form:
/// `1 - e^{-r} k C(M,k) sum_m (-1)^m C(M-k,m) phi(2 sqrt(kappa delta)) / delta`.
pub fn ebs_closed(x: f64, k: usize, params: &SystemParams, regime: LinkRegime) -> SeriesValue {
    let geo = ParentSnr::new(params, regime).at(x);
    let m_total = params.num_devices();
    let coef = k as f64 * binomial(m_total, k);
    let sum: CompensatedSum = (0..=m_total - k)
        .map(|m| sign(m) * binomial(m_total - k, m) * bessel_term(geo.kappa, (k + m) as f64))
        .collect();
    let scale = (-geo.r).exp() * coef;
    SeriesValue {
        value: 1.0 - scale * sum.value(),
        error_bound: scale * sum.rounding_bound() + 4.0 * f64::EPSILON,
    }
}

/// Energy-based selection as an integral over the selected downlink gain.
pub fn ebs_integral(x: f64, k: usize, params: &SystemParams, regime: LinkRegime) -> Result<f64> {
    let geo = ParentSnr::new(params, regime).at(x);
    let density = KthLargestExp::new(k, params.num_devices(), 1.0);
    let f = |y: f64| {
        let p = density.pdf(y);
        if p == 0.0 {
            return 0.0;
        }
        p * -(-geo.w(y)).exp_m1()
    };
    Ok(integrate_semi_infinite(f, 0.0, &tight())?.value)
}

/// `Phi(x, m) = int_r^inf exp(-(k+m) z - kappa / (z - r)) dz`, reduced to
/// `e^{-delta r} phi(2 sqrt(kappa delta)) / delta`.
pub fn ibs_phi_closed(x: f64, m: usize, k: usize, params: &SystemParams) -> f64 {
    let geo = ParentSnr::new(params, LinkRegime::NonLinear).at(x);
    let delta = (k + m) as f64;
    (-delta * geo.r).exp() * bessel_term(geo.kappa, delta)
}

/// `Phi(x, m)` by direct quadrature of its defining integral.
pub fn ibs_phi_quadrature(x: f64, m: usize, k: usize, params: &SystemParams) -> Result<f64> {
    let geo = ParentSnr::new(params, LinkRegime::NonLinear).at(x);
    let delta = (k + m) as f64;
    let f = |z: f64| {
        let u = z - geo.r;
        if u <= 0.0 {
            return 0.0;
        }
        (-delta * z - geo.kappa / u).exp()
    };
    Ok(integrate_semi_infinite(f, geo.r, &tight())?.value)
}

/// Uplink-channel-based selection, closed form. The linear harvester makes
/// this identical to [`ebs_closed`], which is what it delegates to.
pub fn ibs_closed(x: f64, k: usize, params: &SystemParams, regime: LinkRegime) -> SeriesValue {
    if regime == LinkRegime::Linear {
        return ebs_closed(x, k, params, regime);
    }
    let geo = ParentSnr::new(params, regime).at(x);
    let m_total = params.num_devices();
    let coef = k as f64 * binomial(m_total, k);
    let sum: CompensatedSum = (0..=m_total - k)
        .map(|m| {
            let delta = (k + m) as f64;
            sign(m) * binomial(m_total - k, m) * (-delta * geo.r).exp() * bessel_term(geo.kappa, delta)
        })
        .collect();
    SeriesValue {
        value: 1.0 - coef * sum.value(),
        error_bound: coef * sum.rounding_bound() + 4.0 * f64::EPSILON,
    }
}

/// Uplink-channel-based selection as an integral over the selected uplink
/// gain: the mass below `r` plus the conditional downlink shortfall above.
pub fn ibs_integral(x: f64, k: usize, params: &SystemParams, regime: LinkRegime) -> Result<f64> {
    if regime == LinkRegime::Linear {
        return ebs_integral(x, k, params, regime);
    }
    let geo = ParentSnr::new(params, regime).at(x);
    let density = KthLargestExp::new(k, params.num_devices(), 1.0);
    let below = density.cdf(geo.r)?;
    if geo.kappa == 0.0 {
        return Ok(below);
    }
    let f = |z: f64| {
        let p = density.pdf(z);
        if p == 0.0 {
            return 0.0;
        }
        p * -(-geo.v(z)).exp_m1()
    };
    Ok(below + integrate_semi_infinite(f, geo.r, &tight())?.value)
}

/// Max-min selection, closed form:
/// `k C(M,k) sum_m (-1)^m C(M-k,m) [(1 - e^{-2 delta s})/delta - J1 - J2]`
/// with `J1 = int_0^s e^{-w(y) - (2delta-1) y} dy` and
/// `J2 = int_r^s e^{-v(z) - (2delta-1) z} dz`.
pub fn mms_closed(x: f64, k: usize, params: &SystemParams, regime: LinkRegime) -> Result<SeriesValue> {
    let geo = ParentSnr::new(params, regime).at(x);
    let s = geo.s();
    let m_total = params.num_devices();
    let coef = k as f64 * binomial(m_total, k);
    let mut sum = CompensatedSum::new();
    let mut quad_err = 0.0;
    for m in 0..=m_total - k {
        let delta = (k + m) as f64;
        let b = binomial(m_total - k, m);
        let (j1, e1) = mms_j1(geo, s, delta)?;
        let (j2, e2) = mms_j2(geo, s, delta)?;
        let head = -(-2.0 * delta * s).exp_m1() / delta;
        sum.add(sign(m) * b * head);
        sum.add(-sign(m) * b * j1);
        sum.add(-sign(m) * b * j2);
        quad_err += b * (e1 + e2);
    }
    Ok(SeriesValue {
        value: coef * sum.value(),
        error_bound: coef * (sum.rounding_bound() + quad_err),
    })
}

fn mms_j1(geo: Geometry, s: f64, delta: f64) -> Result<(f64, f64)> {
    if s == 0.0 {
        return Ok((0.0, 0.0));
    }
    if geo.kappa == 0.0 {
        // w = r on [0, r]: an elementary exponential.
        let a = 2.0 * delta - 1.0;
        return Ok(((-geo.r).exp() * -(-a * s).exp_m1() / a, 0.0));
    }
    let f = |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        (-geo.w(y) - (2.0 * delta - 1.0) * y).exp()
    };
    let i = integrate_finite(f, 0.0, s, &tight())?;
    Ok((i.value, i.abs_error))
}

fn mms_j2(geo: Geometry, s: f64, delta: f64) -> Result<(f64, f64)> {
    if geo.kappa == 0.0 || s <= geo.r {
        return Ok((0.0, 0.0));
    }
    let f = |z: f64| {
        if z <= geo.r {
            return 0.0;
        }
        (-geo.v(z) - (2.0 * delta - 1.0) * z).exp()
    };
    let i = integrate_finite(f, geo.r, s, &tight())?;
    Ok((i.value, i.abs_error))
}

/// Max-min selection as an integral over the selected `min(|g|^2, |h|^2)`,
/// which is the k-th largest of `M` rate-2 exponentials. The weaker link
/// is the downlink or the uplink with probability 1/2 each; the stronger
/// link exceeds it by an independent unit exponential.
pub fn mms_integral(x: f64, k: usize, params: &SystemParams, regime: LinkRegime) -> Result<f64> {
    let geo = ParentSnr::new(params, regime).at(x);
    let s = geo.s();
    let density = KthLargestExp::new(k, params.num_devices(), 2.0);
    let weak_downlink = |y: f64| {
        let p = density.pdf(y);
        if p == 0.0 || y >= s {
            return 0.0;
        }
        p * -(y - geo.w(y)).exp_m1()
    };
    let weak_uplink = |z: f64| {
        let p = density.pdf(z);
        if p == 0.0 || z <= geo.r || z >= s {
            return 0.0;
        }
        p * -(z - geo.v(z)).exp_m1()
    };
    let a = if s > 0.0 {
        integrate_finite(weak_downlink, 0.0, s, &tight())?.value
    } else {
        0.0
    };
    let b = density.cdf(geo.r)?;
    let c = if geo.kappa > 0.0 && s > geo.r {
        integrate_finite(weak_uplink, geo.r, s, &tight())?.value
    } else {
        0.0
    };
    Ok(0.5 * (a + b + c))
}

/// Closed form when it is well conditioned, integral form otherwise.
pub(crate) fn guarded(
    closed: impl FnOnce() -> Result<SeriesValue>,
    integral: impl FnOnce() -> Result<f64>,
    num_devices: usize,
) -> Result<f64> {
    const LARGE_M: usize = 60;
    const CANCELLATION: f64 = 1e-8;
    if num_devices <= LARGE_M {
        if let Ok(sv) = closed() {
            if sv.is_reliable(CANCELLATION) {
                return Ok(sv.value);
            }
        }
    }
    integral().map_err(|e| match e {
        Error::Accuracy { estimate, error, .. } => Error::Accuracy {
            context: "order-statistic integral".into(),
            estimate,
            error,
        },
        other => other,
    })
}
