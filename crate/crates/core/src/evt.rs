//! Large-M approximations from extreme value theory.
//!
//! Every ranking statistic here lies in the Gumbel domain of attraction, so
//! the k-th largest of `M` draws, standardized by `(eta, xi)`, tends to the
//! k-th extreme Gumbel law `G_k`. The selected device's outage is then an
//! integral of the conditional outage against that limit density.

use serde::{Deserialize, Serialize};

use crate::analytic::forms::KthLargestExp;
use crate::analytic::geometry::ParentSnr;
use crate::analytic::{check_threshold, pair_marginals, Method, OutageEstimate, PairSpec, Scheme, SchemeSpec};
use crate::error::{Error, Result};
use crate::model::{EhModel, SystemParams};
use crate::special::{integrate_finite, integrate_semi_infinite, ln_gamma, upper_reg_gamma, QuadratureSpec};

/// Location and scale standardizing the maximum of `M` draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizingConstants {
    pub eta: f64,
    pub xi: f64,
}

/// `G_k(z) = exp(-e^{-z}) sum_{j<k} e^{-jz} / j!`, evaluated in log space.
pub fn gumbel_kth_cdf(z: f64, k: usize) -> f64 {
    assert!(k >= 1, "order index starts at 1");
    if z == f64::INFINITY {
        return 1.0;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    let terms: Vec<f64> = (0..k).map(|j| -(j as f64) * z - ln_gamma(j as f64 + 1.0)).collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
    (-(-z).exp() + lse).exp().min(1.0)
}

/// Normalizing constants of the ranking statistic of `scheme`.
///
/// Downlink or uplink gains are unit exponentials (`ln M`, `1`); the weaker
/// of the two is a rate-2 exponential (`ln M / 2`, `1/2`); the end-to-end
/// SNR needs a root-find of its distribution.
pub fn normalizing_constants(scheme: Scheme, params: &SystemParams, model: EhModel) -> Result<NormalizingConstants> {
    let m = params.num_devices();
    if m < 2 {
        return Err(Error::invalid("extreme value constants need at least two devices"));
    }
    let ln_m = (m as f64).ln();
    match scheme {
        Scheme::Ebs | Scheme::Ibs => Ok(NormalizingConstants { eta: ln_m, xi: 1.0 }),
        Scheme::Mms => Ok(NormalizingConstants {
            eta: 0.5 * ln_m,
            xi: 0.5,
        }),
        Scheme::Sbs => {
            let parent = ParentSnr::new(params, model.into());
            let eta = survival_quantile(&parent, 1.0 / m as f64)?;
            let upper = survival_quantile(&parent, 1.0 / (std::f64::consts::E * m as f64))?;
            Ok(NormalizingConstants { eta, xi: upper - eta })
        }
        Scheme::Rs => Err(Error::invalid("random selection has no extreme to normalize")),
    }
}

/// Solves `1 - F(z) = target` by bracketed regula falsi (Illinois variant)
/// with bisection fallback.
fn survival_quantile(parent: &ParentSnr, target: f64) -> Result<f64> {
    let h = |z: f64| parent.survival(z) - target;
    let mut lo = 0.0;
    let mut hi = parent.scale();
    while h(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Accuracy {
                context: "quantile bracket".into(),
                estimate: lo,
                error: f64::INFINITY,
            });
        }
    }
    let (mut flo, mut fhi) = (h(lo), h(hi));
    let mut side = 0i8;
    for _ in 0..400 {
        let mut mid = hi - fhi * (hi - lo) / (fhi - flo);
        if !(mid > lo && mid < hi) {
            mid = 0.5 * (lo + hi);
        }
        let fm = h(mid);
        if fm.abs() <= 1e-14 * target.max(1e-300) || (hi - lo) <= 4.0 * f64::EPSILON * hi {
            return Ok(mid);
        }
        if fm > 0.0 {
            lo = mid;
            flo = fm;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            fhi = fm;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::Accuracy {
        context: "survival quantile".into(),
        estimate: 0.5 * (lo + hi),
        error: hi - lo,
    })
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::relative(1e-10)
}

/// Limit density of the k-th largest of `M` exponentials with the given
/// rate: `rate M^k / Gamma(k) exp(-M e^{-rate y} - k rate y)`, with the
/// `M^k / Gamma(k)` prefactor folded into the exponent.
#[derive(Debug, Clone, Copy)]
struct GumbelDensity {
    k: f64,
    m: f64,
    rate: f64,
    ln_coef: f64,
}

impl GumbelDensity {
    fn new(k: usize, m: usize, rate: f64) -> Self {
        let (k, m) = (k as f64, m as f64);
        GumbelDensity {
            k,
            m,
            rate,
            ln_coef: rate.ln() + k * m.ln() - ln_gamma(k),
        }
    }

    fn pdf(&self, y: f64) -> f64 {
        let t = self.rate * y;
        (self.ln_coef - self.m * (-t).exp() - self.k * t).exp()
    }
}

fn prepare(x: f64, k: usize, params: &SystemParams) -> Result<Option<OutageEstimate>> {
    check_threshold(x)?;
    SchemeSpec::new(Scheme::Sbs, k, EhModel::NonLinear).validate(params.num_devices())?;
    if x == 0.0 {
        return Ok(Some(OutageEstimate::exact(0.0, Method::Evt)));
    }
    if x.is_infinite() {
        return Ok(Some(OutageEstimate::exact(1.0, Method::Evt)));
    }
    Ok(None)
}

/// SNR-based selection: `G_k((x - eta) / xi)`.
pub fn outage_evt_sbs(x: f64, k: usize, params: &SystemParams, model: EhModel) -> Result<OutageEstimate> {
    if let Some(t) = prepare(x, k, params)? {
        return Ok(t);
    }
    let c = normalizing_constants(Scheme::Sbs, params, model)?;
    Ok(OutageEstimate::exact(
        gumbel_kth_cdf((x - c.eta) / c.xi, k),
        Method::Evt,
    ))
}

/// Energy-based selection:
/// `1 - e^{-r} M^k/Gamma(k) int_0^inf exp(-M e^{-y} - k y - kappa / y) dy`,
/// rearranged into a sum of non-negative parts.
pub fn outage_evt_ebs(x: f64, k: usize, params: &SystemParams, model: EhModel) -> Result<OutageEstimate> {
    if let Some(t) = prepare(x, k, params)? {
        return Ok(t);
    }
    let geo = ParentSnr::new(params, model.into()).at(x);
    let g = GumbelDensity::new(k, params.num_devices(), 1.0);
    // Limit mass below zero, where the paper form also counts an outage.
    let below = upper_reg_gamma(k as f64, params.num_devices() as f64)?;
    let f = |y: f64| {
        if y <= 0.0 {
            return g.pdf(0.0);
        }
        g.pdf(y) * -(-geo.w(y)).exp_m1()
    };
    let v = below + integrate_semi_infinite(f, 0.0, &spec())?.value;
    Ok(OutageEstimate::exact(v, Method::Evt))
}

/// Uplink-channel-based selection:
/// `int_0^r g + int_r^inf (1 - exp(-kappa / (z - r))) g(z) dz`.
pub fn outage_evt_ibs(x: f64, k: usize, params: &SystemParams, model: EhModel) -> Result<OutageEstimate> {
    if let Some(t) = prepare(x, k, params)? {
        return Ok(t);
    }
    let geo = ParentSnr::new(params, model.into()).at(x);
    let g = GumbelDensity::new(k, params.num_devices(), 1.0);
    let below = if geo.r > 0.0 {
        integrate_finite(|z| g.pdf(z), 0.0, geo.r, &spec())?.value
    } else {
        0.0
    };
    let above = if geo.kappa > 0.0 {
        let f = |z: f64| {
            if z <= geo.r {
                return 0.0;
            }
            g.pdf(z) * -(-geo.v(z)).exp_m1()
        };
        integrate_semi_infinite(f, geo.r, &spec())?.value
    } else {
        0.0
    };
    Ok(OutageEstimate::exact(below + above, Method::Evt))
}

/// Max-min selection. The selected `rho = min(|g|^2, |h|^2)` follows the
/// rate-2 Gumbel limit; given `rho`, the stronger link exceeds it by a unit
/// exponential, which integrates out analytically:
///
/// * (i) weaker downlink: `1/2 int_0^s (1 - e^{y - w(y)}) g(y) dy`
/// * (ii) uplink below `r`: `1/2 I_{1 - e^{-2r}}(M - k + 1, k)`
/// * (iii) weaker uplink above `r`: `1/2 int_r^s (1 - e^{z - v(z)}) g(z) dz`
pub fn outage_evt_mms(x: f64, k: usize, params: &SystemParams, model: EhModel) -> Result<OutageEstimate> {
    if let Some(t) = prepare(x, k, params)? {
        return Ok(t);
    }
    let geo = ParentSnr::new(params, model.into()).at(x);
    let s = geo.s();
    let m = params.num_devices();
    let g = GumbelDensity::new(k, m, 2.0);
    let first = integrate_finite(
        |y| {
            if y <= 0.0 || y >= s {
                return 0.0;
            }
            g.pdf(y) * -(y - geo.w(y)).exp_m1()
        },
        0.0,
        s,
        &spec(),
    )?
    .value;
    let second = KthLargestExp::new(k, m, 2.0).cdf(geo.r)?;
    let third = if geo.kappa > 0.0 && s > geo.r {
        integrate_finite(
            |z| {
                if z <= geo.r || z >= s {
                    return 0.0;
                }
                g.pdf(z) * -(z - geo.v(z)).exp_m1()
            },
            geo.r,
            s,
            &spec(),
        )?
        .value
    } else {
        0.0
    };
    Ok(OutageEstimate::exact(0.5 * (first + second + third), Method::Evt))
}

/// Dispatches on `spec.scheme`; random selection has no EVT form.
pub fn outage_evt(x: f64, spec: &SchemeSpec, params: &SystemParams) -> Result<OutageEstimate> {
    match spec.scheme {
        Scheme::Sbs => outage_evt_sbs(x, spec.k, params, spec.model),
        Scheme::Ebs => outage_evt_ebs(x, spec.k, params, spec.model),
        Scheme::Ibs => outage_evt_ibs(x, spec.k, params, spec.model),
        Scheme::Mms => outage_evt_mms(x, spec.k, params, spec.model),
        Scheme::Rs => Err(Error::invalid("random selection has no extreme value approximation")),
    }
}

/// Pair outage treating the two scheduled devices as independent, which
/// holds asymptotically for well-separated order statistics.
pub fn outage_evt_pair(x: f64, pair: &PairSpec, params: &SystemParams, model: EhModel) -> Result<OutageEstimate> {
    let m = pair_marginals(x, pair, params, model)?;
    Ok(OutageEstimate::exact(m.first * m.second, Method::Evt))
}
