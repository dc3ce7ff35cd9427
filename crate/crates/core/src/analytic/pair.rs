//! Two devices scheduled together, each decoded with single-user detection.
//!
//! Device `a` sees SINR `X_a / (X_b + 1)`: with SNRs normalized to the noise
//! power the interferer simply adds to the unit noise floor. The pair is in
//! outage when both SINRs fall to `x` or below, which needs `x < 1` for the
//! region to be bounded.

use crate::analytic::geometry::{LinkRegime, ParentSnr};
use crate::analytic::{check_threshold, Method, OutageEstimate, PairScheme, PairSpec};
use crate::error::{Error, Result};
use crate::model::{EhModel, SystemParams};
use crate::special::{integrate_semi_infinite, integrate_with_breaks, ln_binomial, reg_inc_beta, QuadratureSpec};

/// Noise floor in SINR units.
const NOISE: f64 = 1.0;

/// Per-device outage probabilities of a scheduled pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMarginals {
    /// `P(X_k <= x (X_j + 1))`.
    pub first: f64,
    /// `P(X_j <= x (X_k + 1))`.
    pub second: f64,
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::relative(1e-10)
}

fn check_pair_threshold(x: f64) -> Result<()> {
    check_threshold(x)?;
    if x >= 1.0 {
        return Err(Error::domain(format!(
            "pair outage needs an SINR threshold x < 1, got {x}; beyond it both devices cannot be decoded at once"
        )));
    }
    Ok(())
}

/// `z_max = x / (1 - x)`: above it the weaker device cannot be in outage
/// together with the stronger one.
fn z_max(x: f64) -> f64 {
    NOISE * x / (1.0 - x)
}

/// Ordered breakpoints over `[0, upper]` at powers of two of the SNR scale.
fn breaks(scale: f64, upper: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut b = scale * 2f64.powi(-30);
    while b < upper {
        pts.push(b);
        b *= 4.0;
    }
    pts.push(upper);
    pts
}

/// `int_lower^inf f(z) dz` for SNR-scale integrands whose tails decay like
/// `exp(-c sqrt(z))`, via `z = lower + scale t^2`.
fn integrate_tail(f: impl Fn(f64) -> f64, lower: f64, scale: f64) -> Result<f64> {
    let g = |t: f64| {
        let v = f(lower + scale * t * t);
        if v == 0.0 {
            0.0
        } else {
            v * 2.0 * scale * t
        }
    };
    Ok(integrate_semi_infinite(g, 0.0, &spec())?.value)
}

/// Order-statistic machinery for the j-th best of `M` parent draws.
struct Ordered {
    parent: ParentSnr,
    k: usize,
    j: usize,
    m: usize,
    ln_coef: f64,
}

impl Ordered {
    fn new(parent: ParentSnr, k: usize, j: usize, m: usize) -> Self {
        Ordered {
            parent,
            k,
            j,
            m,
            ln_coef: (j as f64).ln() + ln_binomial(m, j),
        }
    }

    /// Density of the j-th largest SNR.
    fn density(&self, z: f64) -> f64 {
        let f = self.parent.pdf(z);
        if f == 0.0 || !f.is_finite() {
            return if f.is_finite() || self.j < self.m { 0.0 } else { f };
        }
        let mut l = self.ln_coef + f.ln();
        if self.m > self.j {
            let cdf = self.parent.cdf(z);
            if cdf == 0.0 {
                return 0.0;
            }
            l += (self.m - self.j) as f64 * cdf.ln();
        }
        if self.j > 1 {
            let s = self.parent.survival(z);
            if s == 0.0 {
                return 0.0;
            }
            l += (self.j - 1) as f64 * s.ln();
        }
        l.exp()
    }

    /// `P(X_k <= y | X_j = z)`: the devices above `z` are i.i.d. draws from
    /// the parent truncated to `(z, inf)` and `X_k` is the (j-k)-th lowest
    /// of those `j - 1`.
    fn conditional(&self, y: f64, z: f64) -> Result<f64> {
        if y <= z {
            return Ok(0.0);
        }
        let fz = self.parent.cdf(z);
        let sz = self.parent.survival(z);
        if sz == 0.0 {
            return Ok(1.0);
        }
        let t = if fz < 0.5 {
            (self.parent.cdf(y) - fz) / sz
        } else {
            1.0 - self.parent.survival(y) / sz
        };
        reg_inc_beta(t.clamp(0.0, 1.0), (self.j - self.k) as f64, self.k as f64)
    }
}

fn regime_for(model: Option<EhModel>) -> LinkRegime {
    model.map(LinkRegime::from).unwrap_or(LinkRegime::Saturated)
}

fn sbs_first(o: &Ordered, x: f64) -> Result<f64> {
    let zmax = z_max(x);
    let f = |z: f64| {
        let d = o.density(z);
        if d == 0.0 {
            return 0.0;
        }
        d * o.conditional(x * (z + NOISE), z).unwrap_or(f64::NAN)
    };
    Ok(integrate_with_breaks(f, &breaks(o.parent.scale(), zmax), &spec())?.value)
}

fn sbs_second(o: &Ordered, x: f64) -> Result<f64> {
    let zmax = z_max(x);
    let f = |z: f64| {
        let d = o.density(z);
        if d == 0.0 {
            return 0.0;
        }
        d * o.conditional(z / x - NOISE, z).unwrap_or(f64::NAN)
    };
    let miss = integrate_tail(f, zmax, o.parent.scale())?;
    Ok(1.0 - miss)
}

fn rs_first(parent: &ParentSnr, x: f64) -> Result<f64> {
    let f = |z: f64| {
        let d = parent.pdf(z);
        if d == 0.0 {
            0.0
        } else {
            d * parent.cdf(x * (z + NOISE))
        }
    };
    let scale = parent.scale();
    let zmax = z_max(x);
    let head = integrate_with_breaks(f, &breaks(scale, zmax), &spec())?.value;
    Ok(head + integrate_tail(f, zmax, scale)?)
}

fn rs_joint(parent: &ParentSnr, x: f64) -> Result<f64> {
    let f = |z: f64| {
        let d = parent.pdf(z);
        if d == 0.0 {
            return 0.0;
        }
        let lo = (z / x - NOISE).max(0.0);
        let hi = x * (z + NOISE);
        let mass = if parent.cdf(lo) < 0.5 {
            parent.cdf(hi) - parent.cdf(lo)
        } else {
            parent.survival(lo) - parent.survival(hi)
        };
        d * mass.max(0.0)
    };
    Ok(integrate_with_breaks(f, &breaks(parent.scale(), z_max(x)), &spec())?.value)
}

fn evaluate(
    x: f64,
    pair: &PairSpec,
    params: &SystemParams,
    model: Option<EhModel>,
    method: Method,
) -> Result<OutageEstimate> {
    check_pair_threshold(x)?;
    pair.validate(params.num_devices())?;
    if x == 0.0 {
        return Ok(OutageEstimate::exact(0.0, method));
    }
    let parent = ParentSnr::new(params, regime_for(model));
    let v = match pair.scheme {
        PairScheme::Rs => rs_joint(&parent, x)?,
        // Given the ordering, the weaker device is in outage whenever the
        // stronger one is, so the joint event is the stronger device's.
        PairScheme::Sbs => sbs_first(&Ordered::new(parent, pair.k, pair.j, params.num_devices()), x)?,
    };
    Ok(OutageEstimate::exact(v, method))
}

/// Pair outage: both scheduled devices below the SINR threshold `x < 1`.
pub fn outage_pair(x: f64, pair: &PairSpec, params: &SystemParams, model: EhModel) -> Result<OutageEstimate> {
    evaluate(x, pair, params, Some(model), Method::Analytic)
}

/// Pair outage with a saturated harvester.
pub fn outage_pair_high_snr(x: f64, pair: &PairSpec, params: &SystemParams) -> Result<OutageEstimate> {
    evaluate(x, pair, params, None, Method::HighSnr)
}

/// Per-device outage probabilities of the pair, before any joint
/// dependence is accounted for.
pub fn pair_marginals(x: f64, pair: &PairSpec, params: &SystemParams, model: EhModel) -> Result<PairMarginals> {
    check_pair_threshold(x)?;
    pair.validate(params.num_devices())?;
    if x == 0.0 {
        return Ok(PairMarginals {
            first: 0.0,
            second: 0.0,
        });
    }
    let parent = ParentSnr::new(params, model.into());
    let (first, second) = match pair.scheme {
        PairScheme::Rs => {
            let p = rs_first(&parent, x)?;
            (p, p)
        }
        PairScheme::Sbs => {
            let o = Ordered::new(parent, pair.k, pair.j, params.num_devices());
            (sbs_first(&o, x)?, sbs_second(&o, x)?)
        }
    };
    if !(first.is_finite() && second.is_finite()) {
        return Err(Error::Accuracy {
            context: "pair marginals".into(),
            estimate: first * second,
            error: f64::INFINITY,
        });
    }
    Ok(PairMarginals {
        first: first.clamp(0.0, 1.0),
        second: second.clamp(0.0, 1.0),
    })
}
