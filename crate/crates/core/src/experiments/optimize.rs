//! Harvesting-time trade-off: the `t1` minimizing outage.

use serde::{Deserialize, Serialize};

use crate::analytic::{self, SchemeSpec};
use crate::error::{Error, Result};
use crate::model::{threshold_x, SystemParams};

/// Margin kept from the degenerate endpoints `t1 = 0` and `t1 = 1`.
pub const T1_MARGIN: f64 = 1e-4;
const COARSE_POINTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T1Optimum {
    pub t_star: f64,
    pub outage: f64,
    /// False when the coarse scan found several local minima; `t_star` is
    /// then the best grid point.
    pub unimodal: bool,
}

/// Analytic outage as a function of `t1`, all else fixed.
pub fn outage_at_t1(spec: &SchemeSpec, params: &SystemParams, t1: f64) -> Result<f64> {
    let p = params.with_harvest_fraction(t1)?;
    let x = threshold_x(&p);
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(analytic::outage(x, spec, &p)?.value)
}

/// Minimizes analytic outage over `t1` in `(T1_MARGIN, 1 - T1_MARGIN)`: a
/// 50-point scan checks for a single valley, then golden-section search
/// narrows the bracket around the best grid point to `tolerance`.
pub fn find_optimal_t1(spec: &SchemeSpec, params: &SystemParams, tolerance: f64) -> Result<T1Optimum> {
    if !(tolerance > 0.0) {
        return Err(Error::invalid("search tolerance must be positive"));
    }
    let (lo, hi) = (T1_MARGIN, 1.0 - T1_MARGIN);
    let f = |t: f64| outage_at_t1(spec, params, t);
    let grid: Vec<f64> = (0..COARSE_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (COARSE_POINTS - 1) as f64)
        .collect();
    let values = grid.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    let best = (0..values.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
        .expect("grid is non-empty");
    if !single_valley(&values) {
        log::warn!(
            "outage is not unimodal in t1 for {:?}; returning the best grid point",
            spec
        );
        return Ok(T1Optimum {
            t_star: grid[best],
            outage: values[best],
            unimodal: false,
        });
    }
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(grid.len() - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tolerance {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let t_star = 0.5 * (a + b);
    let outage = f(t_star)?;
    Ok(T1Optimum {
        t_star,
        outage,
        unimodal: true,
    })
}

/// Non-increasing then non-decreasing, ignoring relative wiggles below
/// `1e-9` that quadrature noise can produce.
fn single_valley(v: &[f64]) -> bool {
    let mut rising = false;
    for w in v.windows(2) {
        let slack = 1e-9 * w[0].abs().max(w[1].abs());
        if w[1] > w[0] + slack {
            rising = true;
        } else if w[1] < w[0] - slack && rising {
            return false;
        }
    }
    true
}
