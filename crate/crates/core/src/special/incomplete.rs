//! Regularized incomplete beta and lower incomplete gamma, plus the
//! log-gamma and binomial helpers the order-statistic formulas lean on.
//!
//! The continued-fraction kernels come from `statrs`; this module owns the
//! domain checks and the contract the rest of the crate relies on.

use statrs::function::{beta, gamma};

use crate::error::{Error, Result};

/// `I_psi(p, q)`, the regularized incomplete beta function.
pub fn reg_inc_beta(psi: f64, p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&psi) {
        return Err(Error::domain(format!("incomplete beta needs psi in [0,1], got {psi}")));
    }
    if !(p > 0.0) || !(q > 0.0) {
        return Err(Error::domain(format!("incomplete beta needs p, q > 0, got ({p}, {q})")));
    }
    if psi == 0.0 {
        return Ok(0.0);
    }
    if psi == 1.0 {
        return Ok(1.0);
    }
    beta::checked_beta_reg(p, q, psi)
        .map(|v| v.clamp(0.0, 1.0))
        .map_err(|e| Error::domain(e.to_string()))
}

/// `gamma(p, q) = int_0^q t^(p-1) e^(-t) dt`, unregularized.
pub fn lower_inc_gamma(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0) || !(q >= 0.0) {
        return Err(Error::domain(format!(
            "lower incomplete gamma needs p > 0, q >= 0, got ({p}, {q})"
        )));
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma::gamma_lr(p, q) * gamma::gamma(p))
}

/// `Q(p, q) = Gamma(p, q) / Gamma(p)`, the regularized upper incomplete gamma.
pub fn upper_reg_gamma(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0) || !(q >= 0.0) {
        return Err(Error::domain(format!(
            "upper incomplete gamma needs p > 0, q >= 0, got ({p}, {q})"
        )));
    }
    if q == 0.0 {
        return Ok(1.0);
    }
    Ok(gamma::gamma_ur(p, q))
}

pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `C(n, k)` as a float, exact while the result fits in 53 bits.
pub fn binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round_if_integral()
}

trait RoundIfIntegral {
    fn round_if_integral(self) -> Self;
}

impl RoundIfIntegral for f64 {
    fn round_if_integral(self) -> f64 {
        if self < 9.0e15 {
            self.round()
        } else {
            self
        }
    }
}
