//! Special functions and quadrature shared by every evaluator.

mod bessel;
mod incomplete;
mod quadrature;

pub use bessel::{bessel_k0, bessel_k0_scaled, bessel_k1, bessel_k1_scaled, one_minus_x_k1, x_k1};
pub use incomplete::{binomial, ln_binomial, ln_gamma, lower_inc_gamma, reg_inc_beta, upper_reg_gamma};
pub use quadrature::{integrate_finite, integrate_semi_infinite, integrate_with_breaks, Integral, QuadratureSpec};

/// Neumaier-compensated sum that also tracks the magnitude of what was
/// added, so callers can bound cancellation in alternating series.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    magnitude: f64,
    terms: usize,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
        self.magnitude += v.abs();
        self.terms += 1;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Worst-case rounding error of the accumulated value.
    pub fn rounding_bound(&self) -> f64 {
        (self.terms as f64 + 2.0) * f64::EPSILON * self.magnitude
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}
