//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! Power series around the origin for `x <= 2`; Steed's continued fraction
//! (Temme's CF2 form) above. Both branches are accurate to a few ulps.
//! The scaled variants return `e^x K_nu(x)` so callers can stay in log space
//! when the Bessel argument is large.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_CUTOVER: f64 = 2.0;
const MAX_TERMS: usize = 500;

/// `K_1(x)` for `x > 0`. Underflows to `0.0` for very large arguments.
pub fn bessel_k1(x: f64) -> Result<f64> {
    check_positive(x)?;
    if x <= SERIES_CUTOVER {
        Ok(series(x).1)
    } else {
        Ok(steed_scaled(x).1 * (-x).exp())
    }
}

/// `K_0(x)` for `x > 0`.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check_positive(x)?;
    if x <= SERIES_CUTOVER {
        Ok(series(x).0)
    } else {
        Ok(steed_scaled(x).0 * (-x).exp())
    }
}

/// `e^x K_1(x)` for `x > 0`.
pub fn bessel_k1_scaled(x: f64) -> Result<f64> {
    check_positive(x)?;
    if x <= SERIES_CUTOVER {
        Ok(series(x).1 * x.exp())
    } else {
        Ok(steed_scaled(x).1)
    }
}

/// `e^x K_0(x)` for `x > 0`.
pub fn bessel_k0_scaled(x: f64) -> Result<f64> {
    check_positive(x)?;
    if x <= SERIES_CUTOVER {
        Ok(series(x).0 * x.exp())
    } else {
        Ok(steed_scaled(x).0)
    }
}

/// `x K_1(x)`, extended continuously with the value 1 at `x = 0`.
pub fn x_k1(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x <= SERIES_CUTOVER {
        1.0 - one_minus_x_k1_series(x)
    } else if x.is_infinite() {
        0.0
    } else {
        x * steed_scaled(x).1 * (-x).exp()
    }
}

/// `1 - x K_1(x)` without cancellation for small `x`; `0` at `x = 0`.
///
/// This is the CDF-shaped quantity behind every outage expression, which is
/// why it gets its own series: near the origin `x K_1(x) -> 1` and the naive
/// difference would lose all significant digits.
pub fn one_minus_x_k1(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x <= SERIES_CUTOVER {
        one_minus_x_k1_series(x)
    } else {
        1.0 - x_k1(x)
    }
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("Bessel K requires x > 0, got {x}")))
    }
}

/// Returns `(K_0(x), K_1(x))` from the ascending series.
fn series(x: f64) -> (f64, f64) {
    let t = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // I0, I1 and the digamma-weighted sums share the same term recurrence.
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut k0_tail = 0.0;
    let mut k1_tail = 0.0;
    // term0 = t^k / (k!)^2, term1 = t^k / (k! (k+1)!)
    let mut term0 = 1.0;
    let mut term1 = 1.0;
    let mut harmonic = 0.0; // H_k
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        if k > 0 {
            harmonic += 1.0 / kf;
        }
        let psi_k1 = -EULER_GAMMA + harmonic; // psi(k+1)
        let psi_k2 = psi_k1 + 1.0 / (kf + 1.0); // psi(k+2)
        i0 += term0;
        i1 += term1;
        k0_tail += psi_k1 * term0;
        k1_tail += (psi_k1 + psi_k2) * term1;
        if term0 < 1e-18 * i0.abs() && term1 < 1e-18 * i1.abs() {
            break;
        }
        term0 *= t / ((kf + 1.0) * (kf + 1.0));
        term1 *= t / ((kf + 1.0) * (kf + 2.0));
    }
    let i1 = 0.5 * x * i1;
    let k0 = -log_half * i0 + k0_tail;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_tail;
    (k0, k1)
}

/// `1 - x K_1(x) = -x ln(x/2) I_1(x) + (x^2/4) sum_k (psi(k+1)+psi(k+2)) t^k/(k!(k+1)!)`.
fn one_minus_x_k1_series(x: f64) -> f64 {
    let t = 0.25 * x * x;
    let log_half = (0.5 * x).ln();
    let mut i1_sum = 0.0;
    let mut tail = 0.0;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        if k > 0 {
            harmonic += 1.0 / kf;
        }
        let psi_k1 = -EULER_GAMMA + harmonic;
        let psi_k2 = psi_k1 + 1.0 / (kf + 1.0);
        i1_sum += term;
        tail += (psi_k1 + psi_k2) * term;
        if term < 1e-18 * i1_sum {
            break;
        }
        term *= t / ((kf + 1.0) * (kf + 2.0));
    }
    // x I_1(x) = 2 t * i1_sum
    -2.0 * t * log_half * i1_sum + t * tail
}

/// Returns `(e^x K_0(x), e^x K_1(x))` for `x > 2` via Steed's method.
fn steed_scaled(x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-17;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with mpmath at 30 digits.
    #[test]
    #[allow(clippy::excessive_precision)]
    fn tabulated_values() {
        let cases = [
            (0.1, 2.427_069_024_702_016_6, 9.853_844_780_870_606),
            (1.0, 0.421_024_438_240_708_33, 0.601_907_230_197_234_6),
            (2.0, 0.113_893_872_749_533_44, 0.139_865_881_816_522_43),
            (2.5, 0.062_347_553_200_366_19, 0.073_890_816_347_747_06),
            (10.0, 1.778_006_231_616_765_2e-5, 1.864_877_345_382_558_5e-5),
        ];
        for (x, k0, k1) in cases {
            assert!((bessel_k0(x).unwrap() / k0 - 1.0).abs() < 1e-13, "K0({x})");
            assert!((bessel_k1(x).unwrap() / k1 - 1.0).abs() < 1e-13, "K1({x})");
        }
    }

    #[test]
    fn branches_meet_at_cutover() {
        let below = series(SERIES_CUTOVER);
        let above = steed_scaled(SERIES_CUTOVER);
        let e = (-SERIES_CUTOVER).exp();
        assert!((below.0 / (above.0 * e) - 1.0).abs() < 1e-14);
        assert!((below.1 / (above.1 * e) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn small_argument_limit() {
        let x = 1e-6;
        assert!((x * bessel_k1(x).unwrap() - 1.0).abs() < 1e-5);
        assert!((x_k1(x) - 1.0).abs() < 1e-10);
        assert_eq!(x_k1(0.0), 1.0);
        assert_eq!(one_minus_x_k1(0.0), 0.0);
    }

    #[test]
    fn complement_has_full_relative_precision() {
        // 1 - x K1(x) ~ (x^2/2) ln(2/x) for tiny x
        let x: f64 = 1e-6;
        let v = one_minus_x_k1(x);
        let approx = 0.5 * x * x * ((2.0 / x).ln() - EULER_GAMMA + 0.5);
        assert!((v / approx - 1.0).abs() < 1e-6);
        for &x in &[0.3, 1.0, 1.9, 2.0, 2.1, 5.0] {
            assert!((one_minus_x_k1(x) - (1.0 - x * bessel_k1(x).unwrap())).abs() < 1e-15);
        }
    }

    #[test]
    fn domain_and_underflow() {
        assert!(bessel_k1(0.0).is_err());
        assert!(bessel_k1(-1.0).is_err());
        assert!(bessel_k1(f64::NAN).is_err());
        assert!(bessel_k1(700.0).unwrap() > 0.0);
        assert_eq!(bessel_k1(800.0).unwrap(), 0.0);
        assert!(bessel_k1_scaled(800.0).unwrap() > 0.0);
    }

    #[test]
    fn positive_and_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 1..=100 {
            let v = bessel_k1(0.1 * i as f64).unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }
}
