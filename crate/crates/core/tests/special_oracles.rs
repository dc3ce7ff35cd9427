mod common;

use common::{bessel_k_oracle as k_oracle, choose, log_grid, simpson};
use wpcn_core::special::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn bessel_k1_against_integral_representation() {
    for x in [0.01, 0.1, 1.0, 5.0, 20.0] {
        let oracle = k_oracle(1.0, x);
        let got = bessel_k1(x).unwrap();
        assert!(rel(got, oracle) < 1e-9, "K1({x}) = {got:e}, oracle {oracle:e}");
        let scaled = bessel_k1_scaled(x).unwrap();
        assert!(rel(scaled, oracle * x.exp()) < 1e-9);
    }
}

#[test]
fn bessel_k0_against_integral_representation() {
    for x in [0.01, 0.3, 2.0, 15.0] {
        let oracle = k_oracle(0.0, x);
        assert!(rel(bessel_k0(x).unwrap(), oracle) < 1e-9, "K0({x})");
        assert!(rel(bessel_k0_scaled(x).unwrap(), oracle * x.exp()) < 1e-9);
    }
}

#[test]
fn one_minus_x_k1_has_no_cancellation() {
    // 1 - x K1(x) = ∫_0^∞ e^{-t} (1 - e^{-x²/4t}) dt, positive integrand
    for x in [1e-6, 1e-3, 0.05, 0.7, 3.0, 12.0] {
        let oracle = log_grid(|t| (-t).exp() * -(-x * x / (4.0 * t)).exp_m1(), -90.0, 5.5, 400_000);
        let got = one_minus_x_k1(x);
        assert!(rel(got, oracle) < 1e-8, "1 - xK1({x}) = {got:e}, oracle {oracle:e}");
        assert!((x_k1(x) - (1.0 - oracle)).abs() < 1e-12);
    }
    assert_eq!(one_minus_x_k1(0.0), 0.0);
    assert_eq!(x_k1(0.0), 1.0);
}

#[test]
fn bessel_rejects_nonpositive_arguments() {
    assert!(bessel_k1(0.0).is_err());
    assert!(bessel_k0(-1.0).is_err());
    assert!(bessel_k1(f64::NAN).is_err());
}

#[test]
fn incomplete_beta_against_binomial_tail() {
    // I_psi(a, b) = P(Bin(a+b-1, psi) >= a) for integer a, b
    for (a, b) in [(1, 1), (2, 3), (5, 1), (4, 7), (12, 9)] {
        let n = a + b - 1;
        for psi in [1e-4, 0.1, 0.37, 0.5, 0.9, 0.999] {
            let oracle: f64 = (a..=n)
                .map(|j| choose(n, j) * f64::powi(psi, j as i32) * (1.0 - psi).powi((n - j) as i32))
                .sum();
            let got = reg_inc_beta(psi, a as f64, b as f64).unwrap();
            assert!((got - oracle).abs() < 1e-13 + 1e-12 * oracle, "I_{psi}({a},{b})");
        }
    }
    assert_eq!(reg_inc_beta(0.0, 2.0, 3.0).unwrap(), 0.0);
    assert_eq!(reg_inc_beta(1.0, 2.0, 3.0).unwrap(), 1.0);
    assert!(reg_inc_beta(1.5, 2.0, 3.0).is_err());
}

#[test]
fn lower_incomplete_gamma() {
    let closed = 2.0 - 37.0 * (-5.0f64).exp();
    let quad = simpson(|t| t * t * (-t).exp(), 0.0, 5.0, 20_000);
    let got = lower_inc_gamma(3.0, 5.0).unwrap();
    assert!(rel(got, closed) < 1e-13);
    assert!(rel(got, quad) < 1e-12);
    for (p, q) in [(1.0, 0.3), (4.0, 2.5), (7.5, 10.0)] {
        let quad = simpson(|t: f64| t.powf(p - 1.0) * (-t).exp(), 0.0, q, 20_000);
        let g = lower_inc_gamma(p, q).unwrap();
        assert!(rel(g, quad) < 1e-10, "gamma({p}, {q})");
        let upper = upper_reg_gamma(p, q).unwrap();
        assert!((upper - (1.0 - g / ln_gamma(p).exp())).abs() < 1e-12);
    }
}

#[test]
fn binomials() {
    assert_eq!(binomial(10, 3), 120.0);
    assert_eq!(binomial(5, 0), 1.0);
    assert!((ln_binomial(200, 100) - choose(200, 100).ln()).abs() < 1e-9);
}

#[test]
fn adaptive_quadrature_on_known_integrals() {
    let spec = QuadratureSpec::relative(1e-12);
    let v = integrate_semi_infinite(|t| t.powi(3) * (-2.0 * t).exp(), 0.0, &spec).unwrap();
    assert!(rel(v.value, 6.0 / 16.0) < 1e-12);
    let v = integrate_finite(|t| t.sqrt(), 0.0, 4.0, &spec).unwrap();
    assert!(rel(v.value, 16.0 / 3.0) < 1e-10);
    // a kink handled through a breakpoint
    let v = integrate_with_breaks(|t: f64| (t - 1.0).abs(), &[0.0, 1.0, 3.0], &spec).unwrap();
    assert!(rel(v.value, 2.5) < 1e-13);
    assert!(v.abs_error >= 0.0);
}

#[test]
fn compensated_sum_recovers_small_terms() {
    let mut s = CompensatedSum::new();
    s.add(1e16);
    for _ in 0..1000 {
        s.add(1.0);
    }
    s.add(-1e16);
    assert_eq!(s.value(), 1000.0);
}
