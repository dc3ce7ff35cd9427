//! Brute-force reference computations built straight from the channel model:
//! fixed-step Simpson rules and order-statistic sums, nothing from the
//! library's analytic layer.
#![allow(dead_code)]

use wpcn_core::model::{harvested_energy, snr, threshold_x};
use wpcn_core::{EhModel, SystemParams};

pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// ∫_0^∞ f on a log-spaced grid, y = e^s for s in [-40, 5.5]; resolves
/// boundary layers at any scale. `f` must be bounded and decay exponentially.
pub fn half_line<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    log_grid(f, -40.0, 5.5, n)
}

/// ∫_{e^lo}^{e^hi} f on a log-spaced grid.
pub fn log_grid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    simpson(
        |s| {
            let y = s.exp();
            let v = f(y) * y;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        lo,
        hi,
        n,
    )
}

/// SNR per unit uplink gain for downlink gain `g`.
pub fn unit_snr(g: f64, p: &SystemParams, model: EhModel) -> f64 {
    snr(1.0, harvested_energy(g, p, model), p)
}

/// P(h < x / unit_snr(g)) for h ~ Exp(1).
pub fn uplink_outage(x: f64, g: f64, p: &SystemParams, model: EhModel) -> f64 {
    let u = unit_snr(g, p, model);
    if u <= 0.0 {
        1.0
    } else {
        -(-x / u).exp_m1()
    }
}

/// Outage of an unselected device.
pub fn parent_cdf(x: f64, p: &SystemParams, model: EhModel) -> f64 {
    half_line(|g| (-g).exp() * uplink_outage(x, g, p, model), 40_000)
}

pub fn choose(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// P(k-th largest of m iid draws ≤ t) given F(t).
pub fn kth_largest_cdf(f: f64, m: usize, k: usize) -> f64 {
    (0..k)
        .map(|i| choose(m, i) * (1.0 - f).powi(i as i32) * f.powi((m - i) as i32))
        .sum()
}

/// Density of the k-th largest of m iid Exp(rate).
pub fn kth_largest_exp_pdf(y: f64, m: usize, k: usize, rate: f64) -> f64 {
    let f = -(-rate * y).exp_m1();
    let tail = (-rate * y).exp();
    m as f64 * choose(m - 1, k - 1) * rate * tail.powi(k as i32) * f.powi((m - k) as i32)
}

pub fn sbs(x: f64, k: usize, p: &SystemParams, model: EhModel) -> f64 {
    kth_largest_cdf(parent_cdf(x, p, model), p.num_devices(), k)
}

/// Energy ranking follows the downlink gain.
pub fn ebs(x: f64, k: usize, p: &SystemParams, model: EhModel) -> f64 {
    let m = p.num_devices();
    half_line(
        |g| kth_largest_exp_pdf(g, m, k, 1.0) * uplink_outage(x, g, p, model),
        40_000,
    )
}

/// Uplink ranking: condition on the downlink gain instead.
pub fn ibs(x: f64, k: usize, p: &SystemParams, model: EhModel) -> f64 {
    let m = p.num_devices();
    half_line(
        |g| {
            let u = unit_snr(g, p, model);
            let f = if u <= 0.0 { 1.0 } else { -(-x / u).exp_m1() };
            (-g).exp() * kth_largest_cdf(f, m, k)
        },
        40_000,
    )
}

/// Smallest e ≥ 0 with unit_snr(base + e)·h ≥ x, or ∞.
pub fn downlink_excess(x: f64, base: f64, h: f64, p: &SystemParams, model: EhModel) -> f64 {
    let ok = |e: f64| unit_snr(base + e, p, model) * h >= x;
    if ok(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e6 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid
        } else {
            lo = mid
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Worst-link ranking: the k-th largest minimum is Exp(2)-ordered; the
/// other link exceeds it by an independent Exp(1), each side with prob. 1/2.
pub fn mms(x: f64, k: usize, p: &SystemParams, model: EhModel) -> f64 {
    let m = p.num_devices();
    half_line(
        |y| {
            // g = y, h = y + E
            let u = unit_snr(y, p, model);
            let need = if u <= 0.0 { f64::INFINITY } else { x / u };
            let a = 1.0 - (-(need - y).max(0.0)).exp();
            // h = y, g = y + E
            let e = downlink_excess(x, y, y, p, model);
            let b = -(-e).exp_m1();
            kth_largest_exp_pdf(y, m, k, 2.0) * 0.5 * (a + b)
        },
        100_000,
    )
}

pub fn rs(x: f64, p: &SystemParams, model: EhModel) -> f64 {
    parent_cdf(x, p, model)
}

pub fn params(m: usize, pt_dbm: f64) -> SystemParams {
    SystemParams::default()
        .with_num_devices(m)
        .unwrap()
        .with_transmit_power_dbm(pt_dbm)
        .unwrap()
}

pub fn x_of(p: &SystemParams) -> f64 {
    threshold_x(p)
}

/// K_nu(x) = ∫_0^∞ e^{-x cosh t} cosh(nu t) dt.
pub fn bessel_k_oracle(nu: f64, x: f64) -> f64 {
    let top = (760.0 / x).max(2.0).acosh();
    simpson(|t| (-x * t.cosh()).exp() * (nu * t).cosh(), 0.0, top, 200_000)
}
