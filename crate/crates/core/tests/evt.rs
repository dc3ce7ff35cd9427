mod common;

use common::{downlink_excess, kth_largest_cdf, simpson, unit_snr};
use wpcn_core::analytic::outage;
use wpcn_core::evt::*;
use wpcn_core::special::ln_gamma;
use wpcn_core::{EhModel, PairScheme, PairSpec, Scheme, SchemeSpec, SystemParams};

/// Density of the k-th extreme Gumbel law.
fn gumbel_pdf(z: f64, k: usize) -> f64 {
    (-(-z).exp() - k as f64 * z - ln_gamma(k as f64)).exp()
}

fn ebs_limit(x: f64, k: usize, p: &SystemParams, model: EhModel) -> f64 {
    let ln_m = (p.num_devices() as f64).ln();
    simpson(
        |z| {
            let g = ln_m + z;
            let out = if g <= 0.0 {
                1.0
            } else {
                common::uplink_outage(x, g, p, model)
            };
            gumbel_pdf(z, k) * out
        },
        -ln_m - 8.0,
        60.0,
        400_000,
    )
}

fn ibs_limit(x: f64, k: usize, p: &SystemParams, model: EhModel) -> f64 {
    let ln_m = (p.num_devices() as f64).ln();
    simpson(
        |z| {
            let h = ln_m + z;
            if h <= 0.0 {
                return 0.0;
            }
            gumbel_pdf(z, k) * -(-downlink_excess(x, 0.0, h, p, model)).exp_m1()
        },
        -ln_m,
        60.0,
        400_000,
    )
}

fn mms_limit(x: f64, k: usize, p: &SystemParams, model: EhModel) -> f64 {
    let m = p.num_devices();
    let ln_m = (m as f64).ln();
    let r = x / unit_snr(f64::INFINITY, p, model);
    let dens = |y: f64| 2.0 * gumbel_pdf(2.0 * y - ln_m, k);
    let weak_g = simpson(
        |y| {
            let need = x / unit_snr(y, p, model);
            dens(y) * -(-(need - y).max(0.0)).exp_m1()
        },
        1e-300,
        30.0,
        400_000,
    );
    let weak_h = simpson(
        |y| dens(y) * -(-downlink_excess(x, y, y, p, model)).exp_m1(),
        r,
        r + 30.0,
        400_000,
    );
    let below_r = kth_largest_cdf(-(-2.0 * r).exp_m1(), m, k);
    0.5 * (weak_g + below_r + weak_h)
}

fn close(a: f64, b: f64, what: &str) {
    assert!((a - b).abs() <= 1e-7 + 1e-6 * b, "{what}: {a:e} vs oracle {b:e}");
}

#[test]
fn gumbel_kth_cdf_closed_forms() {
    for z in [-3.0f64, -0.5, 0.0, 1.0, 4.0, 30.0] {
        let e = (-z).exp();
        assert!((gumbel_kth_cdf(z, 1) - (-e).exp()).abs() < 1e-15);
        assert!((gumbel_kth_cdf(z, 2) - (-e).exp() * (1.0 + e)).abs() < 1e-15);
        for k in 2..6 {
            assert!(gumbel_kth_cdf(z, k) >= gumbel_kth_cdf(z, k - 1));
        }
    }
    // extreme arguments stay finite
    assert_eq!(gumbel_kth_cdf(-800.0, 3), 0.0);
    assert_eq!(gumbel_kth_cdf(f64::INFINITY, 3), 1.0);
    assert!((gumbel_kth_cdf(-40.0, 200) - 0.0).abs() < 1e-12);
}

#[test]
fn sbs_constants_solve_their_defining_equations() {
    let model = EhModel::NonLinear;
    for (m, pt) in [(10, -40.0), (50, -10.0)] {
        let p = common::params(m, pt);
        let c = normalizing_constants(Scheme::Sbs, &p, model).unwrap();
        let tail = 1.0 - common::parent_cdf(c.eta, &p, model);
        assert!((tail * m as f64 - 1.0).abs() < 1e-6, "eta tail {tail:e}");
        let tail = 1.0 - common::parent_cdf(c.eta + c.xi, &p, model);
        assert!((tail * std::f64::consts::E * m as f64 - 1.0).abs() < 1e-6);
        let x = common::x_of(&p);
        let direct = gumbel_kth_cdf((x - c.eta) / c.xi, 2);
        assert_eq!(outage_evt_sbs(x, 2, &p, model).unwrap().value, direct);
    }
    let p = common::params(30, 0.0);
    let c = normalizing_constants(Scheme::Mms, &p, EhModel::Linear).unwrap();
    assert!((c.eta - 0.5 * 30f64.ln()).abs() < 1e-15 && c.xi == 0.5);
}

#[test]
fn limit_forms_match_direct_integration() {
    for model in EhModel::ALL {
        for (m, pt) in [(10, -40.0), (40, -20.0)] {
            let p = common::params(m, pt);
            let x = common::x_of(&p);
            for k in [1, 2] {
                let tag = |s| format!("{s} M={m} pt={pt} k={k} {model}");
                close(
                    outage_evt_ebs(x, k, &p, model).unwrap().value,
                    ebs_limit(x, k, &p, model),
                    &tag("ebs"),
                );
                close(
                    outage_evt_ibs(x, k, &p, model).unwrap().value,
                    ibs_limit(x, k, &p, model),
                    &tag("ibs"),
                );
                close(
                    outage_evt_mms(x, k, &p, model).unwrap().value,
                    mms_limit(x, k, &p, model),
                    &tag("mms"),
                );
            }
        }
    }
}

fn sup_gap(scheme: Scheme, k: usize, m: usize, model: EhModel) -> f64 {
    let p = common::params(m, -40.0);
    let spec = SchemeSpec::new(scheme, k, model);
    (0..30)
        .map(|i| 0.1 * 10f64.powf(4.0 * i as f64 / 29.0))
        .map(|x| (outage_evt(x, &spec, &p).unwrap().value - outage(x, &spec, &p).unwrap().value).abs())
        .fold(0.0, f64::max)
}

#[test]
fn gap_to_exact_shrinks_with_population() {
    for scheme in [Scheme::Sbs, Scheme::Ebs, Scheme::Ibs, Scheme::Mms] {
        for k in [1, 2] {
            let gaps: Vec<f64> = [10, 50, 200]
                .iter()
                .map(|&m| sup_gap(scheme, k, m, EhModel::NonLinear))
                .collect();
            assert!(
                gaps[1] <= gaps[0] + 1e-12 && gaps[2] <= gaps[1] + 1e-12,
                "{scheme} k={k}: {gaps:?}"
            );
        }
    }
}

#[test]
fn outputs_are_probabilities_and_monotone_in_threshold() {
    let p = common::params(25, -30.0);
    for scheme in [Scheme::Sbs, Scheme::Ebs, Scheme::Ibs, Scheme::Mms] {
        let spec = SchemeSpec::new(scheme, 3, EhModel::NonLinear);
        assert_eq!(outage_evt(0.0, &spec, &p).unwrap().value, 0.0);
        let mut last = 0.0;
        for i in 0..40 {
            let x = 1e-3 * 1.5f64.powi(i);
            let v = outage_evt(x, &spec, &p).unwrap().value;
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= last - 1e-9, "{scheme} not monotone at x={x}");
            last = v;
        }
    }
    assert!(outage_evt(1.0, &SchemeSpec::new(Scheme::Rs, 1, EhModel::NonLinear), &p).is_err());
}

#[test]
fn pair_limit_is_a_probability_below_each_marginal() {
    let p = common::params(20, -40.0).with_rate_threshold_db(-4.0).unwrap();
    let x = common::x_of(&p);
    let pair = PairSpec::new(PairScheme::Sbs, 1, 4);
    let v = outage_evt_pair(x, &pair, &p, EhModel::NonLinear).unwrap().value;
    let single = outage_evt_sbs(x, 1, &p, EhModel::NonLinear).unwrap().value;
    assert!(v > 0.0 && v <= single);
    assert_eq!(outage_evt_pair(0.0, &pair, &p, EhModel::NonLinear).unwrap().value, 0.0);
}
