mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wpcn_core::analytic::{outage, outage_pair};
use wpcn_core::montecarlo::*;
use wpcn_core::{EhModel, Method, PairScheme, PairSpec, Scheme, SchemeSpec, SystemParams};

fn run(target: Target, p: &SystemParams, trials: u64, seed: u64, workers: Option<usize>) -> (f64, f64) {
    let est = simulate_outage_with_workers(&TrialConfig::new(target, *p, trials, seed), workers).unwrap();
    assert_eq!(est.method, Method::MonteCarlo);
    (est.value, est.stderr.unwrap())
}

#[test]
fn agrees_with_exact_evaluators() {
    let p = common::params(6, -20.0);
    let x = common::x_of(&p);
    for scheme in Scheme::ALL {
        for model in EhModel::ALL {
            let spec = SchemeSpec::new(scheme, 2, model);
            let exact = outage(x, &spec, &p).unwrap().value;
            let (v, se) = run(Target::Single(spec), &p, 200_000, 11, None);
            assert!(
                (v - exact).abs() <= (4.0 * se).max(2e-3),
                "{scheme} {model}: mc {v} exact {exact}"
            );
        }
    }
}

#[test]
fn pairs_agree_with_exact_evaluators() {
    let p = common::params(8, -35.0).with_rate_threshold_db(-4.0).unwrap();
    let x = common::x_of(&p);
    for (scheme, k, j) in [(PairScheme::Sbs, 1, 3), (PairScheme::Sbs, 2, 6), (PairScheme::Rs, 1, 2)] {
        let pair = PairSpec::new(scheme, k, j);
        let exact = outage_pair(x, &pair, &p, EhModel::NonLinear).unwrap().value;
        let (v, se) = run(
            Target::Pair {
                pair,
                model: EhModel::NonLinear,
            },
            &p,
            200_000,
            5,
            None,
        );
        assert!(
            (v - exact).abs() <= (4.0 * se).max(1e-3),
            "{pair:?}: mc {v} exact {exact}"
        );
    }
}

#[test]
fn worker_count_does_not_change_estimates() {
    let p = common::params(5, -30.0);
    let t = Target::Single(SchemeSpec::new(Scheme::Mms, 2, EhModel::NonLinear));
    let a = run(t, &p, 50_000, 3, Some(1));
    let b = run(t, &p, 50_000, 3, Some(4));
    let c = run(t, &p, 50_000, 3, Some(7));
    assert!(a.0 > 0.0);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let d = run(t, &p, 50_000, 4, Some(1));
    assert_ne!(a, d, "{a:?} {d:?}");
}

#[test]
fn stderr_is_binomial() {
    let p = common::params(5, -30.0);
    let t = Target::Single(SchemeSpec::new(Scheme::Rs, 1, EhModel::NonLinear));
    let n = 40_000;
    let (v, se) = run(t, &p, n, 9, None);
    assert!((se - (v * (1.0 - v) / n as f64).sqrt()).abs() < 1e-12);
}

#[test]
fn estimation_error_hurts_informed_selection_only() {
    let p = common::params(5, -10.0);
    let est = |scheme, s2| {
        let cfg = TrialConfig::new(
            Target::Single(SchemeSpec::new(scheme, 1, EhModel::NonLinear)),
            p,
            200_000,
            2,
        )
        .with_estimation_error(s2);
        let e = simulate_outage(&cfg).unwrap();
        (e.value, e.stderr.unwrap())
    };
    let (clean, se0) = est(Scheme::Ibs, 0.0);
    let (noisy, se1) = est(Scheme::Ibs, 0.3);
    assert!(noisy - clean > 3.0 * (se0 + se1));
    // random selection ignores the estimates
    let (a, sa) = est(Scheme::Rs, 0.0);
    let (b, sb) = est(Scheme::Rs, 0.3);
    assert!((a - b).abs() < 4.0 * (sa + sb));
}

#[test]
fn draws_have_unit_mean_gains() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut sg, mut sh, mut se) = (0.0, 0.0, 0.0);
    let n = 20_000;
    for _ in 0..n {
        let d = draw_channels(4, 0.2, &mut rng);
        sg += d.gains_g.iter().sum::<f64>();
        sh += d.gains_h.iter().sum::<f64>();
        se += d.est_g.as_ref().unwrap().iter().sum::<f64>();
    }
    let n = (4 * n) as f64;
    assert!((sg / n - 1.0).abs() < 0.02);
    assert!((sh / n - 1.0).abs() < 0.02);
    // estimates carry 1 - sigma_e2 of the power
    assert!((se / n - 0.8).abs() < 0.02);
    let d = draw_channels(4, 0.0, &mut rng);
    assert!(d.est_g.is_none() && d.est_h.is_none());
}

#[test]
fn selection_picks_the_kth_ranked_device() {
    let p = SystemParams::default();
    let draw = ChannelDraw {
        gains_g: vec![0.5, 2.0, 1.0, 3.0],
        gains_h: vec![4.0, 0.1, 2.0, 1.5],
        est_g: None,
        est_h: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let pick = |scheme, k, rng: &mut ChaCha8Rng| {
        select_device(&SchemeSpec::new(scheme, k, EhModel::NonLinear), &draw, &p, rng)
    };
    assert_eq!(pick(Scheme::Ebs, 1, &mut rng), 3);
    assert_eq!(pick(Scheme::Ebs, 2, &mut rng), 1);
    assert_eq!(pick(Scheme::Ibs, 1, &mut rng), 0);
    assert_eq!(pick(Scheme::Ibs, 3, &mut rng), 3);
    // minima: 0.5, 0.1, 1.0, 1.5
    assert_eq!(pick(Scheme::Mms, 1, &mut rng), 3);
    assert_eq!(pick(Scheme::Mms, 4, &mut rng), 1);
}

#[test]
fn ties_go_to_the_lowest_index() {
    let p = SystemParams::default();
    let draw = ChannelDraw {
        gains_g: vec![1.0, 1.0, 1.0],
        gains_h: vec![2.0, 2.0, 2.0],
        est_g: None,
        est_h: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for k in 1..=3 {
        let i = select_device(
            &SchemeSpec::new(Scheme::Ebs, k, EhModel::NonLinear),
            &draw,
            &p,
            &mut rng,
        );
        assert_eq!(i, k - 1);
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let p = common::params(5, 0.0);
    let t = Target::Single(SchemeSpec::new(Scheme::Sbs, 6, EhModel::NonLinear));
    assert!(simulate_outage(&TrialConfig::new(t, p, 10, 1)).is_err());
    let t = Target::Single(SchemeSpec::new(Scheme::Sbs, 1, EhModel::NonLinear));
    assert!(simulate_outage(&TrialConfig::new(t, p, 0, 1)).is_err());
    assert!(simulate_outage(&TrialConfig::new(t, p, 10, 1).with_estimation_error(1.0)).is_err());
}
