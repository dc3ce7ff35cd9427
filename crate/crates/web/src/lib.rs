//! Browser bindings for the outage evaluators. Curves come back as flat
//! `Float64Array`s; points that cannot be evaluated are NaN.

use wasm_bindgen::prelude::*;
use wpcn_core::analytic::{outage, outage_high_snr};
use wpcn_core::evt::outage_evt;
use wpcn_core::experiments::optimize::{find_optimal_t1, outage_at_t1};
use wpcn_core::model::threshold_x;
use wpcn_core::{EhModel, Result, Scheme, SchemeSpec, SystemParams};

fn parse(scheme: &str, model: &str, k: usize) -> std::result::Result<SchemeSpec, JsError> {
    let scheme: Scheme = scheme.parse().map_err(|e| JsError::new(&format!("{e}")))?;
    let model: EhModel = model.parse().map_err(|e| JsError::new(&format!("{e}")))?;
    Ok(SchemeSpec::new(scheme, k, model))
}

fn params(m: usize, pt_dbm: f64, t1: f64, q_db: f64, noise_dbm: f64) -> Result<SystemParams> {
    SystemParams::default()
        .with_num_devices(m)?
        .with_transmit_power_dbm(pt_dbm)?
        .with_harvest_fraction(t1)?
        .with_rate_threshold_db(q_db)?
        .with_noise_variance(wpcn_core::model::dbm_to_watts(noise_dbm))
}

fn or_nan(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

/// Exact and high-SNR outage over a transmit power grid.
/// Returns `[pt, exact, floor]` triples.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn outage_vs_power(
    scheme: &str,
    model: &str,
    k: usize,
    m: usize,
    t1: f64,
    q_db: f64,
    noise_dbm: f64,
    pt_from: f64,
    pt_to: f64,
    points: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    let spec = parse(scheme, model, k)?;
    let points = points.max(2);
    let mut out = Vec::with_capacity(3 * points);
    for i in 0..points {
        let pt = pt_from + (pt_to - pt_from) * i as f64 / (points - 1) as f64;
        let p = params(m, pt, t1, q_db, noise_dbm);
        let (exact, floor) = match p {
            Ok(p) => {
                let x = threshold_x(&p);
                let floor = if spec.model == EhModel::Linear {
                    0.0
                } else {
                    or_nan(outage_high_snr(x, &spec, &p).map(|e| e.value))
                };
                (or_nan(outage(x, &spec, &p).map(|e| e.value)), floor)
            }
            Err(_) => (f64::NAN, f64::NAN),
        };
        out.extend([pt, exact, floor]);
    }
    Ok(out)
}

/// Exact outage against its extreme-value approximation as M grows.
/// Returns `[M, exact, evt]` triples.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn evt_vs_devices(
    scheme: &str,
    model: &str,
    k: usize,
    pt_dbm: f64,
    t1: f64,
    q_db: f64,
    noise_dbm: f64,
    m_max: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    let spec = parse(scheme, model, k)?;
    if spec.scheme == Scheme::Rs {
        return Err(JsError::new("random selection has no extreme-value form"));
    }
    let mut out = Vec::new();
    let mut m = k.max(2);
    while m <= m_max {
        let (exact, evt) = match params(m, pt_dbm, t1, q_db, noise_dbm) {
            Ok(p) => {
                let x = threshold_x(&p);
                (
                    or_nan(outage(x, &spec, &p).map(|e| e.value)),
                    or_nan(outage_evt(x, &spec, &p).map(|e| e.value)),
                )
            }
            Err(_) => (f64::NAN, f64::NAN),
        };
        out.extend([m as f64, exact, evt]);
        m += if m < 20 { 1 } else { 5 };
    }
    Ok(out)
}

/// Outage across the harvesting fraction followed by the optimum.
/// Returns `[t1, outage]` pairs, then `t_star, outage_star` as the last two entries.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn t1_tradeoff(
    scheme: &str,
    model: &str,
    k: usize,
    m: usize,
    pt_dbm: f64,
    q_db: f64,
    noise_dbm: f64,
    points: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    let spec = parse(scheme, model, k)?;
    let p = params(m, pt_dbm, 0.5, q_db, noise_dbm).map_err(|e| JsError::new(&e.to_string()))?;
    let points = points.max(3);
    let mut out = Vec::with_capacity(2 * points + 2);
    for i in 1..=points {
        let t1 = i as f64 / (points + 1) as f64;
        out.extend([t1, or_nan(outage_at_t1(&spec, &p, t1))]);
    }
    let opt = find_optimal_t1(&spec, &p, 1e-4).map_err(|e| JsError::new(&e.to_string()))?;
    out.extend([opt.t_star, opt.outage]);
    Ok(out)
}
