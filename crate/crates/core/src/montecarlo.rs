//! Monte Carlo ground truth: draw Rayleigh channels, apply each scheme's
//! ranking rule literally, count outages.
//!
//! Every trial owns its random stream (`ChaCha8` keyed by the base seed,
//! stream = trial index), and trials are grouped into fixed-size chunks
//! whose integer counts are summed. The estimate therefore depends only on
//! the seed and the configuration, never on how many workers ran it.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::analytic::{OutageEstimate, PairScheme, PairSpec, Scheme, SchemeSpec};
use crate::error::{Error, Result};
use crate::model::{harvested_energy, snr, threshold_x, EhModel, SystemParams};

/// Environment variable capping the number of simulation workers.
pub const THREADS_ENV: &str = "WPCN_SELECT_THREADS";

const CHUNK: u64 = 4096;

/// What a simulation schedules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Target {
    Single(SchemeSpec),
    Pair { pair: PairSpec, model: EhModel },
}

impl Target {
    fn validate(&self, m: usize) -> Result<()> {
        match self {
            Target::Single(s) => s.validate(m),
            Target::Pair { pair, .. } => pair.validate(m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub num_trials: u64,
    pub base_seed: u64,
    /// MMSE estimation error variance on both links; 0 is perfect CSI.
    pub estimation_error_var: f64,
    pub params: SystemParams,
    pub target: Target,
}

impl TrialConfig {
    pub fn new(target: Target, params: SystemParams, num_trials: u64, base_seed: u64) -> Self {
        TrialConfig {
            num_trials,
            base_seed,
            estimation_error_var: 0.0,
            params,
            target,
        }
    }

    pub fn with_estimation_error(mut self, sigma_e2: f64) -> Self {
        self.estimation_error_var = sigma_e2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_trials == 0 {
            return Err(Error::invalid("at least one Monte Carlo trial is required"));
        }
        if !(0.0..1.0).contains(&self.estimation_error_var) {
            return Err(Error::invalid(format!(
                "estimation error variance must lie in [0, 1), got {}",
                self.estimation_error_var
            )));
        }
        self.target.validate(self.params.num_devices())
    }
}

/// One slot's channel powers for `M` devices. The estimates are present
/// only with imperfect CSI.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelDraw {
    pub gains_g: Vec<f64>,
    pub gains_h: Vec<f64>,
    pub est_g: Option<Vec<f64>>,
    pub est_h: Option<Vec<f64>>,
}

impl ChannelDraw {
    fn ranking_g(&self) -> &[f64] {
        self.est_g.as_deref().unwrap_or(&self.gains_g)
    }

    fn ranking_h(&self) -> &[f64] {
        self.est_h.as_deref().unwrap_or(&self.gains_h)
    }

    fn refill<R: Rng>(&mut self, m: usize, sigma_e2: f64, rng: &mut R) {
        self.gains_g.clear();
        self.gains_h.clear();
        if sigma_e2 == 0.0 {
            self.est_g = None;
            self.est_h = None;
            for _ in 0..m {
                self.gains_g.push(exponential(rng));
                self.gains_h.push(exponential(rng));
            }
            return;
        }
        let est_g = self.est_g.get_or_insert_with(Vec::new);
        let est_h = self.est_h.get_or_insert_with(Vec::new);
        est_g.clear();
        est_h.clear();
        // Real and imaginary parts each carry half of a complex variance.
        let est_sd = ((1.0 - sigma_e2) / 2.0).sqrt();
        let err_sd = (sigma_e2 / 2.0).sqrt();
        for _ in 0..m {
            for (truth, est) in [(&mut self.gains_g, &mut *est_g), (&mut self.gains_h, &mut *est_h)] {
                let er: f64 = est_sd * rng.sample::<f64, _>(StandardNormal);
                let ei: f64 = est_sd * rng.sample::<f64, _>(StandardNormal);
                let nr: f64 = err_sd * rng.sample::<f64, _>(StandardNormal);
                let ni: f64 = err_sd * rng.sample::<f64, _>(StandardNormal);
                est.push(er * er + ei * ei);
                truth.push((er + nr).powi(2) + (ei + ni).powi(2));
            }
        }
    }
}

/// Unit-mean exponential by inversion.
fn exponential<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(-u).ln_1p()
}

/// Draws unit-mean Rayleigh power gains for `m` devices. With
/// `sigma_e2 > 0` each coefficient is an estimate with variance
/// `1 - sigma_e2` plus an independent error with variance `sigma_e2`.
pub fn draw_channels<R: Rng>(m: usize, sigma_e2: f64, rng: &mut R) -> ChannelDraw {
    let mut d = ChannelDraw::default();
    d.refill(m, sigma_e2, rng);
    d
}

/// Index of the k-th largest entry (`k = 1` is the maximum); ties go to the
/// lowest index.
fn kth_largest(values: &[f64], k: usize, scratch: &mut Vec<usize>) -> usize {
    scratch.clear();
    scratch.extend(0..values.len());
    let (_, nth, _) = scratch.select_nth_unstable_by(k - 1, |&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    *nth
}

fn ranking_values(scheme: Scheme, model: EhModel, draw: &ChannelDraw, params: &SystemParams, out: &mut Vec<f64>) {
    let g = draw.ranking_g();
    let h = draw.ranking_h();
    out.clear();
    match scheme {
        Scheme::Rs | Scheme::Sbs => out.extend(
            g.iter()
                .zip(h)
                .map(|(&g, &h)| snr(h, harvested_energy(g, params, model), params)),
        ),
        Scheme::Ebs => out.extend(g.iter().map(|&g| harvested_energy(g, params, model))),
        Scheme::Ibs => out.extend_from_slice(h),
        Scheme::Mms => out.extend(g.iter().zip(h).map(|(&g, &h)| g.min(h))),
    }
}

/// Device scheduled by `spec` for this draw. Random selection consumes one
/// uniform from `rng`; the ranked schemes ignore it.
pub fn select_device<R: Rng>(spec: &SchemeSpec, draw: &ChannelDraw, params: &SystemParams, rng: &mut R) -> usize {
    let mut values = Vec::new();
    let mut scratch = Vec::new();
    select_with(spec, draw, params, rng, &mut values, &mut scratch)
}

fn select_with<R: Rng>(
    spec: &SchemeSpec,
    draw: &ChannelDraw,
    params: &SystemParams,
    rng: &mut R,
    values: &mut Vec<f64>,
    scratch: &mut Vec<usize>,
) -> usize {
    let m = draw.gains_g.len();
    if spec.scheme == Scheme::Rs {
        return rng.random_range(0..m);
    }
    ranking_values(spec.scheme, spec.model, draw, params, values);
    kth_largest(values, spec.k, scratch)
}

/// Devices scheduled by a pair rule, as (k-th, j-th).
pub fn select_pair<R: Rng>(
    pair: &PairSpec,
    model: EhModel,
    draw: &ChannelDraw,
    params: &SystemParams,
    rng: &mut R,
) -> (usize, usize) {
    let mut values = Vec::new();
    let mut scratch = Vec::new();
    select_pair_with(pair, model, draw, params, rng, &mut values, &mut scratch)
}

fn select_pair_with<R: Rng>(
    pair: &PairSpec,
    model: EhModel,
    draw: &ChannelDraw,
    params: &SystemParams,
    rng: &mut R,
    values: &mut Vec<f64>,
    scratch: &mut Vec<usize>,
) -> (usize, usize) {
    let m = draw.gains_g.len();
    match pair.scheme {
        PairScheme::Rs => {
            let a = rng.random_range(0..m);
            let mut b = rng.random_range(0..m - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        }
        PairScheme::Sbs => {
            ranking_values(Scheme::Sbs, model, draw, params, values);
            let a = kth_largest(values, pair.k, scratch);
            let b = kth_largest(values, pair.j, scratch);
            (a, b)
        }
    }
}

struct Worker {
    draw: ChannelDraw,
    values: Vec<f64>,
    scratch: Vec<usize>,
}

fn true_snr(i: usize, draw: &ChannelDraw, params: &SystemParams, model: EhModel) -> f64 {
    snr(
        draw.gains_h[i],
        harvested_energy(draw.gains_g[i], params, model),
        params,
    )
}

fn count_chunk(cfg: &TrialConfig, template: &ChaCha8Rng, x: f64, chunk: u64) -> u64 {
    let m = cfg.params.num_devices();
    let start = chunk * CHUNK;
    let end = (start + CHUNK).min(cfg.num_trials);
    let mut w = Worker {
        draw: ChannelDraw::default(),
        values: Vec::with_capacity(m),
        scratch: Vec::with_capacity(m),
    };
    let mut hits = 0;
    for trial in start..end {
        let mut rng = template.clone();
        rng.set_stream(trial);
        w.draw.refill(m, cfg.estimation_error_var, &mut rng);
        let outage = match &cfg.target {
            Target::Single(spec) => {
                let i = select_with(spec, &w.draw, &cfg.params, &mut rng, &mut w.values, &mut w.scratch);
                true_snr(i, &w.draw, &cfg.params, spec.model) <= x
            }
            Target::Pair { pair, model } => {
                let (a, b) = select_pair_with(
                    pair,
                    *model,
                    &w.draw,
                    &cfg.params,
                    &mut rng,
                    &mut w.values,
                    &mut w.scratch,
                );
                let xa = true_snr(a, &w.draw, &cfg.params, *model);
                let xb = true_snr(b, &w.draw, &cfg.params, *model);
                xa <= x * (xb + 1.0) && xb <= x * (xa + 1.0)
            }
        };
        hits += outage as u64;
    }
    hits
}

/// Worker cap from [`THREADS_ENV`], if set to a positive integer.
pub fn worker_cap_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Estimates outage with the worker count taken from [`THREADS_ENV`].
pub fn simulate_outage(config: &TrialConfig) -> Result<OutageEstimate> {
    simulate_outage_with_workers(config, worker_cap_from_env())
}

/// Estimates outage with at most `workers` threads (`None`: all cores).
/// The result is bit-identical for every worker count.
pub fn simulate_outage_with_workers(config: &TrialConfig, workers: Option<usize>) -> Result<OutageEstimate> {
    config.validate()?;
    let x = threshold_x(&config.params);
    let mut template = ChaCha8Rng::seed_from_u64(config.base_seed);
    template.set_word_pos(0);
    let chunks = config.num_trials.div_ceil(CHUNK);
    let hits = run_chunks(chunks, workers, |c| count_chunk(config, &template, x, c))?;
    let n = config.num_trials as f64;
    let p = hits as f64 / n;
    Ok(OutageEstimate::monte_carlo(p, (p * (1.0 - p) / n).sqrt()))
}

#[cfg(feature = "parallel")]
fn run_chunks(chunks: u64, workers: Option<usize>, f: impl Fn(u64) -> u64 + Sync) -> Result<u64> {
    use rayon::prelude::*;
    let job = || (0..chunks).into_par_iter().map(&f).sum::<u64>();
    match workers {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn run_chunks(chunks: u64, _workers: Option<usize>, f: impl Fn(u64) -> u64) -> Result<u64> {
    Ok((0..chunks).map(f).sum())
}
