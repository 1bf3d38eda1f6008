//! Trial orchestration and statistical estimation.
//!
//! Every trial draws from its own ChaCha8 stream seeded with
//! [`substream_seed`]`(master_seed, trial_index)`, so the gains of trial `t`
//! do not depend on how trials are spread over workers. All estimators work
//! on integer counts and are therefore bit-reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytics::{fa_probability, GammaFit, ScenarioConfig};
use crate::channel::{ChannelModel, PhaseMode, SelectionMode};
use crate::error::{Error, Result};
use crate::specfun::reg_lower_incomplete_gamma;
use crate::surface::SurfaceGeometry;

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MCConfig {
    pub trials: u64,
    pub master_seed: u64,
    pub phase_mode: PhaseMode,
    pub selection_mode: SelectionMode,
    pub workers: usize,
}

impl Default for MCConfig {
    fn default() -> Self {
        MCConfig {
            trials: 100_000,
            master_seed: 1,
            phase_mode: PhaseMode::Static,
            selection_mode: SelectionMode::Fixed,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl MCConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::config("workers", "must be at least 1"));
        }
        Ok(())
    }
}

/// A probability estimate with its 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
}

impl EstimateWithCI {
    /// Wilson score interval for `successes` out of `trials`.
    pub fn wilson(successes: u64, trials: u64) -> Self {
        assert!(trials > 0 && successes <= trials);
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z_95 * Z_95;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        EstimateWithCI {
            value: p,
            ci_low: (center - half).clamp(0.0, 1.0).min(p),
            ci_high: (center + half).clamp(0.0, 1.0).max(p),
            trials,
        }
    }

    /// The estimate of `offset + scale · p` for a proportion `p`.
    pub fn affine(self, offset: f64, scale: f64) -> Self {
        EstimateWithCI {
            value: offset + scale * self.value,
            ci_low: offset + scale * self.ci_low,
            ci_high: offset + scale * self.ci_high,
            trials: self.trials,
        }
    }

    pub fn overlaps(&self, other: &EstimateWithCI) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under `master`: `splitmix64(master ^ splitmix64(trial))`.
pub fn substream_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master ^ splitmix64(trial))
}

/// Random stream owned by one trial.
pub fn trial_rng(master: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(master, trial))
}

/// Per-trial cascaded gains, in trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSamples {
    pub g_b: Vec<f64>,
    pub g_w: Vec<f64>,
}

impl GainSamples {
    pub fn len(&self) -> usize {
        self.g_b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g_b.is_empty()
    }
}

/// Builds the model described by `mc` with `active` active elements.
///
/// For [`SelectionMode::RisFull`] `active` is the baseline element count
/// and the phases are always coherent.
pub fn build_model(mc: &MCConfig, geom: &SurfaceGeometry, active: usize) -> Result<ChannelModel> {
    match mc.selection_mode {
        SelectionMode::RisFull => ChannelModel::ris_baseline(geom, active, geom.len()),
        sel => ChannelModel::fris(*geom, active, sel, mc.phase_mode),
    }
}

/// Runs `mc.trials` draws of `model` on `mc.workers` threads.
pub fn simulate_gains(mc: &MCConfig, model: &ChannelModel) -> Result<GainSamples> {
    mc.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(mc.workers)
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    let seed = mc.master_seed;
    let pairs: Vec<(f64, f64)> = pool.install(|| {
        (0..mc.trials)
            .into_par_iter()
            .map(|t| model.gains(&mut trial_rng(seed, t)))
            .collect()
    });
    let (g_b, g_w) = pairs.into_iter().unzip();
    Ok(GainSamples { g_b, g_w })
}

fn is_outage(cfg: &ScenarioConfig, g_b: f64) -> bool {
    (1.0 + cfg.bob_link_gain() * g_b / cfg.sigma2_b).log2() < cfg.r_b
}

fn is_detected(cfg: &ScenarioConfig, g_w: f64, zeta: f64) -> bool {
    cfg.willie_link_gain() * g_w + cfg.sigma2_w >= zeta
}

/// Empirical outage probability from pre-drawn gains.
pub fn op_from_samples(samples: &GainSamples, cfg: &ScenarioConfig) -> Result<EstimateWithCI> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::domain("no samples"));
    }
    let outages = samples.g_b.iter().filter(|&&g| is_outage(cfg, g)).count() as u64;
    Ok(EstimateWithCI::wilson(outages, samples.len() as u64))
}

/// Empirical probability that the warden decides correctly at `zeta`.
pub fn cop_from_samples(samples: &GainSamples, cfg: &ScenarioConfig, zeta: f64) -> Result<EstimateWithCI> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::domain("no samples"));
    }
    // silent hypothesis: the averaged power is exactly sigma2_w
    let p_fa = fa_probability(cfg, zeta);
    let detected = samples.g_w.iter().filter(|&&g| is_detected(cfg, g, zeta)).count() as u64;
    let active = EstimateWithCI::wilson(detected, samples.len() as u64);
    Ok(active.affine(cfg.p0 * (1.0 - p_fa), cfg.p1))
}

/// Empirical success probability at `zeta`, scoring each draw as
/// `1[no outage] · (p0 · 1[FA] + p1 · 1[MD])` on the same realization.
pub fn success_from_samples(samples: &GainSamples, cfg: &ScenarioConfig, zeta: f64) -> Result<EstimateWithCI> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::domain("no samples"));
    }
    let n = samples.len() as u64;
    let false_alarm = fa_probability(cfg, zeta) == 1.0;
    let mut covered = 0u64;
    let mut covered_missed = 0u64;
    for (&g_b, &g_w) in samples.g_b.iter().zip(&samples.g_w) {
        if is_outage(cfg, g_b) {
            continue;
        }
        covered += 1;
        if !is_detected(cfg, g_w, zeta) {
            covered_missed += 1;
        }
    }
    if false_alarm {
        // a false alarm forces detection of the active case too, so the
        // missed-detection term vanishes draw by draw
        debug_assert_eq!(covered_missed, 0);
        Ok(EstimateWithCI::wilson(covered, n).affine(0.0, cfg.p0))
    } else {
        Ok(EstimateWithCI::wilson(covered_missed, n).affine(0.0, cfg.p1))
    }
}

/// Empirical outage probability of the configured surface.
pub fn estimate_op(mc: &MCConfig, cfg: &ScenarioConfig, geom: &SurfaceGeometry, active: usize) -> Result<EstimateWithCI> {
    let samples = simulate_gains(mc, &build_model(mc, geom, active)?)?;
    op_from_samples(&samples, cfg)
}

/// Empirical covertness outage probability at threshold `zeta`.
pub fn estimate_cop(
    mc: &MCConfig,
    cfg: &ScenarioConfig,
    geom: &SurfaceGeometry,
    active: usize,
    zeta: f64,
) -> Result<EstimateWithCI> {
    let samples = simulate_gains(mc, &build_model(mc, geom, active)?)?;
    cop_from_samples(&samples, cfg, zeta)
}

/// Empirical success probability at threshold `zeta`.
pub fn estimate_success(
    mc: &MCConfig,
    cfg: &ScenarioConfig,
    geom: &SurfaceGeometry,
    active: usize,
    zeta: f64,
) -> Result<EstimateWithCI> {
    let samples = simulate_gains(mc, &build_model(mc, geom, active)?)?;
    success_from_samples(&samples, cfg, zeta)
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("empirical CDF of an empty sample"));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::domain("sample contains NaN"));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted })
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.sorted.len() as f64
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }
}

pub fn empirical_cdf(samples: &[f64]) -> Result<EmpiricalCdf> {
    EmpiricalCdf::new(samples)
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF,
/// taking both one-sided limits of the step function at every sample.
pub fn ks_distance_with<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    let ecdf = EmpiricalCdf::new(samples)?;
    let n = ecdf.sorted.len() as f64;
    Ok(ecdf.sorted.iter().enumerate().fold(0.0, |acc: f64, (i, &x)| {
        let f = cdf(x);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    }))
}

/// KS distance between `samples` and the Gamma law `fit`.
pub fn ks_distance(samples: &[f64], fit: &GammaFit) -> Result<f64> {
    if samples.iter().any(|&x| x < 0.0) {
        return Err(Error::domain("gamma KS distance needs non-negative samples"));
    }
    ks_distance_with(samples, |x| {
        reg_lower_incomplete_gamma(fit.kappa, x / fit.theta).expect("validated fit and sample")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::gamma_cdf;

    #[test]
    fn wilson_brackets_value() {
        for &(k, n) in &[(0u64, 100u64), (100, 100), (37, 100), (1, 100_000), (5_000, 10_000)] {
            let e = EstimateWithCI::wilson(k, n);
            assert!(e.ci_low <= e.value && e.value <= e.ci_high);
            assert!(e.ci_low >= 0.0 && e.ci_high <= 1.0);
        }
        let e = EstimateWithCI::wilson(50, 100);
        // textbook value for 50/100
        assert!((e.ci_low - 0.403_831).abs() < 1e-5 && (e.ci_high - 0.596_169).abs() < 1e-5);
    }

    #[test]
    fn substreams_differ() {
        let a = substream_seed(1, 0);
        let b = substream_seed(1, 1);
        let c = substream_seed(2, 0);
        assert!(a != b && a != c && b != c);
        assert_eq!(a, substream_seed(1, 0));
    }

    #[test]
    fn ecdf_examples() {
        let e = empirical_cdf(&[3.0, 1.0, 2.0]).unwrap();
        assert!((e.eval(2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(3.0), 1.0);
        assert_eq!(e.eval(10.0), 1.0);
        assert!(empirical_cdf(&[]).is_err());
    }

    #[test]
    fn ks_examples() {
        let fit = GammaFit::new(2.5, 1.7).unwrap();
        // median by bisection on the CDF
        let (mut lo, mut hi) = (0.0, 50.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gamma_cdf(&fit, mid).unwrap() < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let d = ks_distance(&[0.5 * (lo + hi)], &fit).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        assert_eq!(ks_distance(&[0.0, 0.0, 0.0], &fit).unwrap(), 1.0);
        assert!(ks_distance(&[], &fit).is_err());
    }
}
