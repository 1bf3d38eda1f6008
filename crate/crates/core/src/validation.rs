//! Closed-form versus simulation checks with pinned tolerances.
//!
//! Each `criterion_*` function runs one check end to end and reports the
//! measured quantities next to the verdict. The same functions back the
//! `validate` subcommand and the acceptance test suite.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytics::{
    cop_at_threshold, fa_probability, gamma_moment_match, md_probability, outage_probability, ScenarioConfig,
};
use crate::channel::{ChannelModel, PhaseMode, SelectionMode};
use crate::config::SystemConfig;
use crate::error::Result;
use crate::montecarlo::{cop_from_samples, ks_distance, op_from_samples, simulate_gains, MCConfig};
use crate::output::render_csv;
use crate::recipes::{DEFAULT_ACTIVE_PORTS, DEFAULT_MU_FACTORS};
use crate::specfun::{bessel_j0, reg_lower_incomplete_gamma};
use crate::surface::{correlation_matrix, reduce, PortSelection};
use crate::sweep::{run_sweep, ModeSet, SweepResult};

pub const SPECFUN_POINTS: usize = 1_000;
pub const SPECFUN_TOLERANCE: f64 = 1e-9;
pub const SPECFUN_BUDGET: Duration = Duration::from_secs(5);

pub const BRIDGE_MEAN_TRIALS: u64 = 1_000_000;
pub const BRIDGE_KS_SAMPLES: usize = 100_000;
pub const BRIDGE_MEAN_REL_TOLERANCE: f64 = 0.02;
pub const BRIDGE_KS_TOLERANCE: f64 = 0.05;
pub const BRIDGE_BUDGET: Duration = Duration::from_secs(120);

pub const SWEEP_TRIALS: u64 = 100_000;
pub const SWEEP_TOLERANCE: f64 = 0.02;
pub const SWEEP_BUDGET: Duration = Duration::from_secs(300);

pub const ORDERING_BUDGET: Duration = Duration::from_secs(600);
pub const ORDERING_BAND: (f64, f64) = (0.05, 0.95);

pub const VALIDATION_SEED: u64 = 20_251_016;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] C{:<2} {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Reference implementations that share no code with [`crate::specfun`].
pub mod oracle {
    use std::f64::consts::PI;

    /// `J0(x) = (1/2π) ∫ cos(x sin t) dt` over one period, trapezoid rule.
    /// The integrand is periodic and entire, so the rule converges
    /// geometrically once the node count exceeds `|x|`.
    pub fn j0_quadrature(x: f64) -> f64 {
        let n = 2 * (x.abs().ceil() as usize) + 64;
        let sum: f64 = (0..n).map(|k| (x * (2.0 * PI * k as f64 / n as f64).sin()).cos()).sum();
        sum / n as f64
    }

    /// `Σ (-x²/4)^k / (k!)²`, accurate for moderate `|x|`.
    pub fn j0_series(x: f64) -> f64 {
        let mut sum = 1.0;
        let mut term = 1.0;
        for k in 1..80 {
            term *= -x * x / (4.0 * (k * k) as f64);
            sum += term;
        }
        sum
    }

    /// Stirling series after shifting the argument above 15.
    pub fn ln_gamma_stirling(x: f64) -> f64 {
        let mut shift = 0.0;
        let mut z = x;
        while z < 15.0 {
            shift += z.ln();
            z += 1.0;
        }
        let inv = 1.0 / z;
        let inv2 = inv * inv;
        let series = inv
            * (1.0 / 12.0
                - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
        (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
    }

    /// `P(a, x) = e^{-x} x^a / Γ(a+1) · Σ_n x^n / ((a+1)…(a+n))`, summing
    /// positive terms only until they are negligible.
    pub fn lower_gamma_series(a: f64, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let log_pref = a * x.ln() - x - ln_gamma_stirling(a + 1.0);
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= x / (a + n);
            sum += term;
            if n > x && term < 1e-18 * sum {
                break;
            }
        }
        (log_pref + sum.ln()).exp().min(1.0)
    }
}

fn timed(id: u32, title: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Result<CriterionReport> {
    let start = Instant::now();
    let (passed, detail) = f()?;
    Ok(CriterionReport {
        id,
        title,
        passed,
        detail,
        elapsed: start.elapsed(),
    })
}

fn with_budget(mut report: CriterionReport, budget: Duration) -> CriterionReport {
    if report.elapsed > budget {
        report.passed = false;
        report.detail.push_str(&format!("; over the {:.0} s budget", budget.as_secs_f64()));
    }
    report
}

/// Special functions against the independent oracles on random points.
pub fn criterion_1_special_functions() -> Result<CriterionReport> {
    let report = timed(1, "special-function oracles", || {
        let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
        let mut j0_err: f64 = 0.0;
        for _ in 0..SPECFUN_POINTS {
            let x: f64 = rng.random_range(-200.0..200.0);
            j0_err = j0_err.max((bessel_j0(x)? - oracle::j0_quadrature(x)).abs());
        }
        let mut gamma_err: f64 = 0.0;
        for _ in 0..SPECFUN_POINTS {
            let k: f64 = rng.random_range(0.1..100.0);
            let x: f64 = rng.random_range(0.0..300.0);
            gamma_err = gamma_err.max((reg_lower_incomplete_gamma(k, x)? - oracle::lower_gamma_series(k, x)).abs());
        }
        Ok((
            j0_err <= SPECFUN_TOLERANCE && gamma_err <= SPECFUN_TOLERANCE,
            format!("max |J0 - quadrature| = {j0_err:.2e}, max |P - series| = {gamma_err:.2e} (tol {SPECFUN_TOLERANCE:e})"),
        ))
    })?;
    Ok(with_budget(report, SPECFUN_BUDGET))
}

/// Fixed preset + static phases: sample mean equals `tr(J̃²)` and the
/// sample follows the Gamma fit in KS distance.
pub fn criterion_2_gamma_bridge(workers: usize) -> Result<CriterionReport> {
    let report = timed(2, "gamma-fit bridge", || {
        let system = SystemConfig::default();
        let geom = system.geometry;
        let j = correlation_matrix(&geom)?;
        let mut passed = true;
        let mut parts = Vec::new();
        for m_o in DEFAULT_ACTIVE_PORTS {
            let jt = reduce(&j, &PortSelection::fixed_preset(&geom, m_o)?)?;
            let fit = gamma_moment_match(&jt)?;
            let tr2 = jt.matrix().norm_squared();
            let model = ChannelModel::fris(geom, m_o, SelectionMode::Fixed, PhaseMode::Static)?;
            let mc = MCConfig {
                trials: BRIDGE_MEAN_TRIALS,
                master_seed: VALIDATION_SEED,
                phase_mode: PhaseMode::Static,
                selection_mode: SelectionMode::Fixed,
                workers,
            };
            let samples = simulate_gains(&mc, &model)?;
            let mean = samples.g_b.iter().sum::<f64>() / samples.len() as f64;
            let rel = (mean - tr2).abs() / tr2;
            let ks = ks_distance(&samples.g_b[..BRIDGE_KS_SAMPLES], &fit)?;
            passed &= rel <= BRIDGE_MEAN_REL_TOLERANCE && ks <= BRIDGE_KS_TOLERANCE;
            parts.push(format!(
                "M_O={m_o}: mean {mean:.3} vs tr(J~^2) {tr2:.3} (rel {rel:.4}, tol {BRIDGE_MEAN_REL_TOLERANCE}), KS {ks:.4} (tol {BRIDGE_KS_TOLERANCE})"
            ));
        }
        Ok((passed, parts.join("; ")))
    })?;
    Ok(with_budget(report, BRIDGE_BUDGET))
}

/// Default sweep under the fixed preset with static phases only.
pub fn fixed_static_sweep(m_o: usize, workers: usize) -> Result<SweepResult> {
    let mut system = SystemConfig::default();
    system.ports.m_o = m_o;
    system.modes = "fixed".parse().expect("valid mode list");
    system.mc.trials = SWEEP_TRIALS;
    system.mc.master_seed = VALIDATION_SEED;
    system.mc.workers = workers;
    run_sweep(&system, &system.sweep)
}

fn max_gap(result: &SweepResult, f: impl Fn(&crate::sweep::SweepRow) -> (f64, f64)) -> f64 {
    result
        .rows
        .iter()
        .map(|r| {
            let (a, b) = f(r);
            (a - b).abs()
        })
        .fold(0.0, f64::max)
}

/// Analytic versus simulated outage over the default sweep.
pub fn criterion_3_outage_agreement(workers: usize) -> Result<CriterionReport> {
    let report = timed(3, "closed-form vs Monte Carlo OP", || {
        let result = fixed_static_sweep(36, workers)?;
        let gap = max_gap(&result, |r| (r.analytic.op, r.fixed.expect("fixed mode enabled").op.value));
        Ok((
            gap <= SWEEP_TOLERANCE,
            format!("max |OP_analytic - OP_sim| = {gap:.4} over {} points (tol {SWEEP_TOLERANCE})", result.rows.len()),
        ))
    })?;
    Ok(with_budget(report, SWEEP_BUDGET))
}

/// Analytic versus simulated covertness outage and success at `ζ*`.
pub fn criterion_4_cop_success_agreement(workers: usize) -> Result<CriterionReport> {
    timed(4, "closed-form vs Monte Carlo COP and P_SUC", || {
        let result = fixed_static_sweep(36, workers)?;
        let cop = max_gap(&result, |r| (r.analytic.cop, r.fixed.expect("fixed mode enabled").cop.value));
        let suc = max_gap(&result, |r| (r.analytic.success, r.fixed.expect("fixed mode enabled").success.value));
        Ok((
            cop <= SWEEP_TOLERANCE && suc <= SWEEP_TOLERANCE,
            format!("max COP gap {cop:.4}, max P_SUC gap {suc:.4} (tol {SWEEP_TOLERANCE})"),
        ))
    })
}

fn analytic_sweep(m_o: usize, mu_factor: f64) -> Result<SweepResult> {
    let mut system = SystemConfig::default();
    system.ports.m_o = m_o;
    system.modes = ModeSet::none();
    system.scenario.mu_offset = mu_factor * system.scenario.sigma2_w;
    run_sweep(&system, &system.sweep)
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn non_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0])
}

/// Index and value of the maximum, with a flag telling whether it is an
/// interior point strictly above both endpoints.
fn interior_peak(v: &[f64]) -> (usize, f64, bool) {
    let (idx, peak) = v
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
    let last = v.len() - 1;
    (idx, peak, idx > 0 && idx < last && peak > v[0] && peak > v[last])
}

/// Outage falls with transmit power and with more active ports.
pub fn criterion_5_outage_shape() -> Result<CriterionReport> {
    timed(5, "outage decreases with P_A and M_O", || {
        let small = analytic_sweep(16, 1.0)?;
        let large = analytic_sweep(36, 1.0)?;
        let op16: Vec<f64> = small.rows.iter().map(|r| r.analytic.op).collect();
        let op36: Vec<f64> = large.rows.iter().map(|r| r.analytic.op).collect();
        let mono = non_increasing(&op16) && non_increasing(&op36);
        let below = op36.iter().zip(&op16).all(|(a, b)| a <= b);
        Ok((
            mono && below,
            format!("non-increasing in P_A: {mono}; M_O=36 at or below M_O=16 everywhere: {below}"),
        ))
    })
}

/// Covertness outage rises with transmit power; larger offsets delay it.
pub fn criterion_6_cop_shape() -> Result<CriterionReport> {
    timed(6, "COP increases with P_A, shifted by mu", || {
        let mut curves = Vec::new();
        for f in DEFAULT_MU_FACTORS {
            let r = analytic_sweep(36, f)?;
            curves.push(r.rows.iter().map(|r| r.analytic.cop).collect::<Vec<f64>>());
        }
        let mono = curves.iter().all(|c| non_decreasing(c));
        let first = &curves[0];
        let last = &curves[curves.len() - 1];
        let shifted = last.iter().zip(first).all(|(hi_mu, lo_mu)| hi_mu <= lo_mu);
        Ok((
            mono && shifted,
            format!("non-decreasing for every mu: {mono}; 5σ² curve at or below 0.5σ² curve: {shifted}"),
        ))
    })
}

/// Success probability is unimodal in transmit power and its peak grows
/// with the number of active ports.
pub fn criterion_7_success_shape(workers: usize) -> Result<CriterionReport> {
    timed(7, "P_SUC unimodal, peak grows with M_O", || {
        let mut passed = true;
        let mut parts = Vec::new();
        let mut peaks = Vec::new();
        for m_o in DEFAULT_ACTIVE_PORTS {
            let r = fixed_static_sweep(m_o, workers)?;
            let an: Vec<f64> = r.rows.iter().map(|r| r.analytic.success).collect();
            let sim: Vec<f64> = r.rows.iter().map(|r| r.fixed.expect("fixed mode enabled").success.value).collect();
            let (ia, pa, ua) = interior_peak(&an);
            let (is, ps, us) = interior_peak(&sim);
            passed &= ua && us;
            parts.push(format!(
                "M_O={m_o}: analytic peak {pa:.4} at point {ia} (interior {ua}), simulated peak {ps:.4} at point {is} (interior {us})"
            ));
            peaks.push((pa, ps));
        }
        let grows = peaks[1].0 > peaks[0].0 && peaks[1].1 > peaks[0].1;
        passed &= grows;
        parts.push(format!("peak grows with M_O: {grows}"));
        Ok((passed, parts.join("; ")))
    })
}

/// Fluid surface versus fixed-position baseline, paired draws.
pub fn criterion_8_fris_vs_ris(workers: usize) -> Result<CriterionReport> {
    let report = timed(8, "FRIS outage at or below RIS", || {
        let mut system = SystemConfig::default();
        system.ports.m_o = 36;
        system.ports.m_hat = Some(36);
        system.modes = "fris,ris".parse().expect("valid mode list");
        system.mc.trials = SWEEP_TRIALS;
        system.mc.master_seed = VALIDATION_SEED;
        system.mc.workers = workers;
        let result = run_sweep(&system, &system.sweep)?;
        let mut ordered = true;
        let mut band = 0;
        let mut separated = 0;
        for row in &result.rows {
            let fris = row.fris.expect("fris enabled").op;
            let ris = row.ris.expect("ris enabled").op;
            ordered &= fris.value <= ris.value;
            let inside = |v: f64| v > ORDERING_BAND.0 && v < ORDERING_BAND.1;
            if inside(fris.value) && inside(ris.value) {
                band += 1;
                if !fris.overlaps(&ris) {
                    separated += 1;
                }
            }
        }
        let enough = 2 * separated >= band;
        Ok((
            ordered && enough,
            format!(
                "FRIS OP <= RIS OP at every point: {ordered}; {separated} of {band} points with both in (0.05, 0.95) have disjoint 95% CIs"
            ),
        ))
    })?;
    Ok(with_budget(report, ORDERING_BUDGET))
}

/// Exact values at the degenerate corners.
pub fn criterion_9_corners() -> Result<CriterionReport> {
    timed(9, "exact corner values", || {
        let system = SystemConfig::default();
        let cfg = system.scenario;
        let geom = system.geometry;
        let j = correlation_matrix(&geom)?;
        let fit = gamma_moment_match(&reduce(&j, &PortSelection::fixed_preset(&geom, 36)?)?)?;
        let mut ok = true;
        for zeta in [cfg.sigma2_w, 0.5 * cfg.sigma2_w, 0.0] {
            ok &= fa_probability(&cfg, zeta) == 1.0;
            ok &= md_probability(&fit, &cfg, zeta)? == 0.0;
            ok &= cop_at_threshold(&fit, &cfg, zeta)? == cfg.p1;
        }
        let zero_rate = ScenarioConfig { r_b: 0.0, ..cfg };
        ok &= outage_probability(&fit, &zero_rate)? == 0.0;

        let model = ChannelModel::fris(geom, 36, SelectionMode::Fixed, PhaseMode::Static)?;
        let mc = MCConfig {
            trials: 2_000,
            master_seed: VALIDATION_SEED,
            workers: 1,
            ..MCConfig::default()
        };
        let samples = simulate_gains(&mc, &model)?;
        ok &= cop_from_samples(&samples, &cfg, cfg.sigma2_w)?.value == cfg.p1;
        ok &= op_from_samples(&samples, &zero_rate)?.value == 0.0;
        Ok((ok, format!("P_FA = 1, P_MD = 0, COP = p1 at ζ <= σ²_W and OP = 0 at R_B = 0: {ok}")))
    })
}

/// Byte-identical CSV for different worker counts.
pub fn criterion_10_determinism() -> Result<CriterionReport> {
    timed(10, "worker-count independent output", || {
        let mut system = SystemConfig::default();
        system.mc.master_seed = VALIDATION_SEED;
        system.mc.trials = SWEEP_TRIALS;
        system.mc.workers = 1;
        let one = render_csv(&run_sweep(&system, &system.sweep)?);
        system.mc.workers = 4;
        let four = render_csv(&run_sweep(&system, &system.sweep)?);
        let same = one == four;
        Ok((same, format!("{} bytes, identical for 1 and 4 workers: {same}", one.len())))
    })
}

/// Runs every criterion in order.
pub fn run_all(workers: usize) -> Result<Vec<CriterionReport>> {
    Ok(vec![
        criterion_1_special_functions()?,
        criterion_2_gamma_bridge(workers)?,
        criterion_3_outage_agreement(workers)?,
        criterion_4_cop_success_agreement(workers)?,
        criterion_5_outage_shape()?,
        criterion_6_cop_shape()?,
        criterion_7_success_shape(workers)?,
        criterion_8_fris_vs_ris(workers)?,
        criterion_9_corners()?,
        criterion_10_determinism()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::oracle::*;

    #[test]
    fn oracles_agree_with_each_other() {
        for i in 0..100 {
            let x = -12.0 + 0.24 * i as f64;
            assert!((j0_quadrature(x) - j0_series(x)).abs() < 1e-11, "x = {x}");
        }
        assert!((ln_gamma_stirling(10.0) - 362_880f64.ln()).abs() < 1e-13);
        assert!((ln_gamma_stirling(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        assert!((lower_gamma_series(1.0, 2f64.ln()) - 0.5).abs() < 1e-14);
        assert!((lower_gamma_series(2.0, 2.0) - (1.0 - 3.0 * (-2f64).exp())).abs() < 1e-14);
    }
}
