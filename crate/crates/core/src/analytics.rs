//! Closed-form covertness and reliability metrics.
//!
//! The cascaded channel gain is approximated by a Gamma law whose shape and
//! scale come from traces of powers of the reduced correlation matrix. The
//! same fit serves both the legitimate receiver and the warden.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::specfun::reg_lower_incomplete_gamma;
use crate::surface::CorrelationMatrix;

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts a power in watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Link budget and detector parameters. Powers are in watts, distances in
/// meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    /// Transmitter to surface distance.
    pub d_af: f64,
    /// Surface to legitimate receiver distance.
    pub d_fb: f64,
    /// Surface to warden distance.
    pub d_fw: f64,
    pub alpha: f64,
    /// Reference gain at one meter.
    pub rho0: f64,
    /// Target rate in bits/s/Hz.
    pub r_b: f64,
    pub sigma2_b: f64,
    pub sigma2_w: f64,
    /// Prior probability that the transmitter is silent.
    pub p0: f64,
    /// Prior probability that the transmitter is active.
    pub p1: f64,
    /// Detector threshold offset above the warden's noise floor.
    pub mu_offset: f64,
    /// Transmit power.
    pub p_a: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let noise = dbm_to_watts(-90.0);
        ScenarioConfig {
            d_af: 50.0,
            d_fb: 100.0,
            d_fw: 100.0,
            alpha: 2.1,
            rho0: 1.0,
            r_b: 0.1,
            sigma2_b: noise,
            sigma2_w: noise,
            p0: 0.5,
            p1: 0.5,
            mu_offset: noise,
            p_a: dbm_to_watts(0.0),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("d_af", self.d_af),
            ("d_fb", self.d_fb),
            ("d_fw", self.d_fw),
            ("alpha", self.alpha),
            ("rho0", self.rho0),
            ("sigma2_b", self.sigma2_b),
            ("sigma2_w", self.sigma2_w),
            ("mu_offset", self.mu_offset),
            ("p_a", self.p_a),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || v.is_nan() {
                return Err(Error::config(name, format!("must be strictly positive, got {v}")));
            }
        }
        if !(self.r_b >= 0.0) || !self.r_b.is_finite() {
            return Err(Error::config("r_b", format!("must be non-negative, got {}", self.r_b)));
        }
        for (name, v) in [("p0", self.p0), ("p1", self.p1)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(name, format!("must lie in [0, 1], got {v}")));
            }
        }
        if (self.p0 + self.p1 - 1.0).abs() > 1e-12 {
            return Err(Error::config(
                "p0 + p1",
                format!("priors must sum to 1, got {} + {}", self.p0, self.p1),
            ));
        }
        Ok(())
    }

    /// `P_A · L_AF · L_FB`, the received-signal scale at the legitimate receiver.
    pub fn bob_link_gain(&self) -> f64 {
        self.p_a * self.large_scale(self.d_af) * self.large_scale(self.d_fb)
    }

    /// `P_A · L_AF · L_FW`, the received-signal scale at the warden.
    pub fn willie_link_gain(&self) -> f64 {
        self.p_a * self.large_scale(self.d_af) * self.large_scale(self.d_fw)
    }

    fn large_scale(&self, d: f64) -> f64 {
        self.rho0 * d.powf(-self.alpha)
    }
}

/// Moment-matched Gamma law (shape `kappa`, scale `theta`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFit {
    pub kappa: f64,
    pub theta: f64,
}

impl GammaFit {
    pub fn new(kappa: f64, theta: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) || !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::DegenerateFit(format!("kappa = {kappa}, theta = {theta}")));
        }
        Ok(GammaFit { kappa, theta })
    }

    pub fn mean(&self) -> f64 {
        self.kappa * self.theta
    }

    pub fn variance(&self) -> f64 {
        self.kappa * self.theta * self.theta
    }
}

/// Gamma fit of the cascaded gain for a reduced correlation matrix.
pub fn gamma_moment_match(j_tilde: &CorrelationMatrix) -> Result<GammaFit> {
    gamma_moment_match_matrix(j_tilde.matrix())
}

/// `kappa = tr(A²)² / tr(A⁴)`, `theta = tr(A⁴) / tr(A²)` for a symmetric `A`.
///
/// Uses `tr(A²) = ‖A‖²_F` and `tr(A⁴) = ‖A²‖²_F`, so `A⁴` is never formed.
pub fn gamma_moment_match_matrix(a: &DMatrix<f64>) -> Result<GammaFit> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::DegenerateFit(format!("{}x{} matrix", a.nrows(), a.ncols())));
    }
    let tr2 = a.norm_squared();
    if !(tr2 > 0.0) {
        return Err(Error::DegenerateFit("zero matrix".into()));
    }
    let tr4 = (a * a).norm_squared();
    GammaFit::new(tr2 * tr2 / tr4, tr4 / tr2)
}

/// `P(g_fit ≤ g) = P(kappa, g / theta)`.
pub fn gamma_cdf(fit: &GammaFit, g: f64) -> Result<f64> {
    if !(g >= 0.0) {
        return Err(Error::domain(format!("gamma_cdf requires g >= 0, got {g}")));
    }
    reg_lower_incomplete_gamma(fit.kappa, g / fit.theta)
}

/// Large-scale gain `rho0 · d^(-alpha)`.
pub fn path_loss(d: f64, alpha: f64, rho0: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::domain(format!("path loss requires d > 0, got {d}")));
    }
    Ok(rho0 * d.powf(-alpha))
}

/// Missed-detection probability of the warden's power detector at threshold `zeta`.
pub fn md_probability(fit: &GammaFit, cfg: &ScenarioConfig, zeta: f64) -> Result<f64> {
    cfg.validate()?;
    if !(zeta >= 0.0) {
        return Err(Error::domain(format!("threshold must be non-negative, got {zeta}")));
    }
    if zeta <= cfg.sigma2_w {
        return Ok(0.0);
    }
    let eta = (zeta - cfg.sigma2_w) / cfg.willie_link_gain();
    log::debug!("md_probability: eta = {eta:e}");
    gamma_cdf(fit, eta)
}

/// False-alarm probability: the noise-only average power `sigma2_w` crosses `zeta`.
pub fn fa_probability(cfg: &ScenarioConfig, zeta: f64) -> f64 {
    if zeta <= cfg.sigma2_w {
        1.0
    } else {
        0.0
    }
}

/// Worst-case warden threshold `sigma2_w + mu_offset`.
pub fn optimal_threshold(cfg: &ScenarioConfig) -> Result<f64> {
    if !(cfg.mu_offset > 0.0) {
        return Err(Error::domain(format!(
            "threshold offset must be positive, got {}",
            cfg.mu_offset
        )));
    }
    Ok(cfg.sigma2_w + cfg.mu_offset)
}

/// Probability that the warden decides correctly:
/// `p0 (1 - P_FA) + p1 (1 - P_MD)`.
pub fn cop(cfg: &ScenarioConfig, p_fa: f64, p_md: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p_fa) && (0.0..=1.0).contains(&p_md));
    cfg.p0 * (1.0 - p_fa) + cfg.p1 * (1.0 - p_md)
}

/// Covertness outage probability at threshold `zeta`.
pub fn cop_at_threshold(fit: &GammaFit, cfg: &ScenarioConfig, zeta: f64) -> Result<f64> {
    let p_md = md_probability(fit, cfg, zeta)?;
    Ok(cop(cfg, fa_probability(cfg, zeta), p_md))
}

/// Probability that the instantaneous capacity toward the legitimate
/// receiver falls below `r_b`.
pub fn outage_probability(fit: &GammaFit, cfg: &ScenarioConfig) -> Result<f64> {
    cfg.validate()?;
    let r_bar = (cfg.r_b.exp2() - 1.0) * cfg.sigma2_b / cfg.bob_link_gain();
    log::debug!("outage_probability: normalized rate threshold = {r_bar:e}");
    gamma_cdf(fit, r_bar)
}

/// Unconditional detection error `p0 P_FA + p1 P_MD`.
pub fn error_probability_xi(cfg: &ScenarioConfig, p_fa: f64, p_md: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p_fa) && (0.0..=1.0).contains(&p_md));
    cfg.p0 * p_fa + cfg.p1 * p_md
}

/// `(1 - p_out) · xi`.
pub fn success_probability(p_out: f64, xi: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p_out) && (0.0..=1.0).contains(&xi));
    (1.0 - p_out) * xi
}

/// All closed-form metrics at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub zeta: f64,
    pub p_fa: f64,
    pub p_md: f64,
    pub cop: f64,
    pub op: f64,
    pub xi: f64,
    pub success: f64,
}

impl ClosedForm {
    /// Evaluates every metric at threshold `zeta`.
    pub fn at_threshold(fit: &GammaFit, cfg: &ScenarioConfig, zeta: f64) -> Result<Self> {
        let p_fa = fa_probability(cfg, zeta);
        let p_md = md_probability(fit, cfg, zeta)?;
        let op = outage_probability(fit, cfg)?;
        let xi = error_probability_xi(cfg, p_fa, p_md);
        Ok(ClosedForm {
            zeta,
            p_fa,
            p_md,
            cop: cop(cfg, p_fa, p_md),
            op,
            xi,
            success: success_probability(op, xi),
        })
    }

    /// Evaluates every metric at the worst-case threshold.
    pub fn evaluate(fit: &GammaFit, cfg: &ScenarioConfig) -> Result<Self> {
        Self::at_threshold(fit, cfg, optimal_threshold(cfg)?)
    }
}
