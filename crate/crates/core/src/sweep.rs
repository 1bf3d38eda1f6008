//! Parameter sweeps over transmit power, threshold offset or active-port
//! count, producing closed-form and simulated metrics side by side.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::analytics::{dbm_to_watts, gamma_moment_match, watts_to_dbm, ClosedForm, GammaFit, ScenarioConfig};
use crate::channel::{ChannelModel, PhaseMode, SelectionMode};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::montecarlo::{cop_from_samples, op_from_samples, simulate_gains, success_from_samples, EstimateWithCI, GainSamples, MCConfig};
use crate::surface::{correlation_matrix, reduce, CorrelationMatrix, PortSelection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    /// Transmit power in dBm.
    TransmitPowerDbm,
    /// Threshold offset as a multiple of the warden's noise power.
    MuFactor,
    /// Number of active fluid ports; the baseline follows it unless its
    /// size is pinned.
    ActivePorts,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::TransmitPowerDbm => "p_a_dbm",
            SweepVariable::MuFactor => "mu_factor",
            SweepVariable::ActivePorts => "m_o",
        }
    }

    pub fn axis_label(&self) -> &'static str {
        match self {
            SweepVariable::TransmitPowerDbm => "transmit power P_A (dBm)",
            SweepVariable::MuFactor => "threshold offset mu / sigma2_W",
            SweepVariable::ActivePorts => "active ports M_O",
        }
    }
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "p_a_dbm" | "p_a" | "power" => Ok(SweepVariable::TransmitPowerDbm),
            "mu_factor" | "mu" => Ok(SweepVariable::MuFactor),
            "m_o" | "ports" => Ok(SweepVariable::ActivePorts),
            other => Err(format!("unknown sweep variable `{other}` (expected p_a_dbm, mu_factor or m_o)")),
        }
    }
}

/// Spacing of the sweep points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScale {
    /// Evenly spaced in decibels: linear in the value for the dBm power
    /// axis, geometric for the other variables.
    LinearInDb,
    /// Evenly spaced in linear units (watts for the power axis).
    Linear,
}

impl SweepScale {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepScale::LinearInDb => "linear-in-db",
            SweepScale::Linear => "linear",
        }
    }
}

impl FromStr for SweepScale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "linear-in-db" | "db" | "log" => Ok(SweepScale::LinearInDb),
            "linear" => Ok(SweepScale::Linear),
            other => Err(format!("unknown sweep scale `{other}` (expected linear-in-db or linear)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: SweepScale,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            variable: SweepVariable::TransmitPowerDbm,
            start: -70.0,
            stop: -10.0,
            points: 25,
            scale: SweepScale::LinearInDb,
        }
    }
}

impl SweepSpec {
    /// A single-point sweep at `value`.
    pub fn single(variable: SweepVariable, value: f64) -> Self {
        SweepSpec {
            variable,
            start: value,
            stop: value,
            points: 1,
            scale: match variable {
                SweepVariable::TransmitPowerDbm => SweepScale::LinearInDb,
                _ => SweepScale::Linear,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::config("sweep.points", "must be at least 1"));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::config("sweep.start", "sweep bounds must be finite"));
        }
        if self.points >= 2 && !(self.start < self.stop) {
            return Err(Error::config(
                "sweep.start",
                format!("start ({}) must be below stop ({})", self.start, self.stop),
            ));
        }
        if self.variable != SweepVariable::TransmitPowerDbm && !(self.start > 0.0) {
            return Err(Error::config(
                "sweep.start",
                format!("{} sweeps need a positive start, got {}", self.variable.as_str(), self.start),
            ));
        }
        Ok(())
    }

    /// Sweep values in the variable's natural unit (dBm, factor or count).
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        let lerp = |a: f64, b: f64, k: usize| a + (b - a) * k as f64 / n;
        (0..self.points)
            .map(|k| match (self.variable, self.scale) {
                (SweepVariable::TransmitPowerDbm, SweepScale::LinearInDb) => lerp(self.start, self.stop, k),
                (SweepVariable::TransmitPowerDbm, SweepScale::Linear) => {
                    watts_to_dbm(lerp(dbm_to_watts(self.start), dbm_to_watts(self.stop), k))
                }
                (_, SweepScale::LinearInDb) => lerp(self.start.ln(), self.stop.ln(), k).exp(),
                (_, SweepScale::Linear) => lerp(self.start, self.stop, k),
            })
            .map(|v| match self.variable {
                SweepVariable::ActivePorts => v.round(),
                _ => v,
            })
            .collect()
    }
}

/// Simulated surface configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SurfaceMode {
    /// Fluid surface: best-product port selection, coherent phases.
    Fris,
    /// Fixed preset ports with static phases; the statistics the Gamma fit
    /// is built from.
    Fixed,
    /// Fixed-position baseline: all elements active, coherent phases.
    Ris,
}

impl SurfaceMode {
    pub const ALL: [SurfaceMode; 3] = [SurfaceMode::Fris, SurfaceMode::Fixed, SurfaceMode::Ris];

    pub fn as_str(&self) -> &'static str {
        match self {
            SurfaceMode::Fris => "fris",
            SurfaceMode::Fixed => "fixed",
            SurfaceMode::Ris => "ris",
        }
    }

    pub fn configure(&self, base: &MCConfig) -> MCConfig {
        let (selection_mode, phase_mode) = match self {
            SurfaceMode::Fris => (SelectionMode::BestProduct, PhaseMode::Coherent),
            SurfaceMode::Fixed => (SelectionMode::Fixed, PhaseMode::Static),
            SurfaceMode::Ris => (SelectionMode::RisFull, PhaseMode::Coherent),
        };
        MCConfig {
            selection_mode,
            phase_mode,
            ..*base
        }
    }
}

/// Which simulated modes a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModeSet {
    pub fris: bool,
    pub fixed: bool,
    pub ris: bool,
}

impl ModeSet {
    pub fn all() -> Self {
        ModeSet {
            fris: true,
            fixed: true,
            ris: true,
        }
    }

    pub fn none() -> Self {
        ModeSet::default()
    }

    pub fn contains(&self, mode: SurfaceMode) -> bool {
        match mode {
            SurfaceMode::Fris => self.fris,
            SurfaceMode::Fixed => self.fixed,
            SurfaceMode::Ris => self.ris,
        }
    }

    pub fn enabled(&self) -> impl Iterator<Item = SurfaceMode> + '_ {
        SurfaceMode::ALL.into_iter().filter(|m| self.contains(*m))
    }
}

impl FromStr for ModeSet {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut set = ModeSet::none();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.to_ascii_lowercase().as_str() {
                "all" => set = ModeSet::all(),
                "none" | "analytic" => {}
                "fris" => set.fris = true,
                "fixed" => set.fixed = true,
                "ris" => set.ris = true,
                other => return Err(format!("unknown mode `{other}` (expected fris, fixed, ris, all or none)")),
            }
        }
        Ok(set)
    }
}

impl fmt::Display for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == ModeSet::all() {
            return f.write_str("all");
        }
        let names: Vec<&str> = self.enabled().map(|m| m.as_str()).collect();
        if names.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&names.join(","))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEstimates {
    pub op: EstimateWithCI,
    pub cop: EstimateWithCI,
    pub success: EstimateWithCI,
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Swept value in the variable's natural unit.
    pub value: f64,
    pub scenario: ScenarioConfig,
    pub m_o: usize,
    pub m_hat: usize,
    /// Gamma fit of the fluid surface's preset ports.
    pub fit: GammaFit,
    pub analytic: ClosedForm,
    /// Gamma fit of the fixed-position baseline's full correlation matrix.
    pub ris_fit: GammaFit,
    pub ris_analytic: ClosedForm,
    pub fris: Option<ModeEstimates>,
    pub fixed: Option<ModeEstimates>,
    pub ris: Option<ModeEstimates>,
}

impl SweepRow {
    pub fn estimates(&self, mode: SurfaceMode) -> Option<&ModeEstimates> {
        match mode {
            SurfaceMode::Fris => self.fris.as_ref(),
            SurfaceMode::Fixed => self.fixed.as_ref(),
            SurfaceMode::Ris => self.ris.as_ref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Swept values in row order.
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }
}

struct SweepCache<'a> {
    system: &'a SystemConfig,
    j: CorrelationMatrix,
    fits: HashMap<usize, GammaFit>,
    ris_fits: HashMap<usize, GammaFit>,
    samples: HashMap<(SurfaceMode, usize), GainSamples>,
}

impl<'a> SweepCache<'a> {
    fn new(system: &'a SystemConfig) -> Result<Self> {
        Ok(SweepCache {
            system,
            j: correlation_matrix(&system.geometry)?,
            fits: HashMap::new(),
            ris_fits: HashMap::new(),
            samples: HashMap::new(),
        })
    }

    fn fit(&mut self, m_o: usize) -> Result<GammaFit> {
        if let Some(f) = self.fits.get(&m_o) {
            return Ok(*f);
        }
        let sel = PortSelection::fixed_preset(&self.system.geometry, m_o)?;
        let fit = gamma_moment_match(&reduce(&self.j, &sel)?)?;
        self.fits.insert(m_o, fit);
        Ok(fit)
    }

    fn ris_fit(&mut self, m_hat: usize) -> Result<GammaFit> {
        if let Some(f) = self.ris_fits.get(&m_hat) {
            return Ok(*f);
        }
        let geom = self.system.geometry.same_aperture(m_hat)?;
        let fit = gamma_moment_match(&correlation_matrix(&geom)?)?;
        self.ris_fits.insert(m_hat, fit);
        Ok(fit)
    }

    fn samples(&mut self, mode: SurfaceMode, active: usize) -> Result<&GainSamples> {
        if !self.samples.contains_key(&(mode, active)) {
            let mc = mode.configure(&self.system.mc);
            let geom = &self.system.geometry;
            let model = match mode {
                SurfaceMode::Ris => ChannelModel::ris_baseline(geom, active, self.system.ports.ris_max_elements)?,
                _ => ChannelModel::fris(*geom, active, mc.selection_mode, mc.phase_mode)?,
            };
            log::info!("simulating {} trials of {} with {active} active elements", mc.trials, mode.as_str());
            let s = simulate_gains(&mc, &model)?;
            self.samples.insert((mode, active), s);
        }
        Ok(&self.samples[&(mode, active)])
    }
}

fn estimates(samples: &GainSamples, cfg: &ScenarioConfig, zeta: f64) -> Result<ModeEstimates> {
    Ok(ModeEstimates {
        op: op_from_samples(samples, cfg)?,
        cop: cop_from_samples(samples, cfg, zeta)?,
        success: success_from_samples(samples, cfg, zeta)?,
    })
}

/// Runs `spec` against `system`.
///
/// Every sweep point reuses the same seeded draws (common random numbers),
/// so simulated curves are smooth in the swept variable and the modes are
/// paired trial by trial.
pub fn run_sweep(system: &SystemConfig, spec: &SweepSpec) -> Result<SweepResult> {
    system.validate()?;
    spec.validate()?;
    let mut cache = SweepCache::new(system)?;
    let values = spec.values();
    let mut rows = Vec::with_capacity(values.len());
    for (index, &value) in values.iter().enumerate() {
        let row = sweep_point(&mut cache, spec.variable, value).map_err(|e| Error::SweepPoint {
            index,
            value,
            source: Box::new(e),
        })?;
        log::info!("sweep point {}/{} ({} = {value}) done", index + 1, values.len(), spec.variable.as_str());
        rows.push(row);
    }
    Ok(SweepResult {
        variable: spec.variable,
        rows,
    })
}

fn sweep_point(cache: &mut SweepCache<'_>, variable: SweepVariable, value: f64) -> Result<SweepRow> {
    let system = cache.system;
    let mut scenario = system.scenario;
    let mut m_o = system.ports.m_o;
    match variable {
        SweepVariable::TransmitPowerDbm => scenario.p_a = dbm_to_watts(value),
        SweepVariable::MuFactor => scenario.mu_offset = value * scenario.sigma2_w,
        SweepVariable::ActivePorts => m_o = value as usize,
    }
    let m_o_max = system.geometry.len();
    if m_o == 0 || m_o > m_o_max {
        return Err(Error::config("surface.m_o", format!("{m_o} outside 1..={m_o_max}")));
    }
    let m_hat = system.ports.m_hat.unwrap_or(m_o);
    scenario.validate()?;

    let fit = cache.fit(m_o)?;
    let ris_fit = cache.ris_fit(m_hat)?;
    let analytic = ClosedForm::evaluate(&fit, &scenario)?;
    let ris_analytic = ClosedForm::evaluate(&ris_fit, &scenario)?;
    let zeta = analytic.zeta;

    let mut per_mode = [None, None, None];
    for (slot, mode) in SurfaceMode::ALL.into_iter().enumerate() {
        if !system.modes.contains(mode) {
            continue;
        }
        let active = if mode == SurfaceMode::Ris { m_hat } else { m_o };
        let samples = cache.samples(mode, active)?;
        per_mode[slot] = Some(estimates(samples, &scenario, zeta)?);
    }
    let [fris, fixed, ris] = per_mode;
    Ok(SweepRow {
        value,
        scenario,
        m_o,
        m_hat,
        fit,
        analytic,
        ris_fit,
        ris_analytic,
        fris,
        fixed,
        ris,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_values() {
        let v = SweepSpec::default().values();
        assert_eq!(v.len(), 25);
        assert_eq!(v[0], -70.0);
        assert_eq!(v[24], -10.0);
        assert!((v[1] - v[0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn geometric_and_linear_spacing() {
        let mu = SweepSpec {
            variable: SweepVariable::MuFactor,
            start: 0.5,
            stop: 8.0,
            points: 5,
            scale: SweepScale::LinearInDb,
        };
        let v = mu.values();
        for w in v.windows(2) {
            assert!((w[1] / w[0] - 2.0).abs() < 1e-12);
        }
        let watts = SweepSpec {
            scale: SweepScale::Linear,
            start: 0.0,
            stop: 10.0,
            points: 3,
            variable: SweepVariable::TransmitPowerDbm,
        };
        let v = watts.values();
        assert!((dbm_to_watts(v[1]) - 0.5 * (dbm_to_watts(0.0) + dbm_to_watts(10.0))).abs() < 1e-12);
        let ports = SweepSpec {
            variable: SweepVariable::ActivePorts,
            start: 4.0,
            stop: 36.0,
            points: 3,
            scale: SweepScale::Linear,
        };
        assert_eq!(ports.values(), vec![4.0, 20.0, 36.0]);
    }

    #[test]
    fn spec_validation() {
        let mut s = SweepSpec::default();
        s.points = 0;
        assert!(s.validate().is_err());
        let s = SweepSpec {
            start: 5.0,
            stop: 5.0,
            ..SweepSpec::default()
        };
        assert!(s.validate().is_err());
        SweepSpec::single(SweepVariable::TransmitPowerDbm, -30.0).validate().unwrap();
    }

    #[test]
    fn mode_set_parsing() {
        assert_eq!("all".parse::<ModeSet>().unwrap(), ModeSet::all());
        let s: ModeSet = "fris, ris".parse().unwrap();
        assert!(s.fris && !s.fixed && s.ris);
        assert_eq!(s.to_string(), "fris,ris");
        assert_eq!("none".parse::<ModeSet>().unwrap().to_string(), "none");
        assert!("bogus".parse::<ModeSet>().is_err());
    }
}
