//! Scenario configuration files.
//!
//! The format is sectioned `key = value` text (TOML syntax). Every key is
//! optional; missing keys take the reference scenario's values. Unknown
//! keys and sections are reported as warnings and otherwise ignored.
//!
//! ```text
//! [scenario]
//! d_af = 50.0            # meters
//! d_fb = 100.0
//! d_fw = 100.0
//! alpha = 2.1
//! rho0 = 1.0
//! r_b = 0.1              # bits/s/Hz
//! sigma2_b_dbm = -90.0   # or sigma2_b_w
//! sigma2_w_dbm = -90.0   # or sigma2_w_w
//! p0 = 0.5
//! p1 = 0.5
//! mu_factor = 1.0        # threshold offset as a multiple of sigma2_w; or mu_w
//! p_a_dbm = 0.0          # or p_a_w
//!
//! [surface]
//! m_x = 12
//! m_z = 12
//! w_x = 2.0              # aperture width in wavelengths
//! w_z = 2.0
//! carrier_hz = 2.4e9     # wavelength = 3e8 / carrier_hz, or give wavelength directly
//! m_o = 36               # active fluid ports
//! m_hat = 36             # baseline elements, follows m_o when absent
//! ris_max_elements = 144 # baseline density cap, defaults to m_x * m_z
//!
//! [montecarlo]
//! trials = 100000
//! seed = 1
//! workers = 4            # defaults to the available parallelism
//! modes = "all"          # any of fris, fixed, ris, all, none (comma separated)
//!
//! [sweep]
//! variable = "p_a_dbm"   # p_a_dbm, mu_factor or m_o
//! start = -70.0
//! stop = -10.0
//! points = 25
//! scale = "linear-in-db" # or linear
//! ```

use std::fmt::Write as _;
use std::path::Path;

use toml::{Table, Value};

use crate::analytics::{dbm_to_watts, ScenarioConfig};
use crate::error::{Error, Result};
use crate::montecarlo::MCConfig;
use crate::surface::SurfaceGeometry;
use crate::sweep::{ModeSet, SweepScale, SweepSpec, SweepVariable};

/// Propagation speed used to turn a carrier frequency into a wavelength.
/// 2.4 GHz maps to exactly 0.125 m.
pub const PROPAGATION_SPEED: f64 = 3e8;

pub const DEFAULT_CARRIER_HZ: f64 = 2.4e9;

/// Active-port plan shared by the closed forms and the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PortPlan {
    /// Active fluid ports.
    pub m_o: usize,
    /// Baseline element count; `None` means "same as `m_o`".
    pub m_hat: Option<usize>,
    /// Largest baseline allowed on the aperture.
    pub ris_max_elements: usize,
}

/// Everything a sweep needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub scenario: ScenarioConfig,
    pub geometry: SurfaceGeometry,
    pub ports: PortPlan,
    pub mc: MCConfig,
    pub modes: ModeSet,
    pub sweep: SweepSpec,
    /// Non-fatal diagnostics collected while loading (unknown keys).
    pub warnings: Vec<String>,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let geometry = SurfaceGeometry::new(12, 12, 2.0, 2.0, PROPAGATION_SPEED / DEFAULT_CARRIER_HZ)
            .expect("reference geometry is valid");
        SystemConfig {
            scenario: ScenarioConfig::default(),
            geometry,
            ports: PortPlan {
                m_o: 36,
                m_hat: None,
                ris_max_elements: geometry.len(),
            },
            mc: MCConfig::default(),
            modes: ModeSet::all(),
            sweep: SweepSpec::default(),
            warnings: Vec::new(),
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.mc.validate()?;
        self.sweep.validate()?;
        let m = self.geometry.len();
        if self.ports.m_o == 0 || self.ports.m_o > m {
            return Err(Error::config(
                "surface.m_o",
                format!("{} active ports requested but the grid has M = {m}", self.ports.m_o),
            ));
        }
        if let Some(m_hat) = self.ports.m_hat {
            if m_hat == 0 || m_hat > self.ports.ris_max_elements {
                return Err(Error::config(
                    "surface.m_hat",
                    format!("must lie in 1..={}, got {m_hat}", self.ports.ris_max_elements),
                ));
            }
        }
        Ok(())
    }

    /// Baseline element count in effect.
    pub fn m_hat(&self) -> usize {
        self.ports.m_hat.unwrap_or(self.ports.m_o)
    }

    /// Renders the configuration in the file format; parsing the output
    /// yields the same configuration.
    pub fn to_config_string(&self) -> String {
        let s = &self.scenario;
        let g = &self.geometry;
        let mut out = String::new();
        let _ = writeln!(out, "[scenario]");
        for (k, v) in [
            ("d_af", s.d_af),
            ("d_fb", s.d_fb),
            ("d_fw", s.d_fw),
            ("alpha", s.alpha),
            ("rho0", s.rho0),
            ("r_b", s.r_b),
            ("sigma2_b_w", s.sigma2_b),
            ("sigma2_w_w", s.sigma2_w),
            ("p0", s.p0),
            ("p1", s.p1),
            ("mu_w", s.mu_offset),
            ("p_a_w", s.p_a),
        ] {
            let _ = writeln!(out, "{k} = {v:?}");
        }
        let _ = writeln!(out, "\n[surface]");
        let _ = writeln!(out, "m_x = {}", g.m_x());
        let _ = writeln!(out, "m_z = {}", g.m_z());
        let _ = writeln!(out, "w_x = {:?}", g.w_x());
        let _ = writeln!(out, "w_z = {:?}", g.w_z());
        let _ = writeln!(out, "wavelength = {:?}", g.wavelength());
        let _ = writeln!(out, "m_o = {}", self.ports.m_o);
        if let Some(m_hat) = self.ports.m_hat {
            let _ = writeln!(out, "m_hat = {m_hat}");
        }
        let _ = writeln!(out, "ris_max_elements = {}", self.ports.ris_max_elements);
        let _ = writeln!(out, "\n[montecarlo]");
        let _ = writeln!(out, "trials = {}", self.mc.trials);
        let _ = writeln!(out, "seed = {}", self.mc.master_seed);
        let _ = writeln!(out, "workers = {}", self.mc.workers);
        let _ = writeln!(out, "modes = \"{}\"", self.modes);
        let _ = writeln!(out, "\n[sweep]");
        let _ = writeln!(out, "variable = \"{}\"", self.sweep.variable.as_str());
        let _ = writeln!(out, "start = {:?}", self.sweep.start);
        let _ = writeln!(out, "stop = {:?}", self.sweep.stop);
        let _ = writeln!(out, "points = {}", self.sweep.points);
        let _ = writeln!(out, "scale = \"{}\"", self.sweep.scale.as_str());
        out
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<SystemConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

/// Parses configuration text; `origin` only labels diagnostics.
pub fn parse_config(text: &str, origin: impl AsRef<Path>) -> Result<SystemConfig> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
        path: origin.as_ref().to_path_buf(),
        message: e.to_string(),
    })?;
    let mut reader = Reader {
        table,
        warnings: Vec::new(),
    };
    let cfg = reader.build()?;
    for w in &cfg.warnings {
        log::warn!("{}: {w}", origin.as_ref().display());
    }
    Ok(cfg)
}

struct Reader {
    table: Table,
    warnings: Vec<String>,
}

const SECTIONS: [(&str, &[&str]); 4] = [
    (
        "scenario",
        &[
            "d_af", "d_fb", "d_fw", "alpha", "rho0", "r_b", "sigma2_b_dbm", "sigma2_b_w", "sigma2_w_dbm",
            "sigma2_w_w", "p0", "p1", "mu_factor", "mu_w", "p_a_dbm", "p_a_w",
        ],
    ),
    (
        "surface",
        &["m_x", "m_z", "w_x", "w_z", "carrier_hz", "wavelength", "m_o", "m_hat", "ris_max_elements"],
    ),
    ("montecarlo", &["trials", "seed", "workers", "modes"]),
    ("sweep", &["variable", "start", "stop", "points", "scale"]),
];

impl Reader {
    fn build(&mut self) -> Result<SystemConfig> {
        self.check_unknown()?;
        let defaults = SystemConfig::default();

        let d = defaults.scenario;
        let sigma2_b = self.power("scenario", "sigma2_b")?.unwrap_or(d.sigma2_b);
        let sigma2_w = self.power("scenario", "sigma2_w")?.unwrap_or(d.sigma2_w);
        let mu_factor = self.float("scenario", "mu_factor")?;
        let mu_w = self.float("scenario", "mu_w")?;
        let mu_offset = match (mu_factor, mu_w) {
            (Some(_), Some(_)) => {
                return Err(Error::config("scenario.mu_factor", "give either mu_factor or mu_w, not both"))
            }
            (Some(f), None) => f * sigma2_w,
            (None, Some(w)) => w,
            (None, None) => sigma2_w,
        };
        let scenario = ScenarioConfig {
            d_af: self.float("scenario", "d_af")?.unwrap_or(d.d_af),
            d_fb: self.float("scenario", "d_fb")?.unwrap_or(d.d_fb),
            d_fw: self.float("scenario", "d_fw")?.unwrap_or(d.d_fw),
            alpha: self.float("scenario", "alpha")?.unwrap_or(d.alpha),
            rho0: self.float("scenario", "rho0")?.unwrap_or(d.rho0),
            r_b: self.float("scenario", "r_b")?.unwrap_or(d.r_b),
            sigma2_b,
            sigma2_w,
            p0: self.float("scenario", "p0")?.unwrap_or(d.p0),
            p1: self.float("scenario", "p1")?.unwrap_or(d.p1),
            mu_offset,
            p_a: self.power("scenario", "p_a")?.unwrap_or(d.p_a),
        };
        scenario.validate().map_err(|e| prefix_field(e, "scenario"))?;

        let dg = defaults.geometry;
        let wavelength = match (self.float("surface", "wavelength")?, self.float("surface", "carrier_hz")?) {
            (Some(_), Some(_)) => {
                return Err(Error::config("surface.wavelength", "give either wavelength or carrier_hz, not both"))
            }
            (Some(l), None) => l,
            (None, Some(f)) => {
                if !(f > 0.0) {
                    return Err(Error::config("surface.carrier_hz", format!("must be positive, got {f}")));
                }
                PROPAGATION_SPEED / f
            }
            (None, None) => dg.wavelength(),
        };
        let geometry = SurfaceGeometry::new(
            self.count("surface", "m_x")?.unwrap_or(dg.m_x()),
            self.count("surface", "m_z")?.unwrap_or(dg.m_z()),
            self.float("surface", "w_x")?.unwrap_or(dg.w_x()),
            self.float("surface", "w_z")?.unwrap_or(dg.w_z()),
            wavelength,
        )
        .map_err(|e| Error::config("surface", e.to_string()))?;
        let ports = PortPlan {
            m_o: self.count("surface", "m_o")?.unwrap_or(defaults.ports.m_o),
            m_hat: self.count("surface", "m_hat")?,
            ris_max_elements: self.count("surface", "ris_max_elements")?.unwrap_or(geometry.len()),
        };

        let dm = defaults.mc;
        let mc = MCConfig {
            trials: self.integer("montecarlo", "trials")?.unwrap_or(dm.trials),
            master_seed: self.integer("montecarlo", "seed")?.unwrap_or(dm.master_seed),
            workers: self.count("montecarlo", "workers")?.unwrap_or(dm.workers),
            ..dm
        };
        let modes = match self.string("montecarlo", "modes")? {
            Some(s) => s.parse().map_err(|e| Error::config("montecarlo.modes", e))?,
            None => defaults.modes,
        };

        let ds = defaults.sweep;
        let variable: SweepVariable = match self.string("sweep", "variable")? {
            Some(s) => s.parse().map_err(|e| Error::config("sweep.variable", e))?,
            None => ds.variable,
        };
        let scale: SweepScale = match self.string("sweep", "scale")? {
            Some(s) => s.parse().map_err(|e| Error::config("sweep.scale", e))?,
            None => ds.scale,
        };
        let variable_changed = variable != ds.variable;
        let start = self.float("sweep", "start")?;
        let stop = self.float("sweep", "stop")?;
        if variable_changed && (start.is_none() || stop.is_none()) {
            return Err(Error::config("sweep.start", "non-default sweep variables need explicit start and stop"));
        }
        let sweep = SweepSpec {
            variable,
            start: start.unwrap_or(ds.start),
            stop: stop.unwrap_or(ds.stop),
            points: self.count("sweep", "points")?.unwrap_or(ds.points),
            scale,
        };

        let cfg = SystemConfig {
            scenario,
            geometry,
            ports,
            mc,
            modes,
            sweep,
            warnings: std::mem::take(&mut self.warnings),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn check_unknown(&mut self) -> Result<()> {
        for (name, value) in &self.table {
            let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| s == name) else {
                self.warnings.push(format!("unknown section or key `{name}` ignored"));
                continue;
            };
            let Value::Table(section) = value else {
                return Err(Error::config(name.clone(), "expected a [section]"));
            };
            for key in section.keys() {
                if !keys.contains(&key.as_str()) {
                    self.warnings.push(format!("unknown key `{name}.{key}` ignored"));
                }
            }
        }
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.table.get(section).and_then(Value::as_table).and_then(|t| t.get(key))
    }

    fn float(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(*f)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(other) => Err(Error::config(
                format!("{section}.{key}"),
                format!("expected a number, found {}", other.type_str()),
            )),
        }
    }

    fn integer(&self, section: &str, key: &str) -> Result<Option<u64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(other) => Err(Error::config(
                format!("{section}.{key}"),
                format!("expected a non-negative integer, found {other}"),
            )),
        }
    }

    fn count(&self, section: &str, key: &str) -> Result<Option<usize>> {
        Ok(self.integer(section, key)?.map(|v| v as usize))
    }

    fn string(&self, section: &str, key: &str) -> Result<Option<String>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(Error::config(
                format!("{section}.{key}"),
                format!("expected a string, found {}", other.type_str()),
            )),
        }
    }

    /// A power given either as `<name>_dbm` or `<name>_w`.
    fn power(&self, section: &str, name: &str) -> Result<Option<f64>> {
        let dbm = self.float(section, &format!("{name}_dbm"))?;
        let watts = self.float(section, &format!("{name}_w"))?;
        match (dbm, watts) {
            (Some(_), Some(_)) => Err(Error::config(
                format!("{section}.{name}_dbm"),
                format!("give either {name}_dbm or {name}_w, not both"),
            )),
            (Some(d), None) => Ok(Some(dbm_to_watts(d))),
            (None, w) => Ok(w),
        }
    }
}

fn prefix_field(err: Error, section: &str) -> Error {
    match err {
        Error::Config { field, reason } => Error::Config {
            field: format!("{section}.{field}"),
            reason,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_reference_defaults() {
        let cfg = parse_config("", "empty.toml").unwrap();
        assert_eq!(cfg.geometry.wavelength(), 0.125);
        assert_eq!((cfg.geometry.m_x(), cfg.geometry.m_z()), (12, 12));
        assert_eq!(cfg.ports.m_o, 36);
        assert_eq!(cfg.scenario, ScenarioConfig::default());
        assert_eq!(cfg.sweep, SweepSpec::default());
        assert!(cfg.warnings.is_empty());
    }

    #[test]
    fn prior_sum_violation_is_named() {
        let err = parse_config("[scenario]\np0 = 0.6\np1 = 0.5\n", "x").unwrap_err();
        assert!(err.is_config_error());
        let msg = err.to_string();
        assert!(msg.contains("p0 + p1") && msg.contains("sum to 1"), "{msg}");
    }

    #[test]
    fn too_many_active_ports() {
        let err = parse_config("[surface]\nm_o = 200\n", "x").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("surface.m_o") && msg.contains("144"), "{msg}");
    }

    #[test]
    fn unknown_keys_warn() {
        let cfg = parse_config("colour = 3\n[scenario]\nd_af = 40\nbogus = 1\n", "x").unwrap();
        assert_eq!(cfg.scenario.d_af, 40.0);
        assert_eq!(cfg.warnings.len(), 2);
        assert!(cfg.warnings.iter().any(|w| w.contains("scenario.bogus")));
    }

    #[test]
    fn syntax_error_reports_location() {
        let err = parse_config("[scenario]\nd_af = = 3\n", "broken.toml").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("broken.toml") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn type_errors_name_the_field() {
        let err = parse_config("[surface]\nm_x = \"twelve\"\n", "x").unwrap_err();
        assert!(err.to_string().contains("surface.m_x"));
        let err = parse_config("[scenario]\nalpha = true\n", "x").unwrap_err();
        assert!(err.to_string().contains("scenario.alpha"));
    }

    #[test]
    fn units_and_overrides() {
        let text = "[scenario]\np_a_dbm = 10\nmu_factor = 2\nsigma2_w_w = 2e-12\n[surface]\ncarrier_hz = 3e9\nm_hat = 16\n";
        let cfg = parse_config(text, "x").unwrap();
        assert!((cfg.scenario.p_a - 1e-2).abs() < 1e-15);
        assert_eq!(cfg.scenario.mu_offset, 4e-12);
        assert_eq!(cfg.geometry.wavelength(), 0.1);
        assert_eq!(cfg.m_hat(), 16);
        assert!(parse_config("[scenario]\np_a_dbm = 1\np_a_w = 1\n", "x").is_err());
    }

    #[test]
    fn rendered_config_round_trips() {
        let text = "[scenario]\nd_fw = 80\np_a_dbm = -33.3\n[surface]\nm_hat = 16\n[montecarlo]\nmodes = \"fris,ris\"\nworkers = 3\n[sweep]\nvariable = \"mu_factor\"\nstart = 0.5\nstop = 5\npoints = 4\n";
        let cfg = parse_config(text, "x").unwrap();
        let again = parse_config(&cfg.to_config_string(), "y").unwrap();
        assert_eq!(cfg, again);
    }
}
