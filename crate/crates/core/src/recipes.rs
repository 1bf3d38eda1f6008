//! Ready-made figure recipes: outage and success probability versus
//! transmit power for several active-port counts, and covertness outage
//! versus transmit power for several threshold offsets.

use std::path::{Path, PathBuf};

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::output::emit_csv;
use crate::plot::{emit_figure, Metric, PlotOptions};
use crate::sweep::{run_sweep, SweepResult};

/// Active-port counts compared in the outage and success figures.
pub const DEFAULT_ACTIVE_PORTS: [usize; 2] = [16, 36];

/// Threshold offsets, in units of the warden's noise power, compared in the
/// covertness figure.
pub const DEFAULT_MU_FACTORS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recipe {
    Outage,
    Covertness,
    Success,
}

impl Recipe {
    pub fn name(&self) -> &'static str {
        match self {
            Recipe::Outage => "outage",
            Recipe::Covertness => "covertness",
            Recipe::Success => "success",
        }
    }
}

impl std::str::FromStr for Recipe {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "outage" | "op" => Ok(Recipe::Outage),
            "covertness" | "cop" => Ok(Recipe::Covertness),
            "success" | "suc" => Ok(Recipe::Success),
            other => Err(format!("unknown recipe `{other}` (expected outage, covertness or success)")),
        }
    }
}

/// A set of labelled sweeps sharing one plot.
#[derive(Debug, Clone)]
pub struct Figure {
    pub recipe: Recipe,
    pub metric: Metric,
    pub log_y: bool,
    /// `(slug, legend label, result)` per curve family.
    pub panels: Vec<(String, String, SweepResult)>,
}

impl Figure {
    pub fn panel(&self, slug: &str) -> Option<&SweepResult> {
        self.panels.iter().find(|p| p.0 == slug).map(|p| &p.2)
    }

    /// Writes one CSV per panel plus a shared SVG into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        for (slug, _, result) in &self.panels {
            let path = dir.join(format!("{}_{slug}.csv", self.recipe.name()));
            emit_csv(result, &path)?;
            written.push(path);
        }
        let labelled: Vec<(String, &SweepResult)> = self.panels.iter().map(|(_, l, r)| (l.clone(), r)).collect();
        let options = PlotOptions::new(self.metric).log_scale(self.log_y);
        let svg = dir.join(format!("{}.svg", self.recipe.name()));
        emit_figure(&labelled, &options, &svg)?;
        written.push(svg);
        Ok(written)
    }
}

fn port_panels(base: &SystemConfig) -> Result<Vec<(String, String, SweepResult)>> {
    DEFAULT_ACTIVE_PORTS
        .iter()
        .map(|&m_o| {
            let mut cfg = base.clone();
            cfg.ports.m_o = m_o;
            let result = run_sweep(&cfg, &cfg.sweep)?;
            Ok((format!("mo{m_o}"), format!("M_O={m_o}"), result))
        })
        .collect()
}

/// Runs `recipe` on top of `base` (scenario, geometry, Monte Carlo settings
/// and sweep axis are taken from it).
pub fn run_recipe(recipe: Recipe, base: &SystemConfig) -> Result<Figure> {
    let (metric, log_y, panels) = match recipe {
        Recipe::Outage => (Metric::Outage, true, port_panels(base)?),
        Recipe::Success => (Metric::Success, false, port_panels(base)?),
        Recipe::Covertness => {
            let panels = DEFAULT_MU_FACTORS
                .iter()
                .map(|&f| {
                    let mut cfg = base.clone();
                    cfg.scenario.mu_offset = f * cfg.scenario.sigma2_w;
                    let result = run_sweep(&cfg, &cfg.sweep)?;
                    Ok((format!("mu{f}"), format!("mu={f}σ²"), result))
                })
                .collect::<Result<Vec<_>>>()?;
            (Metric::Covertness, false, panels)
        }
    };
    Ok(Figure {
        recipe,
        metric,
        log_y,
        panels,
    })
}
