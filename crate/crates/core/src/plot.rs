//! Minimal self-contained SVG line plots of sweep results.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sweep::{ModeEstimates, SurfaceMode, SweepResult, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Outage,
    Covertness,
    Success,
}

impl Metric {
    pub fn label(&self) -> &'static str {
        match self {
            Metric::Outage => "outage probability",
            Metric::Covertness => "covertness outage probability",
            Metric::Success => "success probability",
        }
    }

    fn analytic(&self, row: &SweepRow) -> f64 {
        match self {
            Metric::Outage => row.analytic.op,
            Metric::Covertness => row.analytic.cop,
            Metric::Success => row.analytic.success,
        }
    }

    fn ris_analytic(&self, row: &SweepRow) -> f64 {
        match self {
            Metric::Outage => row.ris_analytic.op,
            Metric::Covertness => row.ris_analytic.cop,
            Metric::Success => row.ris_analytic.success,
        }
    }

    fn simulated(&self, e: &ModeEstimates) -> f64 {
        match self {
            Metric::Outage => e.op.value,
            Metric::Covertness => e.cop.value,
            Metric::Success => e.success.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub metric: Metric,
    pub log_y: bool,
    pub title: String,
}

impl PlotOptions {
    pub fn new(metric: Metric) -> Self {
        PlotOptions {
            metric,
            log_y: false,
            title: metric.label().to_string(),
        }
    }

    pub fn log_scale(mut self, on: bool) -> Self {
        self.log_y = on;
        self
    }

    pub fn titled(mut self, title: impl Into<String>) -> Self {
        self.title = title.into();
        self
    }
}

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
    color: &'static str,
    dashed: bool,
    markers: bool,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

const WIDTH: f64 = 780.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 230.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const LOG_FLOOR: f64 = 1e-6;

fn collect_series(panels: &[(String, &SweepResult)], metric: Metric) -> Vec<Series> {
    let mut series = Vec::new();
    for (p, (label, result)) in panels.iter().enumerate() {
        let color = PALETTE[p % PALETTE.len()];
        let prefix = if label.is_empty() { String::new() } else { format!("{label} ") };
        let xs = result.values();
        series.push(Series {
            name: format!("{prefix}FRIS analytic"),
            points: xs.iter().zip(&result.rows).map(|(&x, r)| (x, metric.analytic(r))).collect(),
            color,
            dashed: false,
            markers: false,
        });
        series.push(Series {
            name: format!("{prefix}RIS analytic"),
            points: xs.iter().zip(&result.rows).map(|(&x, r)| (x, metric.ris_analytic(r))).collect(),
            color,
            dashed: true,
            markers: false,
        });
        for mode in SurfaceMode::ALL {
            let pts: Vec<(f64, f64)> = xs
                .iter()
                .zip(&result.rows)
                .filter_map(|(&x, r)| r.estimates(mode).map(|e| (x, metric.simulated(e))))
                .collect();
            if pts.is_empty() {
                continue;
            }
            let (name, dashed) = match mode {
                SurfaceMode::Fris => ("FRIS sim", false),
                SurfaceMode::Fixed => ("fixed-preset sim", false),
                SurfaceMode::Ris => ("RIS sim", true),
            };
            series.push(Series {
                name: format!("{prefix}{name}"),
                points: pts,
                color,
                dashed,
                markers: true,
            });
        }
    }
    series
}

fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r == r.trunc() {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders one or more labelled sweep results as an SVG document.
pub fn render_svg(panels: &[(String, &SweepResult)], options: &PlotOptions) -> Result<String> {
    if panels.is_empty() || panels.iter().all(|(_, r)| r.is_empty()) {
        return Err(Error::EmptyResult);
    }
    let series = collect_series(panels, options.metric);
    let xs = panels.iter().flat_map(|(_, r)| r.values());
    let (mut x_min, mut x_max) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if x_min == x_max {
        x_min -= 1.0;
        x_max += 1.0;
    }
    let (y_min, y_max) = if options.log_y {
        let smallest = series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .filter(|&y| y > 0.0)
            .fold(1.0, f64::min)
            .max(LOG_FLOOR);
        (smallest.log10().floor().min(-1.0), 0.0)
    } else {
        (0.0, 1.0)
    };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| {
        let v = if options.log_y { y.max(10f64.powf(y_min)).log10() } else { y };
        TOP + (1.0 - (v - y_min) / (y_max - y_min)) * plot_h
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&options.title)
    );

    // grid and ticks
    let step = nice_step(x_max - x_min, 6);
    let mut t = (x_min / step).ceil() * step;
    while t <= x_max + 1e-9 * step {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 18.0,
            fmt_tick(t)
        );
        t += step;
    }
    let y_ticks: Vec<f64> = if options.log_y {
        (y_min as i64..=0).map(|e| 10f64.powi(e as i32)).collect()
    } else {
        (0..=5).map(|k| k as f64 * 0.2).collect()
    };
    for v in y_ticks {
        let y = sy(v);
        let label = if options.log_y { format!("1e{}", v.log10().round() as i64) } else { fmt_tick(v) };
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(panels[0].1.variable.axis_label())
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(options.metric.label())
    );

    for (k, s) in series.iter().enumerate() {
        let path: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let width = if s.markers { 1.0 } else { 2.0 };
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="{width}"{dash} points="{}"/>"#,
            s.color,
            path.join(" ")
        );
        if s.markers {
            for &(x, y) in &s.points {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="none" stroke="{}"/>"#,
                    sx(x),
                    sy(y),
                    s.color
                );
            }
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 24.0,
            s.color,
            lx + 30.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Plots several labelled results on shared axes.
pub fn emit_figure(panels: &[(String, &SweepResult)], options: &PlotOptions, path: impl AsRef<Path>) -> Result<()> {
    let svg = render_svg(panels, options)?;
    let path = path.as_ref();
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

/// Plots one sweep result.
pub fn emit_plot(result: &SweepResult, options: &PlotOptions, path: impl AsRef<Path>) -> Result<()> {
    emit_figure(&[(String::new(), result)], options, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::SweepVariable;

    #[test]
    fn empty_result_is_an_error() {
        let empty = SweepResult {
            variable: SweepVariable::TransmitPowerDbm,
            rows: vec![],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.svg");
        assert!(matches!(
            emit_plot(&empty, &PlotOptions::new(Metric::Outage), &path),
            Err(Error::EmptyResult)
        ));
        assert!(!path.exists());
    }

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(60.0, 6), 10.0);
        assert_eq!(nice_step(1.0, 5), 0.2);
        assert_eq!(fmt_tick(-40.0), "-40");
    }
}
