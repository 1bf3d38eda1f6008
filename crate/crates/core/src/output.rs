//! CSV emission for sweep results.

use std::fmt::Write as _;
use std::path::Path;

use crate::analytics::watts_to_dbm;
use crate::error::{Error, Result};
use crate::montecarlo::EstimateWithCI;
use crate::sweep::{SurfaceMode, SweepResult};

const BASE_COLUMNS: [&str; 20] = [
    "value",
    "p_a_dbm",
    "p_a_w",
    "mu_w",
    "m_o",
    "m_hat",
    "zeta_w",
    "kappa",
    "theta",
    "an_p_fa",
    "an_p_md",
    "an_cop",
    "an_op",
    "an_xi",
    "an_suc",
    "ris_kappa",
    "ris_theta",
    "ris_an_op",
    "ris_an_cop",
    "ris_an_suc",
];

const MODE_METRICS: [&str; 3] = ["op", "cop", "suc"];

/// Column names, in order. The schema does not depend on which modes ran.
pub fn csv_header() -> Vec<String> {
    let mut cols: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    for mode in SurfaceMode::ALL {
        for metric in MODE_METRICS {
            let stem = format!("{}_{metric}", mode.as_str());
            cols.push(stem.clone());
            cols.push(format!("{stem}_lo"));
            cols.push(format!("{stem}_hi"));
        }
    }
    cols
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Renders the CSV text (header plus one line per sweep point).
pub fn render_csv(result: &SweepResult) -> String {
    let mut out = csv_header().join(",");
    out.push('\n');
    for row in &result.rows {
        let s = &row.scenario;
        let a = &row.analytic;
        let r = &row.ris_analytic;
        let mut cells = vec![
            num(row.value),
            num(watts_to_dbm(s.p_a)),
            num(s.p_a),
            num(s.mu_offset),
            row.m_o.to_string(),
            row.m_hat.to_string(),
            num(a.zeta),
            num(row.fit.kappa),
            num(row.fit.theta),
            num(a.p_fa),
            num(a.p_md),
            num(a.cop),
            num(a.op),
            num(a.xi),
            num(a.success),
            num(row.ris_fit.kappa),
            num(row.ris_fit.theta),
            num(r.op),
            num(r.cop),
            num(r.success),
        ];
        for mode in SurfaceMode::ALL {
            match row.estimates(mode) {
                Some(e) => {
                    for est in [e.op, e.cop, e.success] {
                        push_estimate(&mut cells, &est);
                    }
                }
                None => cells.extend(std::iter::repeat_n(String::new(), 3 * MODE_METRICS.len())),
            }
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

fn push_estimate(cells: &mut Vec<String>, e: &EstimateWithCI) {
    cells.push(num(e.value));
    cells.push(num(e.ci_low));
    cells.push(num(e.ci_high));
}

/// Writes the sweep as UTF-8 CSV.
pub fn emit_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_csv(result)).map_err(|e| Error::io(path, e))
}
