//! Drives a sweep from a TOML configuration and writes CSV and SVG output.
//!
//! `cargo run --example config_sweep -- [config.toml] [out-dir]`

use fris_covert::config::{load_config, parse_config};
use fris_covert::output::emit_csv;
use fris_covert::plot::{emit_plot, Metric, PlotOptions};
use fris_covert::sweep::run_sweep;

const INLINE: &str = r#"
[scenario]
mu_factor = 2.0

[surface]
m_o = 16

[montecarlo]
trials = 10000
seed = 42
modes = "fixed,ris"

[sweep]
variable = "p_a_dbm"
start = -60.0
stop = -20.0
points = 9
"#;

fn main() -> fris_covert::Result<()> {
    let mut args = std::env::args().skip(1);
    let system = match args.next() {
        Some(path) => load_config(path)?,
        None => parse_config(INLINE, "<inline>")?,
    };
    for w in &system.warnings {
        eprintln!("warning: {w}");
    }
    let out = std::path::PathBuf::from(args.next().unwrap_or_else(|| "target/config_sweep".into()));
    std::fs::create_dir_all(&out).map_err(|e| fris_covert::Error::Io {
        path: out.clone(),
        source: e,
    })?;

    let result = run_sweep(&system, &system.sweep)?;
    emit_csv(&result, out.join("sweep.csv"))?;
    emit_plot(&result, &PlotOptions::new(Metric::Success), out.join("success.svg"))?;
    emit_plot(&result, &PlotOptions::new(Metric::Outage).log_scale(true), out.join("outage.svg"))?;
    println!("wrote {} points to {}", result.rows.len(), out.display());
    Ok(())
}
