//! Moment-matched Gamma law for the cascaded gain, compared with draws of
//! the fixed-preset, static-phase channel.

use fris_covert::analytics::gamma_moment_match;
use fris_covert::channel::{ChannelModel, PhaseMode, SelectionMode};
use fris_covert::config::SystemConfig;
use fris_covert::montecarlo::{ks_distance, simulate_gains, MCConfig};
use fris_covert::surface::{correlation_matrix, reduce, PortSelection};

fn main() -> fris_covert::Result<()> {
    let geom = SystemConfig::default().geometry;
    let j = correlation_matrix(&geom)?;
    let mc = MCConfig {
        trials: 100_000,
        selection_mode: SelectionMode::Fixed,
        phase_mode: PhaseMode::Static,
        ..MCConfig::default()
    };
    println!("M_O    kappa    theta   fit mean  sim mean   fit var    sim var     KS");
    for m_o in [4, 9, 16, 36] {
        let fit = gamma_moment_match(&reduce(&j, &PortSelection::fixed_preset(&geom, m_o)?)?)?;
        let model = ChannelModel::fris(geom, m_o, SelectionMode::Fixed, PhaseMode::Static)?;
        let g = simulate_gains(&mc, &model)?.g_b;
        let n = g.len() as f64;
        let mean = g.iter().sum::<f64>() / n;
        let var = g.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        println!(
            "{m_o:>3} {:>8.3} {:>8.3} {:>10.3} {:>9.3} {:>9.2} {:>10.2} {:>7.4}",
            fit.kappa,
            fit.theta,
            fit.mean(),
            mean,
            fit.variance(),
            var,
            ks_distance(&g, &fit)?
        );
    }
    Ok(())
}
