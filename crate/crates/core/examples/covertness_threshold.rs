//! The warden's detector: error probabilities against its threshold and the
//! worst-case choice just above the noise floor.

use fris_covert::analytics::{
    dbm_to_watts, fa_probability, gamma_moment_match, md_probability, optimal_threshold, ScenarioConfig,
};
use fris_covert::config::SystemConfig;
use fris_covert::surface::{correlation_matrix, reduce, PortSelection};

fn main() -> fris_covert::Result<()> {
    let system = SystemConfig::default();
    let geom = system.geometry;
    let fit = gamma_moment_match(&reduce(&correlation_matrix(&geom)?, &PortSelection::fixed_preset(&geom, 36)?)?)?;
    let cfg = ScenarioConfig {
        p_a: dbm_to_watts(-35.0),
        ..system.scenario
    };
    println!("zeta/σ²_W   P_FA    P_MD     ξ");
    for k in [0.5, 1.0, 1.01, 1.1, 1.5, 2.0, 3.0, 5.0, 10.0] {
        let zeta = k * cfg.sigma2_w;
        let fa = fa_probability(&cfg, zeta);
        let md = md_probability(&fit, &cfg, zeta)?;
        println!("{k:>9.2} {fa:>6.1} {md:>8.4} {:>7.4}", cfg.p0 * fa + cfg.p1 * md);
    }
    let z = optimal_threshold(&cfg)?;
    println!("worst-case threshold ζ* = σ²_W + μ = {:.3e} W", z);
    Ok(())
}
