//! Closed-form OP, COP and success probability against transmit power.

use fris_covert::analytics::{dbm_to_watts, gamma_moment_match, ClosedForm, ScenarioConfig};
use fris_covert::config::SystemConfig;
use fris_covert::surface::{correlation_matrix, reduce, PortSelection};

fn main() -> fris_covert::Result<()> {
    let system = SystemConfig::default();
    let geom = system.geometry;
    let j = correlation_matrix(&geom)?;
    let fit = |m_o| gamma_moment_match(&reduce(&j, &PortSelection::fixed_preset(&geom, m_o)?)?);
    let (f16, f36) = (fit(16)?, fit(36)?);

    println!("P_A dBm   OP(16)    OP(36)    COP      P_SUC(16) P_SUC(36)");
    for p in system.sweep.values() {
        let cfg = ScenarioConfig {
            p_a: dbm_to_watts(p),
            ..system.scenario
        };
        let a = ClosedForm::evaluate(&f16, &cfg)?;
        let b = ClosedForm::evaluate(&f36, &cfg)?;
        println!(
            "{p:>7.1} {:>9.3e} {:>9.3e} {:>8.4} {:>9.4} {:>9.4}",
            a.op, b.op, b.cop, a.success, b.success
        );
    }
    Ok(())
}
