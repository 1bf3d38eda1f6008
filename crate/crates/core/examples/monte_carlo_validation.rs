//! One operating point: closed form next to Monte Carlo estimates with 95%
//! Wilson intervals, for each simulated surface.

use fris_covert::analytics::{dbm_to_watts, gamma_moment_match, ClosedForm, ScenarioConfig};
use fris_covert::config::SystemConfig;
use fris_covert::montecarlo::{cop_from_samples, op_from_samples, simulate_gains, success_from_samples};
use fris_covert::surface::{correlation_matrix, reduce, PortSelection};
use fris_covert::sweep::SurfaceMode;

fn main() -> fris_covert::Result<()> {
    let system = SystemConfig::default();
    let geom = system.geometry;
    let m_o = system.ports.m_o;
    let cfg = ScenarioConfig {
        p_a: dbm_to_watts(-45.0),
        ..system.scenario
    };
    let fit = gamma_moment_match(&reduce(&correlation_matrix(&geom)?, &PortSelection::fixed_preset(&geom, m_o)?)?)?;
    let an = ClosedForm::evaluate(&fit, &cfg)?;
    println!("closed form at P_A = -45 dBm, M_O = {m_o}: OP {:.4}  COP {:.4}  P_SUC {:.4}", an.op, an.cop, an.success);

    for mode in SurfaceMode::ALL {
        let mc = mode.configure(&system.mc);
        let model = fris_covert::montecarlo::build_model(&mc, &geom, m_o)?;
        let s = simulate_gains(&mc, &model)?;
        let op = op_from_samples(&s, &cfg)?;
        let cop = cop_from_samples(&s, &cfg, an.zeta)?;
        let suc = success_from_samples(&s, &cfg, an.zeta)?;
        println!(
            "{:<6} OP {:.4} [{:.4}, {:.4}]  COP {:.4} [{:.4}, {:.4}]  P_SUC {:.4} [{:.4}, {:.4}]",
            mode.as_str(),
            op.value,
            op.ci_low,
            op.ci_high,
            cop.value,
            cop.ci_low,
            cop.ci_high,
            suc.value,
            suc.ci_low,
            suc.ci_high
        );
    }
    Ok(())
}
