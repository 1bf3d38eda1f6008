//! Fluid port selection against a fixed-position surface with the same
//! number of active elements, both with coherent phases.

use fris_covert::config::SystemConfig;
use fris_covert::sweep::run_sweep;

fn main() -> fris_covert::Result<()> {
    let mut system = SystemConfig::default();
    system.modes = "fris,ris".parse().expect("mode list");
    system.mc.trials = 20_000;
    let result = run_sweep(&system, &system.sweep)?;
    println!("P_A dBm   FRIS OP [95% CI]            RIS OP [95% CI]");
    for row in &result.rows {
        let (f, r) = (row.fris.unwrap().op, row.ris.unwrap().op);
        println!(
            "{:>7.1}   {:.4} [{:.4}, {:.4}]   {:.4} [{:.4}, {:.4}]{}",
            row.value,
            f.value,
            f.ci_low,
            f.ci_high,
            r.value,
            r.ci_low,
            r.ci_high,
            if f.overlaps(&r) { "" } else { "  *" }
        );
    }
    println!("* disjoint intervals");
    Ok(())
}
