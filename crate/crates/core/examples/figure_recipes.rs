//! The three built-in figure recipes at reduced trial counts.
//!
//! `cargo run --release --example figure_recipes -- [out-dir]`

use fris_covert::config::SystemConfig;
use fris_covert::recipes::{run_recipe, Recipe};

fn main() -> fris_covert::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/figures".into());
    let mut system = SystemConfig::default();
    system.mc.trials = 5_000;
    for recipe in [Recipe::Outage, Recipe::Covertness, Recipe::Success] {
        for path in run_recipe(recipe, &system)?.write(&out)? {
            println!("{}", path.display());
        }
    }
    Ok(())
}
