use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fris_covert::config::{load_config, SystemConfig};
use fris_covert::output::emit_csv;
use fris_covert::plot::{emit_plot, Metric, PlotOptions};
use fris_covert::recipes::{run_recipe, Recipe};
use fris_covert::sweep::{run_sweep, ModeSet};
use fris_covert::validation::run_all;
use fris_covert::Error;

#[derive(Parser)]
#[command(name = "fris-covert", version, about = "Covert communication through a fluid reconfigurable intelligent surface")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and write CSV (and optionally SVG) output.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Run a built-in figure recipe (outage, covertness, success) instead
        /// of the configured sweep.
        #[arg(long)]
        recipe: Option<Recipe>,
        /// Also write SVG plots of OP, COP and P_SUC.
        #[arg(long)]
        plot: bool,
    },
    /// Run the closed-form versus simulation checks.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Print the effective configuration as TOML.
    ShowConfig {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per sweep point override.
    #[arg(long)]
    trials: Option<u64>,
    /// Simulated surfaces: fris, fixed, ris, all, none or a comma list.
    #[arg(long)]
    mode: Option<ModeSet>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn system(&self) -> fris_covert::Result<SystemConfig> {
        let mut system = match &self.config {
            // an unreadable config file is the user's input, not a runtime failure
            Some(path) => load_config(path).map_err(|e| match e {
                Error::Io { path, source } => Error::Parse {
                    path,
                    message: source.to_string(),
                },
                other => other,
            })?,
            None => SystemConfig::default(),
        };
        if let Some(seed) = self.seed {
            system.mc.master_seed = seed;
        }
        if let Some(trials) = self.trials {
            system.mc.trials = trials;
        }
        if let Some(mode) = self.mode {
            system.modes = mode;
        }
        system.validate()?;
        for w in &system.warnings {
            log::warn!("{w}");
        }
        Ok(system)
    }
}

fn create_dir(dir: &PathBuf) -> fris_covert::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.clone(),
        source: e,
    })
}

fn run(cli: Cli) -> fris_covert::Result<ExitCode> {
    match cli.command {
        Command::ShowConfig { common } => {
            print!("{}", common.system()?.to_config_string());
        }
        Command::Sweep { common, recipe, plot } => {
            let system = common.system()?;
            create_dir(&common.out)?;
            if let Some(recipe) = recipe {
                for path in run_recipe(recipe, &system)?.write(&common.out)? {
                    println!("{}", path.display());
                }
                return Ok(ExitCode::SUCCESS);
            }
            let result = run_sweep(&system, &system.sweep)?;
            let csv = common.out.join("sweep.csv");
            emit_csv(&result, &csv)?;
            println!("{}", csv.display());
            if plot {
                for (metric, name, log_y) in [
                    (Metric::Outage, "plot_op.svg", true),
                    (Metric::Covertness, "plot_cop.svg", false),
                    (Metric::Success, "plot_suc.svg", false),
                ] {
                    let path = common.out.join(name);
                    emit_plot(&result, &PlotOptions::new(metric).log_scale(log_y), &path)?;
                    println!("{}", path.display());
                }
            }
        }
        Command::Validate { common } => {
            let system = common.system()?;
            let reports = run_all(system.mc.workers)?;
            for r in &reports {
                println!("{r}");
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            println!("{} of {} criteria passed", reports.len() - failed, reports.len());
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
