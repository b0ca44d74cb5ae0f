use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nsch_core::eigen::{sign_grid, sign_grid_preset, SIGN_GRID_PRESETS};
use nsch_core::scenario::{self, RunReport, ScenarioConfig, ScenarioKind};
use nsch_core::{ConfigError, Error};

#[derive(Parser)]
#[command(name = "nsch-relax", version, about = "Relaxed NSCH scenario runner")]
struct Cli {
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add the omega column to every snapshot.
        #[arg(long)]
        dump_omega: bool,
    },
    /// Run one scenario per value of a parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// alpha, delta, beta, gamma, nu, n, cfl, velocity or end_time.
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dump_omega: bool,
    },
    /// Write the characteristic sign grid of a preset as CSV.
    Eigen {
        #[arg(long)]
        preset: String,
        /// Directory for `sign_grid_<preset>.csv`; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the default config of a scenario.
    Preset { scenario: String },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.cmd, cli.quiet) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn load(config: &PathBuf, out: Option<PathBuf>, dump_omega: bool) -> Result<ScenarioConfig, Error> {
    let mut cfg = ScenarioConfig::load(config)?;
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    cfg.dump_omega |= dump_omega;
    Ok(cfg)
}

fn report(r: &RunReport, quiet: bool) -> bool {
    match &r.failure {
        Some(e) => {
            eprintln!(
                "{}: solver failure at t = {}: {e} (last good state written to {})",
                r.config.scenario.name(),
                r.t,
                r.config.output_dir.display()
            );
            false
        }
        None => {
            if !quiet {
                let last = r.log.last().expect("log has an initial row");
                println!(
                    "{} [{}] t = {} steps = {} energy = {:e} mass = {:e} wall = {:.2}s -> {}",
                    r.config.scenario.name(),
                    r.config.engine.name(),
                    r.t,
                    r.steps,
                    last.energy,
                    last.mass_c,
                    r.wall_time,
                    r.config.output_dir.display()
                );
            }
            true
        }
    }
}

fn execute(cmd: Cmd, quiet: bool) -> Result<ExitCode, Error> {
    match cmd {
        Cmd::Run { config, out, dump_omega } => {
            let cfg = load(&config, out, dump_omega)?;
            let r = scenario::run(&cfg)?;
            Ok(if report(&r, quiet) { ExitCode::SUCCESS } else { ExitCode::from(EXIT_SOLVER) })
        }
        Cmd::Sweep { config, axis, values, out, dump_omega } => {
            let cfg = load(&config, out, dump_omega)?;
            let mut ok = true;
            for r in scenario::sweep(&cfg, &axis, &values)? {
                ok &= report(&r, quiet);
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_SOLVER) })
        }
        Cmd::Eigen { preset, out } => {
            let spec = sign_grid_preset(&preset).ok_or_else(|| {
                ConfigError::new("preset", format!("unknown preset `{preset}`, expected one of {}", SIGN_GRID_PRESETS.join(", ")))
            })?;
            let grid = sign_grid(&spec)?;
            match out {
                Some(dir) => {
                    let path = dir.join(format!("sign_grid_{preset}.csv"));
                    let mut body = Vec::new();
                    grid.write_csv(&mut body).expect("writing to memory");
                    nsch_core::io::write_text_file(&path, std::str::from_utf8(&body).expect("csv is utf-8"))?;
                    if !quiet {
                        println!("{}", path.display());
                    }
                }
                None => grid.write_csv(std::io::stdout().lock()).map_err(|source| Error::Io { path: "stdout".into(), source })?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Preset { scenario } => {
            let kind = ScenarioKind::ALL.into_iter().find(|k| k.name() == scenario).ok_or_else(|| {
                let names: Vec<_> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
                ConfigError::new("scenario", format!("unknown scenario `{scenario}`, expected one of {}", names.join(", ")))
            })?;
            print!("{}", ScenarioConfig::preset(kind).to_toml_string());
            Ok(ExitCode::SUCCESS)
        }
    }
}
