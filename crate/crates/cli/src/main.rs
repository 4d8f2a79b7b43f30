//! `causal-tunnel` command-line entry point.
//!
//! Exit codes: 0 success, 1 invariant or check failure, 2 invalid
//! configuration, 3 I/O failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use causal_tunnel::output::{lightcone_csv, write_outcome, VerifyReport};
use causal_tunnel::runner::lightcone_study;
use causal_tunnel::scenarios::catalogue;
use causal_tunnel::{runner, Error, RunConfig, Species};

#[derive(Parser)]
#[command(name = "causal-tunnel", version, about = "Dirac and Klein-Gordon field scattering with causality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate, write snapshot densities, the manifest and (with an
    /// intervention) the light-cone report.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (overrides `outputs.directory`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the identity suite and print a JSON pass/fail report.
    Verify {
        #[command(flatten)]
        source: Source,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Evaluate the identities with the wrong statistics sign (negative control).
        #[arg(long)]
        break_metric: bool,
    },
    /// Paired original/intervened runs at dt and dt/2 with light-cone reports.
    Lightcone {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect the built-in presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List preset names and descriptions.
    List,
    /// Print a preset as a config file.
    Show { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Dirac,
    Kg,
}

#[derive(Args)]
struct Source {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset the config is layered on.
    #[arg(long)]
    preset: Option<String>,
    /// Override the field model.
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
}

impl Source {
    fn load(&self) -> Result<RunConfig, Error> {
        let preset = self.preset.as_deref();
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_path(path, preset)?,
            None => RunConfig::parse("", preset)?,
        };
        if let Some(m) = self.model {
            cfg.model = match m {
                ModelArg::Dirac => Species::Dirac,
                ModelArg::Kg => Species::KleinGordon,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

enum Failure {
    Checks(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidParameter { .. }
        | Error::InvalidLattice(_)
        | Error::NotStepMultiple { .. }
        | Error::Unsupported(_) => 2,
        Error::Io(_) | Error::Json(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { source, out } => {
            let cfg = source.load()?;
            let dir = out.unwrap_or_else(|| cfg.outputs.directory.clone());
            let outcome = runner::run(&cfg)?;
            let manifest = write_outcome(&outcome, &dir)?;
            info!(
                "wrote {} files to {} in {:.1}s",
                manifest.files.len(),
                dir.display(),
                outcome.wall_clock_seconds
            );
            if !manifest.passed {
                return Err(Failure::Checks(outcome.invariants.breaches.join("; ")));
            }
            Ok(())
        }
        Command::Verify {
            source,
            report,
            break_metric,
        } => {
            let mut cfg = source.load()?;
            cfg.verify.break_metric |= break_metric;
            let outcome = runner::verify(&cfg)?;
            let text = serde_json::to_string_pretty(&VerifyReport::new(&outcome)).map_err(Error::from)?;
            match report {
                Some(path) => write_file(&path, &text)?,
                None => println!("{text}"),
            }
            if !outcome.invariants.passed() {
                return Err(Failure::Checks(outcome.invariants.breaches.join("; ")));
            }
            Ok(())
        }
        Command::Lightcone { source, out } => {
            let mut cfg = source.load()?;
            cfg.intervention.enabled = true;
            cfg.validate()?;
            let dir = out.unwrap_or_else(|| cfg.outputs.directory.clone());
            let study = lightcone_study(&cfg)?;
            fs::create_dir_all(&dir)?;
            write_file(&dir.join("lightcone.csv"), &lightcone_csv(&study.base))?;
            write_file(&dir.join("lightcone_half_dt.csv"), &lightcone_csv(&study.halved))?;
            write_file(
                &dir.join("lightcone.json"),
                &serde_json::to_string_pretty(&study).map_err(Error::from)?,
            )?;
            for r in &study.base {
                println!(
                    "t={:<8.4} sup_outside={:.3e} sup_inside={:.3e} ratio={:.3e} {}",
                    r.time,
                    r.sup_outside,
                    r.sup_inside,
                    r.ratio,
                    if r.passed { "ok" } else { "FAIL" }
                );
            }
            println!("max growth of sup_outside under dt/2: {:.3e}", study.max_growth);
            let passed = study.base.iter().chain(&study.halved).all(|r| r.passed) && study.monotone(1e-12);
            if !passed {
                return Err(Failure::Checks("light-cone criterion violated".into()));
            }
            Ok(())
        }
        Command::Presets { action } => {
            match action {
                PresetAction::List => {
                    for s in catalogue() {
                        println!("{:<12} {}", s.name, s.description);
                    }
                }
                PresetAction::Show { name } => {
                    let cfg = causal_tunnel::scenarios::preset(&name)?;
                    print!("{}", cfg.to_toml_string()?);
                }
            }
            Ok(())
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body)?;
    Ok(())
}
