use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gup_mechanics::constants::{ConstantsReport, UnitSystem, CODATA_2018};
use gup_mechanics::scenario::{self, parse_config_with, RunReport, ScenarioConfig, Suite};
use gup_mechanics::Error;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Classical mechanics with a minimal-length deformed algebra.
#[derive(Parser)]
#[command(name = "gup", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured model and write its trajectory as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Map an event table through the configured boost.
    Transform {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        events: PathBuf,
    },
    /// Print gamma, u/c and the light-speed deviation for a mass (SI units).
    Constants {
        /// Mass in kg; defaults to the electron mass.
        #[arg(long)]
        mass: Option<f64>,
    },
    /// Run the seeded invariant suites.
    Check {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Multiplies every tolerance; 0 forces failures (harness self-test).
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
}

fn units_override() -> Result<Option<UnitSystem>, Error> {
    match std::env::var("GUP_UNITS") {
        Ok(raw) => raw.parse().map(Some).map_err(|message| Error::Validation {
            key: "GUP_UNITS".into(),
            message,
        }),
        Err(_) => Ok(None),
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, Error> {
    let text = fs::read_to_string(path)?;
    parse_config_with(&text, units_override()?)
}

/// Writes `body` to `path`, or to stdout when no path is configured.
fn emit(path: Option<&Path>, body: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, body)?,
        None => io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn emit_report(
    config: &ScenarioConfig,
    report: &RunReport,
    data_to_stdout: bool,
) -> Result<(), Error> {
    let json = report.to_json() + "\n";
    match &config.output.report {
        Some(p) => fs::write(p, json)?,
        None if data_to_stdout => io::stderr().write_all(json.as_bytes())?,
        None => io::stdout().write_all(json.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Simulate { config } => {
            let config = load(&config)?;
            let run = scenario::run_simulate(&config)?;
            let target = config.output.trajectory.as_deref();
            emit(target, &run.csv)?;
            emit_report(&config, &run.report, target.is_none())?;
            Ok(0)
        }
        Command::Transform { config, events } => {
            let config = load(&config)?;
            let input = fs::File::open(&events)?;
            let run = scenario::run_transform(&config, input)?;
            let target = config.output.events.as_deref();
            emit(target, &run.csv)?;
            emit_report(&config, &run.report, target.is_none())?;
            Ok(0)
        }
        Command::Constants { mass } => {
            let mass = mass.unwrap_or(CODATA_2018.electron_mass);
            let report = ConstantsReport::for_mass(mass, &CODATA_2018)?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{json}");
            Ok(0)
        }
        Command::Check {
            suite,
            seed,
            tolerance_scale,
        } => {
            let report = scenario::run_check(suite, seed, tolerance_scale);
            for c in &report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                eprintln!("{status} {}/{}: {:e}", c.suite, c.name, c.measured);
            }
            println!("{}", report.to_json());
            Ok(if report.passed() {
                0
            } else {
                EXIT_CHECK_FAILED
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_NUMERIC
            })
        }
    }
}
