//! Command-line runner for bundled and user scenarios.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dicke_trap::scenario::{self, Engine, ScenarioConfig};
use dicke_trap::Error;

/// Overrides the default output directory of `run`.
const OUT_DIR_ENV: &str = "DICKE_TRAP_OUT";

#[derive(Parser)]
#[command(name = "dicke-trap", version, about = "Radiation trapping of N atoms in a lossy cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a bundled scenario name) and write its tables.
    Run {
        config: String,
        /// Output directory [default: $DICKE_TRAP_OUT, else ./out].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the configured engine.
        #[arg(long, value_parser = ["analytic", "ode", "both"])]
        engine: Option<String>,
        /// Also write operator fixtures for N = 2 and 3 into the output directory.
        #[arg(long)]
        seed_fixtures: bool,
    },
    /// Check a scenario file and print every problem found.
    Validate { config: PathBuf },
    /// List bundled scenarios.
    List,
}

fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::Config(_) | Error::InvalidArgument(_) => 2,
        Error::Io { .. } => 4,
        _ => 3,
    }
}

fn load(config: &str) -> Result<ScenarioConfig, Error> {
    let path = Path::new(config);
    if !path.exists() {
        if let Some(text) = scenario::bundled_source(config) {
            return ScenarioConfig::from_json_str(text);
        }
    }
    ScenarioConfig::from_path(path)
}

fn run(config: &str, out: Option<PathBuf>, engine: Option<String>, seed_fixtures: bool) -> Result<(), Error> {
    let mut cfg = load(config)?;
    if let Some(e) = engine {
        cfg.engine = e.parse::<Engine>()?;
        cfg.validate()?;
    }
    let dir = out
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let output = scenario::run_scenario(&cfg)?;
    for path in output.write_to(&dir)? {
        println!("{}", path.display());
    }
    if seed_fixtures {
        for n in [2, 3] {
            let path = dir.join(format!("operators_n{n}.json"));
            std::fs::write(&path, scenario::operator_fixtures(n)?).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            engine,
            seed_fixtures,
        } => run(&config, out, engine, seed_fixtures),
        Command::Validate { config } => match scenario::validate(&config) {
            Ok(issues) if issues.is_empty() => {
                println!("{}: ok", config.display());
                Ok(())
            }
            Ok(issues) => {
                for i in &issues {
                    eprintln!("{}: {i}", config.display());
                }
                return ExitCode::from(2);
            }
            Err(e) => Err(e),
        },
        Command::List => {
            for name in scenario::list_scenarios() {
                let desc = ScenarioConfig::bundled(name)
                    .and_then(|c| c.description)
                    .unwrap_or_default();
                println!("{name}\t{desc}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
