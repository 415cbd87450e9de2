// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! `hybridsim` — command-line front end for the hybrid-system engine.
//!
//! ```text
//! hybridsim <scenario> [--config <path>] [--set key=value ...]
//!           [--out <path>] [--format csv|gnuplot] [--seed N] [--jobs N]
//! ```
//!
//! The scenario may come from the positional argument, the config file, or
//! both (the positional wins). Flags override config-file fields. Results
//! go to `--out` (or the config's output path, or stdout) with provenance
//! comments; diagnostics go to stderr.
//!
//! Exit codes: 0 success; 2 config error (also clap's own usage-error
//! code); 3 numeric-tolerance failure; 4 singular-geometry truncation.
//! Flagged tolerance/truncation runs still write their full table before
//! exiting nonzero.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use hybridsim_cli::config::{
    self, ConfigError, OutputFormat, ScenarioConfig, ScenarioKind,
};
use hybridsim_cli::scenarios::{run, RunError, RunStatus};
use hybridsim_core::CoreError;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScenarioArg {
    #[value(name = "bz_map")]
    BzMap,
    #[value(name = "adiabaticity_map")]
    AdiabaticityMap,
    #[value(name = "population_sweep")]
    PopulationSweep,
    #[value(name = "equivalence_check")]
    EquivalenceCheck,
    #[value(name = "eigen_report")]
    EigenReport,
}

impl From<ScenarioArg> for ScenarioKind {
    fn from(arg: ScenarioArg) -> Self {
        match arg {
            ScenarioArg::BzMap => Self::BzMap,
            ScenarioArg::AdiabaticityMap => Self::AdiabaticityMap,
            ScenarioArg::PopulationSweep => Self::PopulationSweep,
            ScenarioArg::EquivalenceCheck => Self::EquivalenceCheck,
            ScenarioArg::EigenReport => Self::EigenReport,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Gnuplot,
}

impl From<FormatArg> for OutputFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Csv => Self::Csv,
            FormatArg::Gnuplot => Self::Gnuplot,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hybridsim", version, about = "Dissipative hybrid-system scenario runner")]
struct Cli {
    /// Scenario to run (overrides the config file's `scenario` field).
    scenario: Option<ScenarioArg>,

    /// JSON config file; omitted fields take documented defaults.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one config field by dotted path (repeatable), e.g.
    /// `--set params.gamma=2.5` or `--set sweep.0.count=10`.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    set: Vec<String>,

    /// Output file (default: config's output path, else stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum, value_name = "FORMAT")]
    format: Option<FormatArg>,

    /// RNG seed for randomized scenarios.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Parallel workers (0 = all cores).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(real_main(&cli));
}

fn real_main(cli: &Cli) -> i32 {
    let config = match build_config(cli) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("hybridsim: {e}");
            return 2;
        }
    };
    match run(&config) {
        Ok(outcome) => {
            let rendered = match config.output.format {
                OutputFormat::Csv => outcome.table.to_csv(),
                OutputFormat::Gnuplot => outcome.table.to_gnuplot(),
            };
            if let Err(e) = write_output(config.output.path.as_deref(), &rendered) {
                eprintln!("hybridsim: cannot write output: {e}");
                return 2;
            }
            match &outcome.status {
                RunStatus::Clean => 0,
                RunStatus::ToleranceExceeded(msg) => {
                    eprintln!("hybridsim: tolerance exceeded: {msg}");
                    3
                }
                RunStatus::Truncated(msg) => {
                    eprintln!("hybridsim: sweep truncated: {msg}");
                    4
                }
            }
        }
        Err(RunError::Config(msg)) => {
            eprintln!("hybridsim: invalid config: {msg}");
            2
        }
        Err(RunError::Engine(err)) => {
            eprintln!("hybridsim: {err}");
            engine_exit_code(&err)
        }
    }
}

/// Engine errors fall into the documented exit classes: geometry
/// singularities are truncations (4); bad parameter regimes are config
/// errors (2); everything else is a numeric failure (3).
fn engine_exit_code(err: &CoreError) -> i32 {
    match err {
        CoreError::SingularGeometry { .. } => 4,
        CoreError::Overdamped { .. } | CoreError::InvalidArgument { .. } => 2,
        _ => 3,
    }
}

fn build_config(cli: &Cli) -> Result<ScenarioConfig, ConfigError> {
    let mut config = match (&cli.config, cli.scenario) {
        (Some(path), _) => config::load_config(path, &cli.set)?,
        (None, Some(arg)) => config::config_for_scenario(arg.into(), &cli.set)?,
        (None, None) => {
            return Err(ConfigError::Invalid(
                "provide a scenario name or --config <path> (see --help)".into(),
            ))
        }
    };
    if let Some(arg) = cli.scenario {
        config.scenario = arg.into();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        config.jobs = jobs;
    }
    if let Some(out) = &cli.out {
        config.output.path = Some(out.clone());
    }
    if let Some(format) = cli.format {
        config.output.format = format.into();
    }
    Ok(config)
}

fn write_output(path: Option<&std::path::Path>, rendered: &str) -> std::io::Result<()> {
    match path {
        Some(path) => std::fs::write(path, rendered),
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(rendered.as_bytes())
        }
    }
}
