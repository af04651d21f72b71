use std::path::PathBuf;
use std::process::ExitCode;

use catstate_cli::{registry::json_text, run, RunConfig, ScenarioRegistry};
use clap::Parser;

#[derive(Debug, Parser)]
#[command(name = "catstate", version)]
#[command(about = "Simulate flying cat-state preparation, homodyne tomography and error budgets")]
#[command(after_help = "All angles in config files are in units of pi (theta = 0.5 means pi/2).\n\
Device values use MHz for rates, GHz for frequencies and microseconds for lifetimes.\n\
Exit codes: 0 success, 2 configuration error, 3 numerical failure.")]
struct Cli {
    /// TOML run configuration. Reference device defaults apply to anything left out.
    #[arg(long)]
    config: Option<PathBuf>,

    /// spectrum, prepare, sample, deconvolve, tomo, metrics, budget or pipeline.
    #[arg(long)]
    scenario: Option<String>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Number of detected samples; 0 makes `pipeline` use exact moments.
    #[arg(long)]
    count: Option<usize>,

    /// Fock-space truncation.
    #[arg(long)]
    cutoff: Option<usize>,

    /// List the registered scenarios and exit.
    #[arg(long)]
    list: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let registry = ScenarioRegistry::with_defaults();
    if cli.list {
        for s in registry.iter() {
            println!("{:<11} {}", s.name(), s.description());
        }
        return ExitCode::SUCCESS;
    }

    let mut scenario = cli.scenario.clone();
    let result = load(&cli).and_then(|config| {
        scenario = config.scenario.clone();
        run(&registry, config)
    });
    match result {
        Ok(summary) => {
            if let Ok(text) = json_text(&summary) {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report = e.report(scenario.as_deref());
            match serde_json::to_string(&serde_json::json!({ "error": report })) {
                Ok(text) => eprintln!("{text}"),
                Err(_) => eprintln!("{e}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn load(cli: &Cli) -> catstate_cli::Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &cli.scenario {
        config.scenario = Some(s.clone());
    }
    if let Some(o) = &cli.out {
        config.out = o.clone();
    }
    if let Some(s) = cli.seed {
        config.sampling.seed = s;
    }
    if let Some(c) = cli.count {
        config.sampling.count = c;
    }
    if let Some(c) = cli.cutoff {
        config.cutoff = c;
    }
    Ok(config)
}
