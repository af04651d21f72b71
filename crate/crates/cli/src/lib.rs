//! Scenario runner for the `catstate` simulator.

pub mod config;
pub mod error;
pub mod registry;
pub mod scenarios;

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use registry::{RunContext, Scenario, ScenarioRegistry};

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    scenario: &'a str,
    seed: u64,
    started_unix: u64,
    wall_time_s: f64,
    artifacts: &'a [String],
    config: &'a RunConfig,
}

/// Runs one scenario and writes its manifest. On failure every file the
/// run produced is removed before the error is returned.
pub fn run(registry: &ScenarioRegistry, config: RunConfig) -> Result<Value> {
    let name = config
        .scenario
        .clone()
        .ok_or_else(|| CliError::Config("no scenario given".into()))?;
    let scenario = registry.lookup(&name)?;
    config.validate()?;

    let started_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let mut ctx = RunContext::new(config)?;
    let outcome = scenario.run(&mut ctx).and_then(|summary| {
        let artifacts = ctx.artifacts().to_vec();
        let config = ctx.config.clone();
        let manifest = Manifest {
            tool: "catstate",
            version: env!("CARGO_PKG_VERSION"),
            scenario: &name,
            seed: ctx.config.sampling.seed,
            started_unix,
            wall_time_s: clock.elapsed().as_secs_f64(),
            artifacts: &artifacts,
            config: &config,
        };
        ctx.write_json("manifest.json", &manifest)?;
        Ok(summary)
    });
    if outcome.is_err() {
        ctx.discard();
    }
    outcome
}
