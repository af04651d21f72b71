use catstate::fock::fidelity;
use catstate::homodyne::MomentTable;
use catstate::tomography::{reconstruct, ReconstructionConfig};
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::registry::{read_state, RunContext, Scenario};

pub struct Tomo;

pub(crate) fn reconstruction_config(ctx: &RunContext) -> ReconstructionConfig {
    ReconstructionConfig {
        cutoff: ctx.config.cutoff,
        max_order: ctx.config.sampling.order,
        max_iterations: ctx.config.tomo.max_iterations,
        gradient_tolerance: ctx.config.tomo.gradient_tolerance,
        ..ReconstructionConfig::default()
    }
}

impl Scenario for Tomo {
    fn name(&self) -> &'static str {
        "tomo"
    }

    fn description(&self) -> &'static str {
        "maximum-likelihood density matrix from a signal moment table"
    }

    fn run(&self, ctx: &mut RunContext) -> Result<Value> {
        let inputs = ctx.config.inputs.clone();
        let path = inputs.require("moments", &inputs.moments)?;
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let moments = MomentTable::from_json(&text)?;
        let r = reconstruct(&moments, &reconstruction_config(ctx))?;
        ctx.write_state("reconstructed.json", &r.rho)?;
        let truth_fidelity = match &inputs.truth {
            Some(p) => Some(fidelity(&r.rho, &read_state(p)?)?),
            None => None,
        };
        let summary = json!({
            "state": "reconstructed.json",
            "fidelity_to_truth": truth_fidelity,
            "purity": r.rho.purity(),
            "diagnostics": r.diagnostics,
        });
        ctx.write_json("tomo.json", &summary)?;
        Ok(summary)
    }
}
