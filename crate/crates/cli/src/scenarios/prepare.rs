use catstate::fock::{fidelity_pure, DensityMatrix};
use catstate::protocol::{decoherence, ideal_cat, prepare, qubit_phase, ErrorChannels};
use serde_json::{json, Value};

use crate::error::Result;
use crate::registry::{RunContext, Scenario};

pub struct Prepare;

impl Scenario for Prepare {
    fn name(&self) -> &'static str {
        "prepare"
    }

    fn description(&self) -> &'static str {
        "ideal, lossy, lifetime-limited and readout-mixed state matrices"
    }

    fn run(&self, ctx: &mut RunContext) -> Result<Value> {
        let params = ctx.config.params()?;
        let spec = ctx.config.spec()?;
        let cutoff = ctx.config.cutoff;
        let ideal = ideal_cat(&spec, cutoff)?;
        let mut states = serde_json::Map::new();

        let ideal_rho = DensityMatrix::pure(&ideal)?;
        ctx.write_state("ideal.json", &ideal_rho)?;
        states.insert("ideal".into(), json!({"file": "ideal.json", "fidelity": 1.0, "purity": ideal_rho.purity()}));

        let mut probabilities = None;
        for (name, channels) in [
            ("lossy", ErrorChannels::CAVITY),
            ("lifetime", ErrorChannels::LIFETIME),
            ("readout", ErrorChannels::ALL),
        ] {
            let prepared = prepare(&params, &spec, channels, cutoff)?;
            let file = format!("{name}.json");
            ctx.write_state(&file, &prepared.rho)?;
            states.insert(
                name.into(),
                json!({
                    "file": file,
                    "fidelity": fidelity_pure(&prepared.rho, &ideal)?,
                    "purity": prepared.rho.purity(),
                }),
            );
            probabilities = Some(prepared.probabilities);
        }

        let d = decoherence(&params, &spec, ErrorChannels::ALL)?;
        let summary = json!({
            "branch": spec.branch,
            "branch_probabilities": probabilities,
            "decoherence_factor": [d.value.re, d.value.im],
            "azimuthal_shift": catstate::device::in_pi_units(d.azimuthal_shift),
            "qubit_phase": catstate::device::in_pi_units(qubit_phase(&params, &spec, ErrorChannels::ALL)?),
            "states": states,
        });
        ctx.write_json("prepare.json", &summary)?;
        Ok(summary)
    }
}
