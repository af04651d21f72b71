use catstate::homodyne::{deconvolve_samples, raw_moments};
use serde_json::{json, Value};

use super::read_samples;
use crate::error::Result;
use crate::registry::{RunContext, Scenario};

pub struct Deconvolve;

impl Scenario for Deconvolve {
    fn name(&self) -> &'static str {
        "deconvolve"
    }

    fn description(&self) -> &'static str {
        "signal moments from a sample file and its noise reference"
    }

    fn run(&self, ctx: &mut RunContext) -> Result<Value> {
        let inputs = ctx.config.inputs.clone();
        let order = ctx.config.sampling.order;
        let signal = read_samples(inputs.require("signal", &inputs.signal)?)?;
        let noise = read_samples(inputs.require("noise", &inputs.noise)?)?;
        let signal_raw = raw_moments(&signal, order)?;
        let noise_raw = raw_moments(&noise, order)?;
        let moments = deconvolve_samples(&signal, &noise, order)?;
        ctx.write_json("raw_moments.json", &signal_raw.to_record())?;
        ctx.write_json("noise_moments.json", &noise_raw.to_record())?;
        ctx.write_json("moments.json", &moments.to_record())?;
        let n = moments.get(1, 1)?;
        let summary = json!({
            "order": order,
            "signal_count": signal.len(),
            "noise_count": noise.len(),
            "mean_photon_number": n.value.re,
            "mean_photon_number_stderr": n.stderr,
            "moments": "moments.json",
        });
        ctx.write_json("deconvolve.json", &summary)?;
        Ok(summary)
    }
}
