use std::io::Write;

use catstate::device::{conditional_phase, linspace, mhz_to_angular, reflection_spectrum};
use catstate::format::sig;
use serde_json::{json, Value};

use crate::error::Result;
use crate::registry::{RunContext, Scenario};

pub struct Spectrum;

impl Scenario for Spectrum {
    fn name(&self) -> &'static str {
        "spectrum"
    }

    fn description(&self) -> &'static str {
        "reflection magnitude and phase for both qubit states over a detuning grid"
    }

    fn run(&self, ctx: &mut RunContext) -> Result<Value> {
        let params = ctx.config.params()?;
        let s = &ctx.config.spectrum;
        let deltas = linspace(s.delta_min_mhz, s.delta_max_mhz, s.points);
        let rows = reflection_spectrum(&params, &deltas);
        ctx.write_with("spectrum.csv", |w| {
            writeln!(w, "delta_mhz,magnitude_0,phase_0,magnitude_1,phase_1,phase_difference")?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    sig(r.delta_mhz),
                    sig(r.magnitude_0),
                    sig(r.phase_0),
                    sig(r.magnitude_1),
                    sig(r.phase_1),
                    sig(r.phase_difference)
                )?;
            }
            Ok(())
        })?;
        let drive = ctx.config.state.delta_mhz;
        let summary = json!({
            "points": rows.len(),
            "phase_difference_at_resonance": conditional_phase(&params, 0.0),
            "drive_detuning_mhz": drive,
            "phase_difference_at_drive": conditional_phase(&params, mhz_to_angular(drive)),
            "phase_matching_residual": catstate::device::phase_matching_residual(&params),
            "table": "spectrum.csv",
        });
        ctx.write_json("spectrum.json", &summary)?;
        Ok(summary)
    }
}
