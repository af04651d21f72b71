use catstate::metrics::GridSpec;
use catstate::protocol::{prepare, ErrorChannels};
use serde_json::{json, Value};

use super::{state_metrics, write_wigner};
use crate::error::Result;
use crate::registry::{read_state, RunContext, Scenario};

pub struct Metrics;

impl Scenario for Metrics {
    fn name(&self) -> &'static str {
        "metrics"
    }

    fn description(&self) -> &'static str {
        "Wigner grid, Mandel Q, squeezing and alpha-coherence of a state"
    }

    fn run(&self, ctx: &mut RunContext) -> Result<Value> {
        let (rho, source) = match ctx.config.inputs.state.clone() {
            Some(p) => (read_state(&p)?, p.display().to_string()),
            None => {
                let params = ctx.config.params()?;
                let spec = ctx.config.spec()?;
                let rho = prepare(&params, &spec, ErrorChannels::ALL, ctx.config.cutoff)?.rho;
                (rho, "predicted".to_string())
            }
        };
        let metrics = state_metrics(&rho, &ctx.config)?;
        let grid = GridSpec::covering(&rho, ctx.config.metrics.wigner_points);
        let header = write_wigner(ctx, "wigner.csv", &rho, &grid)?;
        let summary = json!({
            "source": source,
            "metrics": metrics,
            "wigner": {"file": "wigner.csv", "header": header},
        });
        ctx.write_json("metrics.json", &summary)?;
        Ok(summary)
    }
}
