use catstate::fock::DensityMatrix;
use catstate::homodyne::{sample_measured, SamplerConfig};
use catstate::protocol::{prepare, ErrorChannels};
use serde_json::{json, Value};

use super::{noise_seed, sample_file_name, write_samples};
use crate::error::{CliError, Result};
use crate::registry::{RunContext, Scenario};

pub struct Sample;

impl Scenario for Sample {
    fn name(&self) -> &'static str {
        "sample"
    }

    fn description(&self) -> &'static str {
        "detected amplitudes of the predicted state and of a vacuum noise reference"
    }

    fn run(&self, ctx: &mut RunContext) -> Result<Value> {
        let params = ctx.config.params()?;
        let spec = ctx.config.spec()?;
        let s = ctx.config.sampling.clone();
        if s.count == 0 {
            return Err(CliError::Config("sampling.count must be positive for `sample`".into()));
        }
        let n_noise = ctx.config.n_noise();
        let rho = prepare(&params, &spec, ErrorChannels::ALL, ctx.config.cutoff)?.rho;
        let vacuum = DensityMatrix::vacuum(ctx.config.cutoff);
        let signal = sample_measured(&rho, n_noise, &SamplerConfig::new(s.count, s.seed))?;
        let noise = sample_measured(&vacuum, n_noise, &SamplerConfig::new(s.count, noise_seed(s.seed)))?;
        let signal_file = sample_file_name("signal", s.format);
        let noise_file = sample_file_name("noise", s.format);
        write_samples(ctx, &signal_file, &signal, s.format)?;
        write_samples(ctx, &noise_file, &noise, s.format)?;
        let summary = json!({
            "count": s.count,
            "seed": s.seed,
            "noise_seed": noise_seed(s.seed),
            "n_noise": n_noise,
            "signal": signal_file,
            "noise": noise_file,
        });
        ctx.write_json("sample.json", &summary)?;
        Ok(summary)
    }
}
