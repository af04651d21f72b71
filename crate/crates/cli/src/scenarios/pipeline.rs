use catstate::fock::{fidelity, fidelity_pure, DensityMatrix};
use catstate::homodyne::{deconvolve_samples, normal_moment_table, sample_measured, SamplerConfig};
use catstate::metrics::GridSpec;
use catstate::protocol::{ideal_cat, prepare, ErrorChannels};
use catstate::tomography::reconstruct;
use serde_json::{json, Value};

use super::tomo::reconstruction_config;
use super::{noise_seed, state_metrics, write_wigner};
use crate::error::Result;
use crate::registry::{RunContext, Scenario};

pub struct Pipeline;

impl Scenario for Pipeline {
    fn name(&self) -> &'static str {
        "pipeline"
    }

    fn description(&self) -> &'static str {
        "prepare, sample, deconvolve, reconstruct and characterize in one run (count 0 uses exact moments)"
    }

    fn run(&self, ctx: &mut RunContext) -> Result<Value> {
        let params = ctx.config.params()?;
        let spec = ctx.config.spec()?;
        let cutoff = ctx.config.cutoff;
        let s = ctx.config.sampling.clone();
        let n_noise = ctx.config.n_noise();

        let ideal = ideal_cat(&spec, cutoff)?;
        let predicted = prepare(&params, &spec, ErrorChannels::ALL, cutoff)?.rho;
        ctx.write_state("predicted.json", &predicted)?;

        let (moments, path) = if s.count == 0 {
            (normal_moment_table(&predicted, s.order), "analytic")
        } else {
            let vacuum = DensityMatrix::vacuum(cutoff);
            let signal = sample_measured(&predicted, n_noise, &SamplerConfig::new(s.count, s.seed))?;
            let noise = sample_measured(&vacuum, n_noise, &SamplerConfig::new(s.count, noise_seed(s.seed)))?;
            let m = deconvolve_samples(&signal, &noise, s.order)?;
            (m, "monte_carlo")
        };
        ctx.write_json("moments.json", &moments.to_record())?;

        let r = reconstruct(&moments, &reconstruction_config(ctx))?;
        ctx.write_state("reconstructed.json", &r.rho)?;

        let grid = GridSpec::covering(&predicted, ctx.config.metrics.wigner_points);
        let w_rec = write_wigner(ctx, "wigner_reconstructed.csv", &r.rho, &grid)?;
        let w_pred = write_wigner(ctx, "wigner_predicted.csv", &predicted, &grid)?;
        let measured = state_metrics(&r.rho, &ctx.config)?;
        let expected = state_metrics(&predicted, &ctx.config)?;

        let state = &ctx.config.state;
        let report = json!({
            "state": {
                "alpha": state.alpha,
                "xi": state.xi,
                "theta": state.theta,
                "branch": spec.branch,
                "delta_mhz": state.delta_mhz,
            },
            "path": path,
            "count": s.count,
            "seed": s.seed,
            "n_noise": n_noise,
            "order": s.order,
            "cutoff": cutoff,
            "fidelity": fidelity(&r.rho, &predicted)?,
            "fidelity_to_ideal": fidelity_pure(&r.rho, &ideal)?,
            "predicted_fidelity_to_ideal": fidelity_pure(&predicted, &ideal)?,
            "mandel_q": measured.mandel_q,
            "squeezing_2": measured.squeezing_2,
            "squeezing_4": measured.squeezing_4,
            "alpha_coherence": measured.alpha_coherence,
            "metrics": measured,
            "predicted_metrics": expected,
            "wigner": {
                "reconstructed": "wigner_reconstructed.csv",
                "predicted": "wigner_predicted.csv",
                "grid": grid,
                "reconstructed_range": [w_rec.min, w_rec.max],
                "predicted_range": [w_pred.min, w_pred.max],
            },
            "states": {"predicted": "predicted.json", "reconstructed": "reconstructed.json"},
            "diagnostics": r.diagnostics,
        });
        ctx.write_json("report.json", &report)?;
        Ok(report)
    }
}
