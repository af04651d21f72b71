use std::f64::consts::PI;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use catstate::fock::{normal_moment, DensityMatrix};
use catstate::homodyne::QuadratureSamples;
use catstate::metrics::{alpha_coherence, mandel_q, photon_distribution, squeezing, wigner, CoherenceConfig, GridSpec, WignerHeader};
use serde::Serialize;

use crate::config::{RunConfig, SampleFormat};
use crate::error::{CliError, Result};
use crate::registry::{RunContext, ScenarioRegistry};

mod budget;
mod deconvolve;
mod metrics;
mod pipeline;
mod prepare;
mod sample;
mod spectrum;
mod tomo;

pub fn register_all(r: &mut ScenarioRegistry) {
    r.register(Box::new(spectrum::Spectrum));
    r.register(Box::new(prepare::Prepare));
    r.register(Box::new(sample::Sample));
    r.register(Box::new(deconvolve::Deconvolve));
    r.register(Box::new(tomo::Tomo));
    r.register(Box::new(metrics::Metrics));
    r.register(Box::new(budget::Budget));
    r.register(Box::new(pipeline::Pipeline));
}

/// Summary of a photon state; angles in units of π.
#[derive(Debug, Serialize)]
pub(crate) struct StateMetrics {
    pub mean_photon_number: f64,
    pub purity: f64,
    pub mandel_q: Option<f64>,
    pub squeezing_direction: f64,
    pub squeezing_2: f64,
    pub squeezing_4: f64,
    pub alpha_coherence: f64,
    pub coherence_residual: f64,
    pub photon_distribution: Vec<f64>,
}

pub(crate) fn state_metrics(rho: &DensityMatrix, config: &RunConfig) -> Result<StateMetrics> {
    let direction = config.metrics.squeezing_direction * PI;
    let coherence = alpha_coherence(rho, &CoherenceConfig::default())?;
    Ok(StateMetrics {
        mean_photon_number: normal_moment(rho, 1, 1).re,
        purity: rho.purity(),
        mandel_q: mandel_q(rho),
        squeezing_direction: config.metrics.squeezing_direction,
        squeezing_2: squeezing(rho, 2, direction)?.value,
        squeezing_4: squeezing(rho, 4, direction)?.value,
        alpha_coherence: coherence.value,
        coherence_residual: coherence.residual,
        photon_distribution: photon_distribution(rho),
    })
}

pub(crate) fn write_wigner(ctx: &mut RunContext, name: &str, rho: &DensityMatrix, grid: &GridSpec) -> Result<WignerHeader> {
    let w = wigner(rho, grid)?;
    ctx.write_with(name, |out| w.write_csv(out))?;
    Ok(w.header())
}

pub(crate) fn sample_file_name(stem: &str, format: SampleFormat) -> String {
    format!("{stem}.{}", format.extension())
}

pub(crate) fn write_samples(ctx: &mut RunContext, name: &str, samples: &QuadratureSamples, format: SampleFormat) -> Result<()> {
    ctx.write_with(name, |w| match format {
        SampleFormat::Binary => samples.write_binary(w),
        SampleFormat::Csv => samples.write_csv(w),
    })
}

/// Reads a sample file, CSV when the extension says so, binary otherwise.
pub(crate) fn read_samples(path: &Path) -> Result<QuadratureSamples> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let reader = BufReader::new(file);
    let samples = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        QuadratureSamples::read_csv(reader)?
    } else {
        QuadratureSamples::read_binary(reader)?
    };
    Ok(samples)
}

/// Seed for the vacuum noise reference, kept apart from the signal stream.
pub(crate) fn noise_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}
