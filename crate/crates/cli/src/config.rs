//! Run configuration. Angles are given in units of π throughout, so
//! `xi = 0.5` means ξ = π/2.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use catstate::budget::SweepAxis;
use catstate::device::{linspace, mhz_to_angular, Branch, DeviceParams, DeviceTable};
use catstate::fock::DEFAULT_CUTOFF;
use catstate::homodyne::{DEFAULT_COUNT, DEFAULT_ORDER};
use catstate::protocol::{PhaseCompensation, PrepSpec, DEFAULT_DURATION};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Option<String>,
    pub out: PathBuf,
    pub cutoff: usize,
    pub device: DeviceTable,
    pub state: StateConfig,
    pub spectrum: SpectrumConfig,
    pub sampling: SamplingConfig,
    pub tomo: TomoConfig,
    pub metrics: MetricsConfig,
    pub budget: BudgetConfig,
    pub inputs: Inputs,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            out: PathBuf::from("out"),
            cutoff: DEFAULT_CUTOFF,
            device: DeviceTable::default(),
            state: StateConfig::default(),
            spectrum: SpectrumConfig::default(),
            sampling: SamplingConfig::default(),
            tomo: TomoConfig::default(),
            metrics: MetricsConfig::default(),
            budget: BudgetConfig::default(),
            inputs: Inputs::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateConfig {
    pub alpha: f64,
    /// Units of π.
    pub xi: f64,
    /// Units of π.
    pub theta: f64,
    /// Heralding outcome, 0 or 1.
    pub branch: u8,
    pub delta_mhz: f64,
    pub duration_us: f64,
    /// Fixed offset between target and qubit phase, units of π. Absent means
    /// the offset is computed from the decoherence factor.
    pub compensation: Option<f64>,
}

impl Default for StateConfig {
    fn default() -> Self {
        Self {
            alpha: 1.07,
            xi: 0.5,
            theta: 0.0,
            branch: 0,
            delta_mhz: 0.0,
            duration_us: DEFAULT_DURATION,
            compensation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub delta_min_mhz: f64,
    pub delta_max_mhz: f64,
    pub points: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            delta_min_mhz: -5.0,
            delta_max_mhz: 5.0,
            points: 201,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleFormat {
    Binary,
    Csv,
}

impl SampleFormat {
    pub fn extension(self) -> &'static str {
        match self {
            SampleFormat::Binary => "bin",
            SampleFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub count: usize,
    pub seed: u64,
    /// Defaults to the device value.
    pub n_noise: Option<f64>,
    pub order: usize,
    pub format: SampleFormat,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            count: DEFAULT_COUNT,
            seed: 1,
            n_noise: None,
            order: DEFAULT_ORDER,
            format: SampleFormat::Binary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TomoConfig {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
}

impl Default for TomoConfig {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            gradient_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub wigner_points: usize,
    /// Units of π.
    pub squeezing_direction: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            wigner_points: 101,
            squeezing_direction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetConfig {
    pub axis: SweepAxis,
    pub points: usize,
    /// Sweep bounds; α as is, angles in units of π. Default to the full axis range.
    pub min: Option<f64>,
    pub max: Option<f64>,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            axis: SweepAxis::Xi,
            points: catstate::budget::DEFAULT_SWEEP_POINTS,
            min: None,
            max: None,
        }
    }
}

/// Files consumed by the single-stage scenarios.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub signal: Option<PathBuf>,
    pub noise: Option<PathBuf>,
    pub moments: Option<PathBuf>,
    pub state: Option<PathBuf>,
    /// Reference state for fidelity in `tomo`.
    pub truth: Option<PathBuf>,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let mut config: RunConfig =
            toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.inputs.rebase(base);
        Ok(config)
    }

    pub fn params(&self) -> Result<DeviceParams> {
        let p = self.device.to_params();
        p.validate()?;
        Ok(p)
    }

    pub fn spec(&self) -> Result<PrepSpec> {
        let s = &self.state;
        let branch = match s.branch {
            0 => Branch::Zero,
            1 => Branch::One,
            b => return Err(config_error(format!("state.branch must be 0 or 1, got {b}"))),
        };
        let mut spec = PrepSpec {
            alpha: s.alpha,
            xi: s.xi * PI,
            theta: s.theta * PI,
            branch,
            duration: s.duration_us,
            compensation: match s.compensation {
                Some(v) => PhaseCompensation::Fixed(v * PI),
                None => PhaseCompensation::Formula,
            },
            ..PrepSpec::default()
        };
        if s.delta_mhz != 0.0 {
            spec = spec.with_detuning(&self.params()?, mhz_to_angular(s.delta_mhz));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn n_noise(&self) -> f64 {
        self.sampling.n_noise.unwrap_or(self.device.n_noise)
    }

    /// Sweep grid in internal units.
    pub fn budget_grid(&self) -> Result<Vec<f64>> {
        let b = &self.budget;
        if b.points < 2 {
            return Err(config_error("budget.points must be at least 2"));
        }
        let scale = match b.axis {
            SweepAxis::Alpha => 1.0,
            SweepAxis::Theta | SweepAxis::Xi => PI,
        };
        let (lo, hi) = b.axis.range();
        let lo = b.min.map_or(lo, |v| v * scale);
        let hi = b.max.map_or(hi, |v| v * scale);
        Ok(linspace(lo, hi, b.points))
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.spec()?;
        if self.sampling.order == 0 || self.sampling.order > self.cutoff {
            return Err(config_error(format!(
                "sampling.order must lie in 1..={}, got {}",
                self.cutoff, self.sampling.order
            )));
        }
        if !(self.n_noise() >= 0.0) {
            return Err(config_error("sampling.n_noise must be non-negative"));
        }
        if self.spectrum.points < 2 {
            return Err(config_error("spectrum.points must be at least 2"));
        }
        if self.metrics.wigner_points < 2 {
            return Err(config_error("metrics.wigner_points must be at least 2"));
        }
        for (name, path) in self.inputs.iter() {
            if !path.is_file() {
                return Err(config_error(format!("inputs.{name}: {} does not exist", path.display())));
            }
        }
        Ok(())
    }
}

impl Inputs {
    fn iter(&self) -> impl Iterator<Item = (&'static str, &PathBuf)> {
        [
            ("signal", &self.signal),
            ("noise", &self.noise),
            ("moments", &self.moments),
            ("state", &self.state),
            ("truth", &self.truth),
        ]
        .into_iter()
        .filter_map(|(n, p)| p.as_ref().map(|p| (n, p)))
    }

    /// Relative paths are taken relative to the config file.
    fn rebase(&mut self, base: &Path) {
        for p in [
            &mut self.signal,
            &mut self.noise,
            &mut self.moments,
            &mut self.state,
            &mut self.truth,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn require<'a>(&self, name: &str, path: &'a Option<PathBuf>) -> Result<&'a PathBuf> {
        path.as_ref()
            .ok_or_else(|| config_error(format!("inputs.{name} is required by this scenario")))
    }
}
