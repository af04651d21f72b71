//! Maximum-likelihood state reconstruction from signal moments.
//!
//! The state is parameterized as `ρ = G G† / Tr(G G†)` with `G` complex
//! lower-triangular, so every iterate is a valid density matrix.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, DEFAULT_CUTOFF};
use crate::homodyne::{moment_indices, MomentKind, MomentTable, DEFAULT_ORDER};
use crate::optim::{minimize, LbfgsSettings};
use crate::C64;

pub use crate::optim::Termination;

/// Where the optimizer starts.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialGuess {
    #[default]
    MaximallyMixed,
    State(DensityMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionConfig {
    pub cutoff: usize,
    pub max_order: usize,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    /// Stop when `|L| changes by less than this fraction over `window` iterations.
    pub relative_tolerance: f64,
    pub window: usize,
    pub stderr_floor: f64,
    pub memory: usize,
    pub initial: InitialGuess,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
            max_order: DEFAULT_ORDER,
            max_iterations: 20_000,
            gradient_tolerance: 1e-8,
            relative_tolerance: 1e-12,
            window: 10,
            stderr_floor: 1e-6,
            memory: 20,
            initial: InitialGuess::MaximallyMixed,
        }
    }
}

impl ReconstructionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cutoff < self.max_order {
            return Err(Error::InvalidParameter(format!(
                "cutoff {} is below the moment order {}",
                self.cutoff, self.max_order
            )));
        }
        if self.max_order == 0 {
            return Err(Error::InvalidParameter("moment order must be positive".into()));
        }
        if !(self.gradient_tolerance > 0.0) || !(self.relative_tolerance > 0.0) || !(self.stderr_floor > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.window == 0 || self.memory == 0 {
            return Err(Error::InvalidParameter("window and memory must be positive".into()));
        }
        if let InitialGuess::State(rho) = &self.initial {
            if rho.cutoff() != self.cutoff {
                return Err(Error::DimensionMismatch(rho.dim(), self.cutoff + 1));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub log_likelihood: f64,
    pub initial_log_likelihood: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub gradient_norm: f64,
    pub termination: Termination,
    pub converged: bool,
    /// Every informative moment has a standard error of at least ten times its value.
    pub low_information: bool,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub rho: DensityMatrix,
    pub diagnostics: Diagnostics,
}

/// Band structure of `(a†)^m aⁿ`: entries `(j, k, c)` with `A[j][k] = c`.
struct MomentTerm {
    measured: C64,
    weight: f64,
    band: Vec<(usize, usize, f64)>,
}

fn band(m: usize, n: usize, cutoff: usize) -> Vec<(usize, usize, f64)> {
    let d = cutoff + 1;
    let fall = |k: usize, p: usize| ((k + 1 - p)..=k).map(|j| j as f64).product::<f64>().sqrt();
    (n..d)
        .filter_map(|k| {
            let j = k - n + m;
            (j < d).then(|| (j, k, fall(k, n) * fall(j, m)))
        })
        .collect()
}

fn terms(moments: &MomentTable, config: &ReconstructionConfig) -> Result<Vec<MomentTerm>> {
    if moments.kind != MomentKind::Signal {
        return Err(Error::InvalidParameter(
            "reconstruction needs signal moments; deconvolve raw moments first".into(),
        ));
    }
    moments.require(config.max_order)?;
    moment_indices(config.max_order)
        .skip(1)
        .map(|(m, n)| {
            let e = moments.get(m, n)?;
            let sd = e.stderr.max(config.stderr_floor);
            Ok(MomentTerm {
                measured: e.value,
                weight: 1.0 / (sd * sd),
                band: band(m, n, config.cutoff),
            })
        })
        .collect()
}

fn band_trace(rho: &DMatrix<C64>, band: &[(usize, usize, f64)]) -> C64 {
    band.iter().map(|&(j, k, c)| rho[(k, j)] * c).sum()
}

/// `−Σ |μ − Tr ρA|²/δ²` over the terms.
fn misfit(rho: &DMatrix<C64>, terms: &[MomentTerm]) -> f64 {
    terms
        .iter()
        .map(|t| t.weight * (t.measured - band_trace(rho, &t.band)).norm_sqr())
        .sum()
}

/// `L = −Σ_{(m,n)≠(0,0)} |μ_{mn} − Tr[ρ (a†)^m aⁿ]|²/δ²_{mn}`, with δ clamped
/// to the configured floor.
pub fn log_likelihood(rho: &DensityMatrix, moments: &MomentTable, config: &ReconstructionConfig) -> Result<f64> {
    config.validate()?;
    if rho.cutoff() != config.cutoff {
        return Err(Error::DimensionMismatch(rho.dim(), config.cutoff + 1));
    }
    Ok(-misfit(rho.matrix(), &terms(moments, config)?))
}

fn lower_indices(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| (0..=i).map(move |j| (i, j))).collect()
}

fn unpack(x: &[f64], idx: &[(usize, usize)], d: usize) -> DMatrix<C64> {
    let k = idx.len();
    let mut g = DMatrix::zeros(d, d);
    for (p, &(i, j)) in idx.iter().enumerate() {
        g[(i, j)] = C64::new(x[p], x[k + p]);
    }
    g
}

fn initial_factor(config: &ReconstructionConfig) -> Result<DMatrix<C64>> {
    let d = config.cutoff + 1;
    match &config.initial {
        InitialGuess::MaximallyMixed => Ok(DMatrix::identity(d, d)),
        InitialGuess::State(rho) => {
            // a small identity admixture keeps the factor full rank
            let m = rho.matrix() + DMatrix::<C64>::identity(d, d) * C64::new(1e-8, 0.0);
            m.cholesky()
                .map(|c| c.unpack())
                .ok_or_else(|| Error::InvalidState("initial guess is not positive definite".into()))
        }
    }
}

/// Maximizes the log-likelihood over physical states.
pub fn reconstruct(moments: &MomentTable, config: &ReconstructionConfig) -> Result<Reconstruction> {
    config.validate()?;
    let terms = terms(moments, config)?;
    let d = config.cutoff + 1;
    let idx = lower_indices(d);
    let k = idx.len();

    let g0 = initial_factor(config)?;
    let mut x0 = vec![0.0; 2 * k];
    for (p, &(i, j)) in idx.iter().enumerate() {
        x0[p] = g0[(i, j)].re;
        x0[k + p] = g0[(i, j)].im;
    }

    let objective = |x: &[f64], grad: &mut [f64]| -> f64 {
        let g = unpack(x, &idx, d);
        let t: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        let rho = (&g * g.adjoint()).unscale(t);
        let mut z = DMatrix::<C64>::zeros(d, d);
        let mut value = 0.0;
        for term in &terms {
            let r = term.measured - band_trace(&rho, &term.band);
            value += term.weight * r.norm_sqr();
            let coef = r.conj() * (2.0 * term.weight);
            for &(j, kk, c) in &term.band {
                z[(j, kk)] += coef * c;
            }
        }
        let h = &z + z.adjoint();
        let c = crate::fock::trace_product(&rho, &h).re;
        let mut shifted = h;
        for i in 0..d {
            shifted[(i, i)] -= c;
        }
        let m = (shifted * &g).unscale(t);
        for (p, &(i, j)) in idx.iter().enumerate() {
            grad[p] = -m[(i, j)].re;
            grad[k + p] = -m[(i, j)].im;
        }
        value
    };

    let settings = LbfgsSettings {
        memory: config.memory,
        max_iterations: config.max_iterations,
        gradient_tolerance: config.gradient_tolerance,
        relative_tolerance: config.relative_tolerance,
        window: config.window,
    };
    let result = minimize(objective, x0, &settings);

    let g = unpack(&result.x, &idx, d);
    let rho = DensityMatrix::from_unnormalized(&g * g.adjoint())?;
    let low_information = moment_indices(config.max_order).skip(1).all(|(m, n)| {
        moments
            .get(m, n)
            .map(|e| e.stderr >= 10.0 * e.value.norm())
            .unwrap_or(true)
    });
    Ok(Reconstruction {
        rho,
        diagnostics: Diagnostics {
            log_likelihood: -result.value,
            initial_log_likelihood: -result.initial_value,
            iterations: result.iterations,
            evaluations: result.evaluations,
            gradient_norm: result.gradient_norm,
            converged: result.termination != Termination::MaxIterations,
            termination: result.termination,
            low_information,
        },
    })
}
