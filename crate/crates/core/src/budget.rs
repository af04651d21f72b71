//! Error budget: predicted fidelity and the infidelity each source causes
//! on its own, across sweeps of α, θ or ξ.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::{Branch, DeviceParams};
use crate::error::{Error, Result};
use crate::fock::fidelity_pure;
use crate::format::{round_sig, sig};
use crate::protocol::{coherence_suppression, ideal_cat, prepare, ErrorChannels, PrepSpec};

pub const DEFAULT_SWEEP_POINTS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Alpha,
    Theta,
    Xi,
}

impl SweepAxis {
    /// Allowed coordinate range (radians for angles).
    pub fn range(self) -> (f64, f64) {
        match self {
            SweepAxis::Alpha => (0.5, 1.5),
            SweepAxis::Theta => (0.0, PI),
            SweepAxis::Xi => (0.0, PI / 2.0),
        }
    }

    pub fn default_grid(self) -> Vec<f64> {
        let (a, b) = self.range();
        crate::device::linspace(a, b, DEFAULT_SWEEP_POINTS)
    }

    pub fn apply(self, spec: &PrepSpec, value: f64) -> PrepSpec {
        match self {
            SweepAxis::Alpha => PrepSpec { alpha: value, ..*spec },
            SweepAxis::Theta => PrepSpec { theta: value, ..*spec },
            SweepAxis::Xi => PrepSpec { xi: value, ..*spec },
        }
    }

    /// Angles are reported in units of π.
    pub fn display_value(self, value: f64) -> f64 {
        match self {
            SweepAxis::Alpha => value,
            SweepAxis::Theta | SweepAxis::Xi => value / PI,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::Alpha => "alpha",
            SweepAxis::Theta => "theta",
            SweepAxis::Xi => "xi",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(SweepAxis::Alpha),
            "theta" => Ok(SweepAxis::Theta),
            "xi" => Ok(SweepAxis::Xi),
            other => Err(Error::InvalidParameter(format!("unknown sweep axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetRow {
    pub axis: SweepAxis,
    /// Radians for angles.
    pub coordinate: f64,
    pub branch: Branch,
    pub fidelity_total: f64,
    pub infidelity_cavity: f64,
    pub infidelity_qubit: f64,
    pub infidelity_readout: f64,
}

impl BudgetRow {
    pub fn infidelity_total(&self) -> f64 {
        1.0 - self.fidelity_total
    }
}

fn infidelity(params: &DeviceParams, spec: &PrepSpec, channels: ErrorChannels, cutoff: usize) -> Result<f64> {
    let ideal = ideal_cat(spec, cutoff)?;
    let rho = prepare(params, spec, channels, cutoff)?.rho;
    Ok((1.0 - fidelity_pure(&rho, &ideal)?).clamp(0.0, 1.0))
}

/// One budget row for `spec` (its branch and coordinates taken as given).
pub fn budget_point(
    params: &DeviceParams,
    spec: &PrepSpec,
    axis: SweepAxis,
    coordinate: f64,
    cutoff: usize,
) -> Result<BudgetRow> {
    Ok(BudgetRow {
        axis,
        coordinate,
        branch: spec.branch,
        fidelity_total: 1.0 - infidelity(params, spec, ErrorChannels::ALL, cutoff)?,
        infidelity_cavity: infidelity(params, spec, ErrorChannels::CAVITY, cutoff)?,
        infidelity_qubit: infidelity(params, spec, ErrorChannels::QUBIT, cutoff)?,
        infidelity_readout: infidelity(params, spec, ErrorChannels::READOUT, cutoff)?,
    })
}

/// Rows for both branches over `grid`, ordered by branch then coordinate.
pub fn budget_sweep(
    params: &DeviceParams,
    base: &PrepSpec,
    axis: SweepAxis,
    grid: &[f64],
    cutoff: usize,
) -> Result<Vec<BudgetRow>> {
    params.validate()?;
    let (lo, hi) = axis.range();
    if let Some(bad) = grid.iter().find(|&&v| !(lo - 1e-12..=hi + 1e-12).contains(&v)) {
        return Err(Error::InvalidParameter(format!(
            "{} = {bad} outside [{lo}, {hi}]",
            axis.label()
        )));
    }
    let jobs: Vec<(Branch, f64)> = Branch::BOTH
        .iter()
        .flat_map(|&b| grid.iter().map(move |&v| (b, v)))
        .collect();
    jobs.par_iter()
        .map(|&(b, v)| {
            let spec = axis.apply(base, v).with_branch(b);
            budget_point(params, &spec, axis, v, cutoff)
        })
        .collect()
}

pub const CSV_HEADER: &str =
    "axis,coordinate,branch,fidelity_total,infidelity_cavity,infidelity_qubit,infidelity_readout";

/// CSV with angles in units of π.
pub fn write_csv<W: Write>(rows: &[BudgetRow], mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.axis.label(),
            sig(r.axis.display_value(r.coordinate)),
            r.branch,
            sig(r.fidelity_total),
            sig(r.infidelity_cavity),
            sig(r.infidelity_qubit),
            sig(r.infidelity_readout)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnRange {
    pub min: f64,
    pub max: f64,
}

/// Min and max of each numeric column, keyed by column name.
pub fn summary(rows: &[BudgetRow]) -> BTreeMap<&'static str, ColumnRange> {
    let columns: [(&'static str, fn(&BudgetRow) -> f64); 4] = [
        ("fidelity_total", |r| r.fidelity_total),
        ("infidelity_cavity", |r| r.infidelity_cavity),
        ("infidelity_qubit", |r| r.infidelity_qubit),
        ("infidelity_readout", |r| r.infidelity_readout),
    ];
    columns
        .iter()
        .map(|(name, get)| {
            let (min, max) = rows.iter().map(get).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
            (
                *name,
                ColumnRange {
                    min: round_sig(min),
                    max: round_sig(max),
                },
            )
        })
        .collect()
}

/// Least-squares fit of `ln(coherence suppression)` against `α²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// `−2κᵢ/κᵣ`.
    pub expected: f64,
    pub relative_error: f64,
}

pub fn coherence_slope(params: &DeviceParams, base: &PrepSpec, alphas: &[f64]) -> Result<SlopeFit> {
    if alphas.len() < 2 {
        return Err(Error::InvalidParameter("slope fit needs at least two points".into()));
    }
    let pts: Vec<(f64, f64)> = alphas
        .iter()
        .map(|&a| {
            let spec = PrepSpec { alpha: a, ..*base };
            Ok((a * a, coherence_suppression(params, &spec, ErrorChannels::CAVITY)?.ln()))
        })
        .collect::<Result<_>>()?;
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Degenerate(sxx));
    }
    let slope = sxy / sxx;
    let expected = -2.0 * params.kappa_i / params.kappa_r;
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
        expected,
        relative_error: ((slope - expected) / expected).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal_device() -> DeviceParams {
        DeviceParams::reference()
            .without_cavity_loss()
            .without_qubit_decay()
            .without_readout_error()
    }

    #[test]
    fn no_errors_no_infidelity() {
        let rows = budget_sweep(&ideal_device(), &PrepSpec::default(), SweepAxis::Xi, &SweepAxis::Xi.default_grid(), 11)
            .unwrap();
        assert_eq!(rows.len(), 42);
        for r in rows {
            assert!((r.fidelity_total - 1.0).abs() < 1e-9);
            assert!(r.infidelity_cavity < 1e-9 && r.infidelity_qubit < 1e-9 && r.infidelity_readout < 1e-9);
        }
    }

    #[test]
    fn rows_are_ordered() {
        let grid = [0.5, 1.0, 1.5];
        let rows = budget_sweep(&DeviceParams::reference(), &PrepSpec::default(), SweepAxis::Alpha, &grid, 11).unwrap();
        let keys: Vec<(Branch, f64)> = rows.iter().map(|r| (r.branch, r.coordinate)).collect();
        assert_eq!(
            keys,
            vec![
                (Branch::Zero, 0.5),
                (Branch::Zero, 1.0),
                (Branch::Zero, 1.5),
                (Branch::One, 0.5),
                (Branch::One, 1.0),
                (Branch::One, 1.5)
            ]
        );
    }

    #[test]
    fn out_of_range_grid_rejected() {
        let r = budget_sweep(&DeviceParams::reference(), &PrepSpec::default(), SweepAxis::Alpha, &[2.0], 11);
        assert!(r.is_err());
    }

    #[test]
    fn reference_point_values() {
        let p = DeviceParams::reference();
        let even = budget_point(&p, &PrepSpec::even_cat(1.07), SweepAxis::Alpha, 1.07, 11).unwrap();
        assert!((even.infidelity_total() - 0.1352).abs() < 1e-3, "{even:?}");
        assert!((even.infidelity_cavity - 0.0841).abs() < 1e-3);
        assert!((even.infidelity_qubit - 0.0392).abs() < 1e-3);
        assert!((even.infidelity_readout - 0.0246).abs() < 1e-3);
    }

    #[test]
    fn slope_matches_loss_ratio() {
        let fit = coherence_slope(&DeviceParams::reference(), &PrepSpec::default(), &crate::device::linspace(0.5, 1.5, 21))
            .unwrap();
        assert!(fit.relative_error < 1e-6, "{fit:?}");
    }

    #[test]
    fn csv_layout() {
        let rows = budget_sweep(&DeviceParams::reference(), &PrepSpec::default(), SweepAxis::Theta, &[0.0, PI], 11).unwrap();
        let mut out = Vec::new();
        write_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("theta,1,0,"));
        let s = summary(&rows);
        assert!(s["fidelity_total"].min <= s["fidelity_total"].max);
    }
}
