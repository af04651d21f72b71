//! State-level observables: Wigner function, photon statistics, higher-order
//! squeezing and α-coherence.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{
    coherent_amplitudes, entropy_bits, hermitian_entropy, normal_moment, DensityMatrix, FockOperator,
};
use crate::format::{round_sig, sig};
use crate::homodyne::MomentTable;
use crate::C64;

/// Rectangular phase-space grid, `x = Re β`, `p = Im β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, points: usize) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            nx: points,
            p_min: -half_width,
            p_max: half_width,
            np: points,
        }
    }

    /// Square grid spanning `±(√⟨n⟩ + 3)`.
    pub fn covering(rho: &DensityMatrix, points: usize) -> Self {
        let n = normal_moment(rho, 1, 1).re.max(0.0);
        Self::square(n.sqrt() + 3.0, points)
    }

    fn axis(min: f64, max: f64, n: usize) -> Vec<f64> {
        crate::device::linspace(min, max, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.np < 2 || !(self.x_max > self.x_min) || !(self.p_max > self.p_min) {
            return Err(Error::InvalidParameter(
                "grid needs at least 2 points and a positive extent per axis".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    /// `values[i][j] = W(x_axis[i], p_axis[j])`.
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WignerHeader {
    pub grid: GridSpec,
    pub integral: f64,
    pub min: f64,
    pub max: f64,
}

impl WignerGrid {
    pub fn dx(&self) -> f64 {
        self.x_axis[1] - self.x_axis[0]
    }

    pub fn dp(&self) -> f64 {
        self.p_axis[1] - self.p_axis[0]
    }

    /// Riemann sum `Σ W Δx Δp`.
    pub fn integral(&self) -> f64 {
        self.values.iter().flatten().sum::<f64>() * self.dx() * self.dp()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn header(&self) -> WignerHeader {
        let grid = GridSpec {
            x_min: self.x_axis[0],
            x_max: *self.x_axis.last().unwrap(),
            nx: self.x_axis.len(),
            p_min: self.p_axis[0],
            p_max: *self.p_axis.last().unwrap(),
            np: self.p_axis.len(),
        };
        WignerHeader {
            grid,
            integral: round_sig(self.integral()),
            min: round_sig(self.min()),
            max: round_sig(self.max()),
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,p,W")?;
        for (i, x) in self.x_axis.iter().enumerate() {
            for (j, p) in self.p_axis.iter().enumerate() {
                writeln!(w, "{},{},{}", sig(*x), sig(*p), sig(self.values[i][j]))?;
            }
        }
        Ok(())
    }
}

/// Generalized Laguerre polynomials `L_k^{(a)}(x)` for `k = 0..=n`.
fn laguerre(n: usize, a: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(1.0 + a - x);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * out[k] - (kf + a) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Matrix elements `⟨m|D(γ)|n⟩` of the untruncated displacement operator.
pub fn displacement_matrix(gamma: C64, cutoff: usize) -> DMatrix<C64> {
    let d = cutoff + 1;
    let x = gamma.norm_sqr();
    let damp = (-0.5 * x).exp();
    let mut out = DMatrix::zeros(d, d);
    // log-factorials keep the prefactors finite
    let lf: Vec<f64> = (0..d)
        .scan(0.0, |acc, k| {
            if k > 0 {
                *acc += (k as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    for diff in 0..d {
        let lag = laguerre(d - 1 - diff, diff as f64, x);
        let g_pow = gamma.powu(diff as u32);
        let mg_pow = (-gamma.conj()).powu(diff as u32);
        for low in 0..(d - diff) {
            let high = low + diff;
            let pref = (0.5 * (lf[low] - lf[high])).exp() * damp * lag[low];
            // m ≥ n: γ^{m−n} L_n^{(m−n)}
            out[(high, low)] = g_pow * pref;
            if diff > 0 {
                out[(low, high)] = mg_pow * pref;
            }
        }
    }
    out
}

/// `W(β) = (2/π) Tr[ρ D(2β) Π]`.
pub fn wigner_point(rho: &DensityMatrix, beta: C64) -> f64 {
    let d = rho.dim();
    let dm = displacement_matrix(beta * 2.0, rho.cutoff());
    let mut acc = C64::new(0.0, 0.0);
    for n in 0..d {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for m in 0..d {
            acc += rho.get(n, m) * dm[(m, n)] * sign;
        }
    }
    2.0 / PI * acc.re
}

pub fn wigner(rho: &DensityMatrix, grid: &GridSpec) -> Result<WignerGrid> {
    grid.validate()?;
    let x_axis = GridSpec::axis(grid.x_min, grid.x_max, grid.nx);
    let p_axis = GridSpec::axis(grid.p_min, grid.p_max, grid.np);
    let values = x_axis
        .par_iter()
        .map(|&x| p_axis.iter().map(|&p| wigner_point(rho, C64::new(x, p))).collect())
        .collect();
    Ok(WignerGrid {
        x_axis,
        p_axis,
        values,
    })
}

/// Photon-number distribution.
pub fn photon_distribution(rho: &DensityMatrix) -> Vec<f64> {
    rho.populations()
}

/// Mandel `Q = (⟨a†²a²⟩ − ⟨n⟩²)/⟨n⟩`; `None` when `⟨n⟩ < 1e-9`.
pub fn mandel_q_from_values(n: f64, n2_normal: f64) -> Option<f64> {
    if n < 1e-9 {
        return None;
    }
    Some((n2_normal - n * n) / n)
}

pub fn mandel_q(rho: &DensityMatrix) -> Option<f64> {
    mandel_q_from_values(normal_moment(rho, 1, 1).re, normal_moment(rho, 2, 2).re)
}

/// Mandel Q from a signal moment table (needs order ≥ 4).
pub fn mandel_q_from_moments(moments: &MomentTable) -> Result<Option<f64>> {
    Ok(mandel_q_from_values(
        moments.value(1, 1)?.re,
        moments.value(2, 2)?.re,
    ))
}

/// Default squeezing direction: the p quadrature.
pub const DEFAULT_SQUEEZING_DIRECTION: f64 = PI / 2.0;

/// Commutator constant of the quadratures `[x, p] = i/2`.
pub const QUADRATURE_C: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingReport {
    pub order: usize,
    pub direction: f64,
    pub value: f64,
}

/// Vacuum value `C^{N/2} (N−1)!!` of the Nth central quadrature moment.
pub fn vacuum_quadrature_moment(order: usize) -> f64 {
    let double_fact: f64 = (1..order).step_by(2).map(|k| k as f64).product();
    QUADRATURE_C.powi((order / 2) as i32) * double_fact
}

/// Nth-order squeezing of the quadrature `X_φ = (a e^{−iφ} + a† e^{iφ})/2`.
///
/// Evaluated on a space extended by `order` levels so that powers of the
/// quadrature are exact on the state's support.
pub fn squeezing(rho: &DensityMatrix, order: usize, direction: f64) -> Result<SqueezingReport> {
    if order == 0 || order % 2 == 1 {
        return Err(Error::OddOrder(order));
    }
    let ext = rho.cutoff() + order;
    let big = rho.embed(ext)?;
    let x = FockOperator::quadrature(direction, ext);
    let mean = x.expectation(&big)?.re;
    let mut y = x.matrix().clone();
    for i in 0..=ext {
        y[(i, i)] -= C64::new(mean, 0.0);
    }
    let mut power = y.clone();
    for _ in 1..order {
        power = &power * &y;
    }
    let moment = crate::fock::trace_product(big.matrix(), &power).re;
    let reference = vacuum_quadrature_moment(order);
    Ok(SqueezingReport {
        order,
        direction,
        value: (moment - reference) / reference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceConfig {
    pub peel_count: usize,
    /// Points per side of the coarse search grid.
    pub grid_points: usize,
    /// Search disk radius is `√⟨n⟩ + radius_margin`.
    pub radius_margin: f64,
    pub refine_tolerance: f64,
    /// Stop peeling once the unassigned weight drops below this.
    pub residual_cutoff: f64,
    /// Unassigned weight above this after all peels is an error.
    pub failure_threshold: f64,
}

impl Default for CoherenceConfig {
    fn default() -> Self {
        Self {
            peel_count: 6,
            grid_points: 41,
            radius_margin: 2.0,
            refine_tolerance: 1e-6,
            residual_cutoff: 1e-2,
            failure_threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peel {
    pub alpha: C64,
    /// Weight moved out of the unassigned sector by this peel.
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoherenceResult {
    pub value: f64,
    pub peels: Vec<Peel>,
    pub residual: f64,
    pub diagonal_entropy: f64,
    pub state_entropy: f64,
}

/// Coherent ket normalized on the truncated space, without a truncation check.
fn normalized_coherent(gamma: C64, cutoff: usize) -> DVector<C64> {
    let v = coherent_amplitudes(gamma, cutoff);
    let n = v.norm();
    v.unscale(n)
}

fn overlap_objective(m: &DMatrix<C64>, gamma: C64) -> f64 {
    let v = normalized_coherent(gamma, m.nrows() - 1);
    v.dotc(&(m * &v)).re
}

/// Maximizer of `⟨γ|M|γ⟩` over a disk: coarse grid, then a simplex polish.
pub fn coherent_search(m: &DMatrix<C64>, radius: f64, grid_points: usize, tolerance: f64) -> (C64, f64) {
    let axis = crate::device::linspace(-radius, radius, grid_points.max(2));
    let best = axis
        .par_iter()
        .map(|&x| {
            let mut best = (C64::new(0.0, 0.0), f64::NEG_INFINITY);
            for &p in &axis {
                if x * x + p * p > radius * radius {
                    continue;
                }
                let g = C64::new(x, p);
                let v = overlap_objective(m, g);
                if v > best.1 {
                    best = (g, v);
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((C64::new(0.0, 0.0), f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let step = 2.0 * radius / (grid_points.max(2) - 1) as f64;
    let (x, v) = nelder_mead(
        |p| -overlap_objective(m, C64::new(p[0], p[1])),
        [best.0.re, best.0.im],
        0.5 * step,
        tolerance,
    );
    if -v >= best.1 {
        (C64::new(x[0], x[1]), -v)
    } else {
        best
    }
}

/// Two-dimensional Nelder–Mead; stops when the simplex diameter is below `tol`.
fn nelder_mead<F: Fn([f64; 2]) -> f64>(f: F, start: [f64; 2], step: f64, tol: f64) -> ([f64; 2], f64) {
    let mut s = [
        start,
        [start[0] + step, start[1]],
        [start[0], start[1] + step],
    ];
    let mut v = s.map(&f);
    for _ in 0..2000 {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        s = order.map(|i| s[i]);
        v = order.map(|i| v[i]);
        let diam = (1..3)
            .map(|i| ((s[i][0] - s[0][0]).powi(2) + (s[i][1] - s[0][1]).powi(2)).sqrt())
            .fold(0.0, f64::max);
        if diam < tol {
            break;
        }
        let c = [(s[0][0] + s[1][0]) / 2.0, (s[0][1] + s[1][1]) / 2.0];
        let at = |t: f64| [c[0] + t * (s[2][0] - c[0]), c[1] + t * (s[2][1] - c[1])];
        let r = at(-1.0);
        let fr = f(r);
        if fr < v[0] {
            let e = at(-2.0);
            let fe = f(e);
            if fe < fr {
                s[2] = e;
                v[2] = fe;
            } else {
                s[2] = r;
                v[2] = fr;
            }
        } else if fr < v[1] {
            s[2] = r;
            v[2] = fr;
        } else {
            let (k, fk) = if fr < v[2] {
                let k = at(-0.5);
                (k, f(k))
            } else {
                let k = at(0.5);
                (k, f(k))
            };
            if fk < v[2].min(fr) {
                s[2] = k;
                v[2] = fk;
            } else {
                for i in 1..3 {
                    s[i] = [
                        s[0][0] + 0.5 * (s[i][0] - s[0][0]),
                        s[0][1] + 0.5 * (s[i][1] - s[0][1]),
                    ];
                    v[i] = f(s[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    (s[best], v[best])
}

/// Peeling search strategy: returns the next coherent amplitude and its
/// overlap with the unassigned block.
pub type SearchFn<'a> = dyn Fn(&DMatrix<C64>, f64) -> (C64, f64) + Sync + 'a;

/// α-coherence with the production grid-plus-polish search.
pub fn alpha_coherence(rho: &DensityMatrix, config: &CoherenceConfig) -> Result<CoherenceResult> {
    let search = |m: &DMatrix<C64>, radius: f64| {
        coherent_search(m, radius, config.grid_points, config.refine_tolerance)
    };
    alpha_coherence_with(rho, config, &search)
}

/// α-coherence with a caller-supplied search for each peel.
///
/// The state is extended by an auxiliary register; each peel swaps the
/// component along |γᵢ⟩ from register level 0 into level i. The peeled
/// blocks give the coherent-basis matrix ρ_α, and the result is
/// `S(diag ρ_α) − S(ρ_α)`.
pub fn alpha_coherence_with(
    rho: &DensityMatrix,
    config: &CoherenceConfig,
    search: &SearchFn<'_>,
) -> Result<CoherenceResult> {
    if config.peel_count == 0 {
        return Err(Error::InvalidParameter("peel_count must be at least 1".into()));
    }
    let d = rho.dim();
    let levels = config.peel_count + 1;
    let dim = d * levels;
    let mut joint = DMatrix::<C64>::zeros(dim, dim);
    joint.view_mut((0, 0), (d, d)).copy_from(rho.matrix());
    let radius = normal_moment(rho, 1, 1).re.max(0.0).sqrt() + config.radius_margin;

    let mut peels = Vec::new();
    let mut kets = Vec::new();
    let mut residual = rho.trace();
    for i in 1..=config.peel_count {
        let m00 = joint.view((0, 0), (d, d)).into_owned();
        let (gamma, weight) = search(&m00, radius);
        let ket = normalized_coherent(gamma, d - 1);
        let proj = &ket * ket.adjoint();
        // U = 1 + P ⊗ (|i⟩⟨0| + |0⟩⟨i| − |0⟩⟨0| − |i⟩⟨i|)
        let mut u = DMatrix::<C64>::identity(dim, dim);
        for a in 0..d {
            for b in 0..d {
                let p = proj[(a, b)];
                u[(i * d + a, b)] += p;
                u[(a, i * d + b)] += p;
                u[(a, b)] -= p;
                u[(i * d + a, i * d + b)] -= p;
            }
        }
        joint = &u * joint * u.adjoint();
        peels.push(Peel {
            alpha: gamma,
            weight,
        });
        kets.push(ket);
        residual = (0..d).map(|a| joint[(a, a)].re).sum();
        if residual < config.residual_cutoff {
            break;
        }
    }
    if residual > config.failure_threshold {
        return Err(Error::DecompositionIncomplete(residual));
    }

    let k = peels.len();
    let mut ra = DMatrix::<C64>::zeros(k, k);
    for p in 0..k {
        for q in 0..k {
            let block = joint.view(((p + 1) * d, (q + 1) * d), (d, d));
            ra[(p, q)] = kets[p].dotc(&(block * &kets[q]));
        }
    }
    let tr = ra.trace().re;
    if !(tr > 0.0) {
        return Err(Error::Degenerate(tr));
    }
    let ra = ra.unscale(tr);
    let ra = (&ra + ra.adjoint()).scale(0.5);
    let diagonal_entropy = entropy_bits((0..k).map(|p| ra[(p, p)].re));
    let state_entropy = hermitian_entropy(&ra);
    Ok(CoherenceResult {
        value: diagonal_entropy - state_entropy,
        peels,
        residual,
        diagonal_entropy,
        state_entropy,
    })
}
