//! Truncated Fock-space linear algebra.
//!
//! States live on the photon-number basis `|0⟩ … |cutoff⟩`. All values are
//! immutable after construction; every free function here is pure.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::round_sig;
use crate::C64;

/// Default photon-number cutoff used for reconstruction.
pub const DEFAULT_CUTOFF: usize = 11;

/// Minimum retained weight accepted by [`coherent_ket`].
pub const MIN_RETAINED_WEIGHT: f64 = 0.99;

/// Eigenvalues below this are dropped from entropy sums.
pub const ENTROPY_EIGEN_FLOOR: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;
// rounding-level eigenvalues would otherwise enter through square roots
const SPECTRAL_FLOOR: f64 = 1e-14;

/// A pure state on the truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: DVector<C64>,
}

impl Ket {
    /// Wraps raw amplitudes without normalizing them.
    pub fn from_amplitudes(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidParameter(
                "a ket needs at least two Fock levels".into(),
            ));
        }
        Ok(Self { amplitudes })
    }

    /// Fock basis state `|n⟩`.
    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::InvalidParameter(format!(
                "Fock level {n} above cutoff {cutoff}"
            )));
        }
        let mut v = DVector::zeros(cutoff + 1);
        v[n] = C64::new(1.0, 0.0);
        Self::from_amplitudes(v)
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Returns the unit-norm version of this ket.
    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 1e-12) || !n.is_finite() {
            return Err(Error::Degenerate(n));
        }
        Ok(Self {
            amplitudes: self.amplitudes.unscale(n),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// A coherent-state ket together with the weight lost to truncation.
#[derive(Debug, Clone)]
pub struct CoherentKet {
    pub ket: Ket,
    /// `1 − Σ|cₙ|²` before renormalization.
    pub truncated_weight: f64,
}

/// Untruncated Fock amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n = 0..=cutoff`.
///
/// These are the exact projections of `|α⟩` onto the retained levels; the
/// vector is not renormalized.
pub fn coherent_amplitudes(alpha: C64, cutoff: usize) -> DVector<C64> {
    let mut v = DVector::zeros(cutoff + 1);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    v[0] = c;
    for n in 1..=cutoff {
        c = c * alpha / (n as f64).sqrt();
        v[n] = c;
    }
    v
}

/// Normalized coherent ket on the truncated space.
///
/// Fails when less than [`MIN_RETAINED_WEIGHT`] of the state survives the
/// truncation.
pub fn coherent_ket(alpha: C64, cutoff: usize) -> Result<CoherentKet> {
    if cutoff < 1 {
        return Err(Error::InvalidParameter("cutoff must be at least 1".into()));
    }
    let v = coherent_amplitudes(alpha, cutoff);
    let weight = v.norm_squared();
    if weight < MIN_RETAINED_WEIGHT {
        return Err(Error::TruncationTooSevere {
            alpha: alpha.norm(),
            cutoff,
            weight,
        });
    }
    Ok(CoherentKet {
        ket: Ket {
            amplitudes: v.unscale(weight.sqrt()),
        },
        truncated_weight: (1.0 - weight).max(0.0),
    })
}

/// Analytic overlap `⟨α|β⟩ = exp(−|α|²/2 − |β|²/2 + ᾱβ)`.
pub fn coherent_overlap(alpha: C64, beta: C64) -> C64 {
    (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr() + alpha.conj() * beta).exp()
}

/// A density matrix on the truncated Fock space: Hermitian, unit trace, PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates and wraps a matrix.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        let rho = Self { matrix };
        rho.validate()?;
        Ok(rho)
    }

    /// Hermitizes and trace-normalizes `matrix`; fails on a non-positive trace.
    /// PSD-ness is the caller's responsibility.
    pub(crate) fn from_unnormalized(matrix: DMatrix<C64>) -> Result<Self> {
        let herm = (&matrix + matrix.adjoint()).scale(0.5);
        let tr = herm.trace().re;
        if !(tr > 1e-300) || !tr.is_finite() {
            return Err(Error::Degenerate(tr));
        }
        Ok(Self {
            matrix: herm.unscale(tr),
        })
    }

    pub fn pure(ket: &Ket) -> Result<Self> {
        Ok(ket.normalize()?.to_density())
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut m = DMatrix::zeros(cutoff + 1, cutoff + 1);
        m[(0, 0)] = C64::new(1.0, 0.0);
        Self { matrix: m }
    }

    pub fn maximally_mixed(cutoff: usize) -> Self {
        let d = cutoff + 1;
        Self {
            matrix: DMatrix::identity(d, d).unscale(d as f64),
        }
    }

    /// Thermal state with mean photon number `n_bar`, renormalized on the
    /// truncated space.
    pub fn thermal(n_bar: f64, cutoff: usize) -> Result<Self> {
        if !(n_bar >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "thermal occupation must be non-negative, got {n_bar}"
            )));
        }
        let d = cutoff + 1;
        let mut m = DMatrix::zeros(d, d);
        let ratio = n_bar / (n_bar + 1.0);
        let mut p = 1.0 / (n_bar + 1.0);
        for n in 0..d {
            m[(n, n)] = C64::new(p, 0.0);
            p *= ratio;
        }
        Self::from_unnormalized(m)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cutoff(&self) -> usize {
        self.dim() - 1
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ|ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Checks the Hermitian, unit-trace and PSD invariants.
    pub fn validate(&self) -> Result<()> {
        let d = self.matrix.nrows();
        if d != self.matrix.ncols() || d < 2 {
            return Err(Error::InvalidState(format!(
                "matrix must be square with dimension ≥ 2, got {}×{}",
                d,
                self.matrix.ncols()
            )));
        }
        if self.matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        for i in 0..d {
            for j in i..d {
                let dev = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                if dev > HERMITIAN_TOL {
                    return Err(Error::InvalidState(format!(
                        "not Hermitian at ({i}, {j}): deviation {dev:e}"
                    )));
                }
            }
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} ≠ 1")));
        }
        let min = self.eigenvalues()[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// Diagonal of ρ: the photon-number distribution.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.matrix[(n, n)].re).collect()
    }

    /// `e^{iφ a†a} ρ e^{−iφ a†a}`; maps `|β⟩` to `|β e^{iφ}⟩`.
    pub fn rotate(&self, phi: f64) -> Self {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |j, k| {
            self.matrix[(j, k)] * C64::from_polar(1.0, phi * (j as f64 - k as f64))
        });
        Self { matrix: m }
    }

    /// Embeds ρ into a larger cutoff by zero padding.
    pub fn embed(&self, cutoff: usize) -> Result<Self> {
        if cutoff < self.cutoff() {
            return Err(Error::InvalidParameter(format!(
                "cannot embed cutoff {} into {cutoff}",
                self.cutoff()
            )));
        }
        let d = self.dim();
        let mut m = DMatrix::zeros(cutoff + 1, cutoff + 1);
        m.view_mut((0, 0), (d, d)).copy_from(&self.matrix);
        Ok(Self { matrix: m })
    }

    /// Serializable row-major form.
    pub fn to_record(&self) -> DensityRecord {
        let d = self.dim();
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = self.matrix[(i, j)];
                data.push([round_sig(z.re), round_sig(z.im)]);
            }
        }
        DensityRecord {
            cutoff: self.cutoff(),
            dim: d,
            data,
        }
    }

    /// Rebuilds a state from its record. Rounding in the record is absorbed
    /// by re-hermitizing and renormalizing before validation.
    pub fn from_record(record: &DensityRecord) -> Result<Self> {
        let d = record.dim;
        if d != record.cutoff + 1 || record.data.len() != d * d {
            return Err(Error::Parse(format!(
                "density record with dim {d} has {} entries",
                record.data.len()
            )));
        }
        let m = DMatrix::from_fn(d, d, |i, j| {
            let [re, im] = record.data[i * d + j];
            C64::new(re, im)
        });
        let rho = Self::from_unnormalized(m)?;
        rho.validate()?;
        Ok(rho)
    }
}

/// JSON form of a density matrix: row-major `(re, im)` pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DensityRecord {
    pub cutoff: usize,
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

/// An operator on the truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: DMatrix<C64>,
}

impl FockOperator {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(matrix.nrows(), matrix.ncols()));
        }
        Ok(Self { matrix })
    }

    /// `a|n⟩ = √n |n−1⟩`.
    pub fn annihilation(cutoff: usize) -> Self {
        let d = cutoff + 1;
        let mut m = DMatrix::zeros(d, d);
        for n in 1..d {
            m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        Self { matrix: m }
    }

    pub fn creation(cutoff: usize) -> Self {
        Self::annihilation(cutoff).adjoint()
    }

    pub fn number(cutoff: usize) -> Self {
        let d = cutoff + 1;
        Self {
            matrix: DMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    C64::new(i as f64, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// Photon-number parity `(−1)^{a†a}`.
    pub fn parity(cutoff: usize) -> Self {
        let d = cutoff + 1;
        Self {
            matrix: DMatrix::from_fn(d, d, |i, j| {
                if i != j {
                    C64::new(0.0, 0.0)
                } else if i % 2 == 0 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(-1.0, 0.0)
                }
            }),
        }
    }

    /// Normally ordered product `(a†)^m aⁿ`, built from its matrix elements so
    /// that the truncation edge does not leak into the result.
    pub fn normal_product(m: usize, n: usize, cutoff: usize) -> Self {
        let d = cutoff + 1;
        let mut mat = DMatrix::zeros(d, d);
        for k in n..d {
            let j = k - n + m;
            if j < d {
                mat[(j, k)] = C64::new(falling_sqrt(k, n) * falling_sqrt(j, m), 0.0);
            }
        }
        Self { matrix: mat }
    }

    /// Quadrature `X_φ = (a e^{−iφ} + a† e^{iφ})/2`; `φ = 0` is x, `φ = π/2` is p.
    pub fn quadrature(phi: f64, cutoff: usize) -> Self {
        let a = Self::annihilation(cutoff).matrix;
        let e = C64::from_polar(1.0, phi);
        let m = (&a * e.conj() + a.adjoint() * e).scale(0.5);
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        check_dim(self.dim(), ket.dim())?;
        Ket::from_amplitudes(&self.matrix * &ket.amplitudes)
    }

    /// `Tr[ρ O]`.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<C64> {
        check_dim(self.dim(), rho.dim())?;
        Ok(trace_product(rho.matrix(), &self.matrix))
    }
}

/// `√(k!/(k−n)!)`.
fn falling_sqrt(k: usize, n: usize) -> f64 {
    ((k + 1 - n)..=k).map(|j| j as f64).product::<f64>().sqrt()
}

/// `Tr[A B]` without forming the product.
pub(crate) fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let d = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

fn check_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// `Tr[ρ (a†)^m aⁿ]`, exact for ρ supported on the truncated space.
pub fn normal_moment(rho: &DensityMatrix, m: usize, n: usize) -> C64 {
    let d = rho.dim();
    let mut acc = C64::new(0.0, 0.0);
    for k in n..d {
        let j = k - n + m;
        if j >= d {
            break;
        }
        acc += rho.matrix[(k, j)] * (falling_sqrt(k, n) * falling_sqrt(j, m));
    }
    acc
}

/// Shannon entropy in bits of a probability vector, dropping entries below
/// [`ENTROPY_EIGEN_FLOOR`].
pub fn entropy_bits(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    probabilities
        .into_iter()
        .filter(|&p| p > ENTROPY_EIGEN_FLOOR)
        .map(|p| -p * p.log2())
        .sum()
}

/// Von Neumann entropy `−Tr ρ log₂ ρ` of any Hermitian PSD matrix.
pub fn hermitian_entropy(matrix: &DMatrix<C64>) -> f64 {
    let eig = SymmetricEigen::new(matrix.clone());
    entropy_bits(eig.eigenvalues.iter().copied())
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    hermitian_entropy(&rho.matrix)
}

/// `⟨ψ|ρ|ψ⟩` for a normalized target.
pub fn fidelity_pure(rho: &DensityMatrix, target: &Ket) -> Result<f64> {
    check_dim(rho.dim(), target.dim())?;
    let psi = target.normalize()?;
    let v = &rho.matrix * &psi.amplitudes;
    Ok(psi.amplitudes.dotc(&v).re)
}

fn psd_sqrt(matrix: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(matrix.clone());
    let d = matrix.nrows();
    let mut out = DMatrix::zeros(d, d);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= SPECTRAL_FLOOR {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        out += (&v * v.adjoint()).scale(lambda.sqrt());
    }
    out
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`; reduces to [`fidelity_pure`] when σ is pure.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    let s = psd_sqrt(&rho.matrix);
    let inner = &s * &sigma.matrix * &s;
    let inner = (&inner + inner.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(inner);
    let root: f64 = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > SPECTRAL_FLOOR)
        .map(|&l| l.sqrt())
        .sum();
    Ok(root * root)
}

/// Trace distance `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    let diff = &rho.matrix - &sigma.matrix;
    let eig = SymmetricEigen::new(diff);
    Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn diag_state(p: &[f64], cutoff: usize) -> DensityMatrix {
        let mut m = DMatrix::zeros(cutoff + 1, cutoff + 1);
        for (i, &x) in p.iter().enumerate() {
            m[(i, i)] = c(x);
        }
        DensityMatrix::from_matrix(m).unwrap()
    }

    #[test]
    fn vacuum_coherent_ket() {
        let k = coherent_ket(c(0.0), 11).unwrap();
        assert_eq!(k.ket.amplitudes()[0], c(1.0));
        assert!(k.ket.amplitudes().iter().skip(1).all(|z| z.norm() == 0.0));
        assert_eq!(k.truncated_weight, 0.0);
    }

    #[test]
    fn truncated_weight_matches_poisson_tail() {
        let k = coherent_ket(c(1.07), 11).unwrap();
        // Poisson tail beyond n = 11 for mean 1.1449
        let mean: f64 = 1.1449;
        let mut term = (-mean).exp();
        let mut head = term;
        for n in 1..=11 {
            term *= mean / n as f64;
            head += term;
        }
        let tail = 1.0 - head;
        assert!(k.truncated_weight < 1e-6);
        assert!((k.truncated_weight - tail).abs() < 1e-13);
        assert!((k.ket.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn severe_truncation_rejected() {
        assert!(matches!(
            coherent_ket(c(3.0), 5),
            Err(Error::TruncationTooSevere { .. })
        ));
        assert!(coherent_ket(c(0.5), 0).is_err());
    }

    #[test]
    fn overlap_of_opposite_cats() {
        let expected = (-2.0 * 1.07f64 * 1.07).exp();
        let z = coherent_overlap(c(1.07), c(-1.07));
        assert!((z.re - expected).abs() < 1e-15 && z.im.abs() < 1e-15);
        assert!((expected - 0.1013).abs() < 1e-4);
        let a = coherent_ket(c(1.07), 11).unwrap().ket;
        let b = coherent_ket(c(-1.07), 11).unwrap().ket;
        assert!((a.inner(&b).unwrap() - z).norm() < 1e-8);

        let w = C64::new(0.3, -0.8);
        assert!((coherent_overlap(w, w) - c(1.0)).norm() < 1e-15);
        let vac = coherent_overlap(c(0.0), w);
        assert!((vac - c((-0.5 * w.norm_sqr()).exp())).norm() < 1e-15);
    }

    #[test]
    fn annihilation_is_exact_on_basis() {
        let a = FockOperator::annihilation(6);
        for n in 0..=6 {
            let out = a.apply(&Ket::fock(n, 6).unwrap()).unwrap();
            for k in 0..=6 {
                let expected = if n > 0 && k == n - 1 { (n as f64).sqrt() } else { 0.0 };
                assert_eq!(out.amplitudes()[k], c(expected));
            }
        }
        let ad = FockOperator::creation(6);
        let num = &ad.matrix * &a.matrix;
        assert!((num - FockOperator::number(6).matrix).norm() < 1e-12);
    }

    #[test]
    fn normal_moment_cases() {
        let vac = DensityMatrix::vacuum(11);
        assert_eq!(normal_moment(&vac, 1, 1), c(0.0));
        assert_eq!(normal_moment(&vac, 0, 0), c(1.0));

        let beta = C64::new(0.6, -0.4);
        let coh = DensityMatrix::pure(&Ket::from_amplitudes(coherent_amplitudes(beta, 30)).unwrap())
            .unwrap();
        for (m, n) in [(1, 0), (0, 2), (2, 1), (3, 3)] {
            let expect = beta.conj().powu(m as u32) * beta.powu(n as u32);
            assert!((normal_moment(&coh, m, n) - expect).norm() < 1e-12, "({m},{n})");
        }

        // even cat mean photon number |α|² tanh|α|²
        let alpha = 1.07f64;
        let v = coherent_amplitudes(c(alpha), 11) + coherent_amplitudes(c(-alpha), 11);
        let cat = DensityMatrix::pure(&Ket::from_amplitudes(v).unwrap()).unwrap();
        let expect = alpha * alpha * (alpha * alpha).tanh();
        assert!((normal_moment(&cat, 1, 1).re - expect).abs() < 1e-7);
        // matrix-trace route
        let op = FockOperator::normal_product(1, 1, 11);
        assert!((op.expectation(&cat).unwrap() - normal_moment(&cat, 1, 1)).norm() < 1e-13);
    }

    #[test]
    fn normal_product_agrees_with_matrix_powers() {
        let cutoff = 9;
        let a = FockOperator::annihilation(cutoff).matrix;
        let ad = a.adjoint();
        for m in 0..4 {
            for n in 0..4 {
                let direct = FockOperator::normal_product(m, n, cutoff);
                // powers on a padded space avoid the truncation edge
                let big = cutoff + m + 1;
                let ab = FockOperator::annihilation(big).matrix;
                let prod = ab.adjoint().pow(m as u32) * ab.pow(n as u32);
                let sub = prod.view((0, 0), (cutoff + 1, cutoff + 1)).into_owned();
                assert!((&direct.matrix - &sub).norm() < 1e-9, "({m},{n})");
            }
        }
        let _ = ad;
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::vacuum(3);
        assert!(von_neumann_entropy(&pure).abs() < 1e-12);
        let half = diag_state(&[0.5, 0.5], 3);
        assert!((von_neumann_entropy(&half) - 1.0).abs() < 1e-12);
        let quarter = diag_state(&[0.75, 0.25], 3);
        let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((von_neumann_entropy(&quarter) - h).abs() < 1e-12);
        assert!((h - 0.8113).abs() < 1e-4);
    }

    #[test]
    fn pure_fidelity_examples() {
        let psi = coherent_ket(C64::new(0.4, 0.2), 11).unwrap().ket;
        let rho = psi.to_density();
        assert!((fidelity_pure(&rho, &psi).unwrap() - 1.0).abs() < 1e-12);
        let zero = Ket::fock(0, 11).unwrap();
        let one = Ket::fock(1, 11).unwrap();
        assert_eq!(fidelity_pure(&zero.to_density(), &one).unwrap(), 0.0);
        let mixed = DensityMatrix::maximally_mixed(11);
        assert!((fidelity_pure(&mixed, &psi).unwrap() - 1.0 / 12.0).abs() < 1e-12);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
        assert!((fidelity(&mixed, &rho).unwrap() - 1.0 / 12.0).abs() < 1e-9);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let mut m = DMatrix::zeros(3, 3);
        m[(0, 0)] = c(0.5);
        assert!(DensityMatrix::from_matrix(m.clone()).is_err());
        m[(1, 1)] = c(0.5);
        m[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensityMatrix::from_matrix(m.clone()).is_err());
        m[(1, 0)] = C64::new(0.0, -0.1);
        assert!(DensityMatrix::from_matrix(m.clone()).is_ok());
        let mut neg = DMatrix::zeros(2, 2);
        neg[(0, 0)] = c(1.5);
        neg[(1, 1)] = c(-0.5);
        assert!(DensityMatrix::from_matrix(neg).is_err());
    }

    #[test]
    fn record_round_trip() {
        let v = coherent_amplitudes(C64::new(0.7, 0.3), 11) - coherent_amplitudes(C64::new(-0.2, 0.9), 11);
        let rho = DensityMatrix::pure(&Ket::from_amplitudes(v).unwrap()).unwrap();
        let back = DensityMatrix::from_record(&rho.to_record()).unwrap();
        assert!((rho.matrix() - back.matrix()).camax() < 1e-12);
    }

    #[test]
    fn rotation_moves_coherent_amplitude() {
        let beta = C64::new(0.8, 0.1);
        let rho = Ket::from_amplitudes(coherent_amplitudes(beta, 25)).unwrap().to_density();
        let rotated = rho.rotate(PI / 3.0);
        let moved = beta * C64::from_polar(1.0, PI / 3.0);
        assert!((normal_moment(&rotated, 0, 1) - moved).norm() < 1e-12);
    }
}
