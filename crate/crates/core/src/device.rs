//! Qubit-conditioned cavity reflection from input-output theory.
//!
//! Rates are angular (rad/µs). [`DeviceTable`] carries the same values in the
//! `frequency/2π` MHz convention used by configuration files.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Conditioned qubit outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Zero,
    One,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Zero, Branch::One];

    pub fn index(self) -> usize {
        match self {
            Branch::Zero => 0,
            Branch::One => 1,
        }
    }

    pub fn other(self) -> Branch {
        match self {
            Branch::Zero => Branch::One,
            Branch::One => Branch::Zero,
        }
    }

    /// `+1` for qubit 0, `−1` for qubit 1: the sign in front of χ.
    pub fn chi_sign(self) -> f64 {
        match self {
            Branch::Zero => 1.0,
            Branch::One => -1.0,
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Device parameters in internal units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub omega_c: f64,
    pub omega_q: f64,
    pub chi: f64,
    pub kappa_i: f64,
    pub kappa_r: f64,
    /// µs; `f64::INFINITY` disables decay.
    pub t1: f64,
    /// µs; `f64::INFINITY` disables dephasing.
    pub t2: f64,
    pub readout_error_0: f64,
    pub readout_error_1: f64,
    pub n_noise: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self::reference()
    }
}

impl DeviceParams {
    /// The measured device of the reference experiment.
    pub fn reference() -> Self {
        DeviceTable::default().to_params()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("omega_q", self.omega_q),
            ("chi", self.chi),
            ("kappa_i", self.kappa_i),
            ("kappa_r", self.kappa_r),
            ("n_noise", self.n_noise),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if self.kappa_r <= 0.0 {
            return bad(format!("kappa_r must be positive, got {}", self.kappa_r));
        }
        if self.kappa_i < 0.0 {
            return bad(format!("kappa_i must be non-negative, got {}", self.kappa_i));
        }
        if !(self.t1 > 0.0) || !(self.t2 > 0.0) {
            return bad("t1 and t2 must be positive".into());
        }
        if self.t2 > 2.0 * self.t1 {
            return bad(format!("t2 = {} exceeds 2·t1 = {}", self.t2, 2.0 * self.t1));
        }
        for (name, e) in [
            ("readout_error_0", self.readout_error_0),
            ("readout_error_1", self.readout_error_1),
        ] {
            if !(0.0..1.0).contains(&e) {
                return bad(format!("{name} must lie in [0, 1), got {e}"));
            }
        }
        if self.n_noise < 0.0 {
            return bad(format!("n_noise must be non-negative, got {}", self.n_noise));
        }
        Ok(())
    }

    pub fn kappa_tot(&self) -> f64 {
        self.kappa_i + self.kappa_r
    }

    /// Pure dephasing time `(1/T₂ − 1/(2T₁))⁻¹`.
    pub fn t_phi(&self) -> f64 {
        1.0 / (1.0 / self.t2 - 0.5 / self.t1)
    }

    pub fn eta(&self) -> Result<EtaFactor> {
        EtaFactor::new(self.kappa_i, self.kappa_r)
    }

    /// Copy with the cavity internal loss removed.
    pub fn without_cavity_loss(&self) -> Self {
        Self { kappa_i: 0.0, ..*self }
    }

    /// Copy with an ideal qubit (no decay, no dephasing).
    pub fn without_qubit_decay(&self) -> Self {
        Self {
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            ..*self
        }
    }

    pub fn without_readout_error(&self) -> Self {
        Self {
            readout_error_0: 0.0,
            readout_error_1: 0.0,
            ..*self
        }
    }

    pub fn readout_error(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Zero => self.readout_error_0,
            Branch::One => self.readout_error_1,
        }
    }
}

/// Device parameters in configuration units: `frequency/2π` in MHz (cavity
/// and qubit frequencies in GHz), lifetimes in µs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceTable {
    pub omega_c_ghz: f64,
    pub omega_q_ghz: f64,
    pub chi_mhz: f64,
    pub kappa_i_mhz: f64,
    pub kappa_r_mhz: f64,
    pub t1_us: f64,
    pub t2_us: f64,
    /// Single-number readout fidelity; used when the per-branch errors are absent.
    pub readout_fidelity: f64,
    pub readout_error_0: Option<f64>,
    pub readout_error_1: Option<f64>,
    pub n_noise: f64,
}

impl Default for DeviceTable {
    fn default() -> Self {
        Self {
            omega_c_ghz: 8.6885,
            omega_q_ghz: 5.2927,
            chi_mhz: -1.1,
            kappa_i_mhz: 0.22,
            kappa_r_mhz: 2.23,
            t1_us: 20.0,
            t2_us: 6.0,
            readout_fidelity: 0.97,
            readout_error_0: None,
            readout_error_1: None,
            n_noise: 4.0,
        }
    }
}

impl DeviceTable {
    pub fn to_params(&self) -> DeviceParams {
        let eps = 1.0 - self.readout_fidelity;
        DeviceParams {
            omega_c: TAU * 1e3 * self.omega_c_ghz,
            omega_q: TAU * 1e3 * self.omega_q_ghz,
            chi: TAU * self.chi_mhz,
            kappa_i: TAU * self.kappa_i_mhz,
            kappa_r: TAU * self.kappa_r_mhz,
            t1: self.t1_us,
            t2: self.t2_us,
            readout_error_0: self.readout_error_0.unwrap_or(eps),
            readout_error_1: self.readout_error_1.unwrap_or(eps),
            n_noise: self.n_noise,
        }
    }

    pub fn from_params(p: &DeviceParams) -> Self {
        Self {
            omega_c_ghz: p.omega_c / (TAU * 1e3),
            omega_q_ghz: p.omega_q / (TAU * 1e3),
            chi_mhz: p.chi / TAU,
            kappa_i_mhz: p.kappa_i / TAU,
            kappa_r_mhz: p.kappa_r / TAU,
            t1_us: p.t1,
            t2_us: p.t2,
            readout_fidelity: 1.0 - 0.5 * (p.readout_error_0 + p.readout_error_1),
            readout_error_0: Some(p.readout_error_0),
            readout_error_1: Some(p.readout_error_1),
            n_noise: p.n_noise,
        }
    }
}

/// Converts a `frequency/2π` value in MHz to rad/µs.
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    TAU * f_mhz
}

pub fn angular_to_mhz(omega: f64) -> f64 {
    omega / TAU
}

/// Reflected-amplitude ratio `η = √((1 − κᵢ/κᵣ)/(1 + κᵢ/κᵣ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaFactor {
    pub eta: f64,
}

impl EtaFactor {
    pub fn new(kappa_i: f64, kappa_r: f64) -> Result<Self> {
        if !(kappa_r > 0.0) || kappa_i < 0.0 || kappa_i >= kappa_r {
            return Err(Error::InvalidParameter(format!(
                "eta needs 0 ≤ kappa_i < kappa_r, got {kappa_i}, {kappa_r}"
            )));
        }
        let x = kappa_i / kappa_r;
        Ok(Self {
            eta: ((1.0 - x) / (1.0 + x)).sqrt(),
        })
    }

    /// `(1 − η²)/(1 + η²)`, which equals κᵢ/κᵣ.
    pub fn loss_ratio(&self) -> f64 {
        let e2 = self.eta * self.eta;
        (1.0 - e2) / (1.0 + e2)
    }
}

fn lorentzian_denominator(params: &DeviceParams, branch: Branch, delta: f64) -> C64 {
    C64::new(delta + branch.chi_sign() * params.chi, 0.5 * params.kappa_tot())
}

/// Reflected amplitude per unit input, `iκᵣ/(Δ ± χ + iκ_tot/2) − 1`.
pub fn reflection_amplitude(params: &DeviceParams, branch: Branch, delta: f64) -> C64 {
    C64::new(0.0, params.kappa_r) / lorentzian_denominator(params, branch, delta) - 1.0
}

/// Loss-mode amplitude per unit input, `i√(κᵣκᵢ)/(Δ ± χ + iκ_tot/2)`.
pub fn loss_amplitude(params: &DeviceParams, branch: Branch, delta: f64) -> C64 {
    C64::new(0.0, (params.kappa_r * params.kappa_i).sqrt())
        / lorentzian_denominator(params, branch, delta)
}

/// `phase(r₁) − phase(r₀)` wrapped to `[0, 2π)`.
pub fn conditional_phase(params: &DeviceParams, delta: f64) -> f64 {
    let r0 = reflection_amplitude(params, Branch::Zero, delta);
    let r1 = reflection_amplitude(params, Branch::One, delta);
    (r1.arg() - r0.arg()).rem_euclid(TAU)
}

/// `κᵣ² − κᵢ² − 4χ²`; zero gives an exact π conditional phase at Δ = 0.
pub fn phase_matching_residual(params: &DeviceParams) -> f64 {
    params.kappa_r.powi(2) - params.kappa_i.powi(2) - 4.0 * params.chi.powi(2)
}

/// The out-coupling rate that zeroes [`phase_matching_residual`].
pub fn solve_kappa_r(kappa_i: f64, chi: f64) -> f64 {
    (kappa_i * kappa_i + 4.0 * chi * chi).sqrt()
}

/// Overlap of the two qubit-conditioned loss modes and the azimuthal
/// rotation it imprints on the cat coherence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoherenceFactor {
    pub value: C64,
    /// `δθ = 2·(κᵢ/κᵣ)·|α|²/η` in radians.
    pub azimuthal_shift: f64,
}

impl DecoherenceFactor {
    pub fn identity() -> Self {
        Self {
            value: C64::new(1.0, 0.0),
            azimuthal_shift: 0.0,
        }
    }

    pub fn magnitude(&self) -> f64 {
        self.value.norm()
    }
}

/// Closed-form `exp(−2·(1−η²)/(1+η²)·(η² + iη)·|α|²/η²)` for a reflected cat of size α.
pub fn decoherence_factor(params: &DeviceParams, alpha: f64) -> Result<DecoherenceFactor> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cat size must be non-negative, got {alpha}"
        )));
    }
    if params.kappa_i == 0.0 {
        return Ok(DecoherenceFactor::identity());
    }
    let eta = params.eta()?;
    let x = eta.loss_ratio();
    let e = eta.eta;
    let a2 = alpha * alpha;
    let exponent = C64::new(e * e, e) * (-2.0 * x * a2 / (e * e));
    Ok(DecoherenceFactor {
        value: exponent.exp(),
        azimuthal_shift: 2.0 * x * a2 / e,
    })
}

/// Measurement-induced qubit dephasing Γ_m for a drive of `flux` photons/µs at
/// detuning `delta_d`.
pub fn induced_dephasing(params: &DeviceParams, flux: f64, delta_d: f64) -> Result<f64> {
    if !(flux >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "flux must be non-negative, got {flux}"
        )));
    }
    let k = params.kappa_tot();
    let chi = params.chi;
    let q = 0.25 * k * k;
    let n_plus = params.kappa_r * flux / (q + (delta_d + chi).powi(2));
    let n_minus = params.kappa_r * flux / (q + (delta_d - chi).powi(2));
    Ok(k * chi * chi / (q + chi * chi + delta_d * delta_d) * (n_plus + n_minus))
}

/// Inverts [`induced_dephasing`] for the drive flux.
pub fn calibrate_flux(params: &DeviceParams, gamma_m: f64, delta_d: f64) -> Result<f64> {
    let per_unit = induced_dephasing(params, 1.0, delta_d)?;
    if !(per_unit > 0.0) {
        return Err(Error::Degenerate(per_unit));
    }
    Ok(gamma_m / per_unit)
}

/// Reflected cat size `|r₀(Δ)|·√(flux·T)`.
pub fn calibrate_alpha(
    params: &DeviceParams,
    flux: f64,
    pulse_length: f64,
    delta: f64,
) -> Result<f64> {
    if !(flux >= 0.0) || !(pulse_length >= 0.0) {
        return Err(Error::InvalidParameter(
            "flux and pulse length must be non-negative".into(),
        ));
    }
    Ok(reflection_amplitude(params, Branch::Zero, delta).norm() * (flux * pulse_length).sqrt())
}

/// One row of a reflection spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    /// Detuning `/2π` in MHz.
    pub delta_mhz: f64,
    pub magnitude_0: f64,
    pub phase_0: f64,
    pub magnitude_1: f64,
    pub phase_1: f64,
    pub phase_difference: f64,
}

/// Reflection magnitude and phase for both branches over a detuning grid in MHz.
pub fn reflection_spectrum(params: &DeviceParams, deltas_mhz: &[f64]) -> Vec<SpectrumPoint> {
    deltas_mhz
        .iter()
        .map(|&d| {
            let delta = mhz_to_angular(d);
            let r0 = reflection_amplitude(params, Branch::Zero, delta);
            let r1 = reflection_amplitude(params, Branch::One, delta);
            SpectrumPoint {
                delta_mhz: d,
                magnitude_0: r0.norm(),
                phase_0: r0.arg(),
                magnitude_1: r1.norm(),
                phase_1: r1.arg(),
                phase_difference: conditional_phase(params, delta),
            }
        })
        .collect()
}

/// Evenly spaced detunings in MHz covering `[start, stop]`.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![start],
        n => (0..n)
            .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Converts a raw qubit phase θ_q into the compensated superposition phase θ.
pub fn compensated_theta(theta_q: f64, factor: &DecoherenceFactor) -> f64 {
    (theta_q + factor.azimuthal_shift).rem_euclid(TAU)
}

/// Angle in units of π.
pub fn in_pi_units(angle: f64) -> f64 {
    angle / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lossless() -> DeviceParams {
        let chi = TAU * -1.1;
        DeviceParams {
            kappa_i: 0.0,
            kappa_r: 2.0 * chi.abs(),
            chi,
            ..DeviceParams::reference()
        }
    }

    #[test]
    fn reference_conversions() {
        let p = DeviceParams::reference();
        p.validate().unwrap();
        assert!((p.kappa_i - TAU * 0.22).abs() < 1e-12);
        assert!((p.readout_error_0 - 0.03).abs() < 1e-12);
        let back = DeviceTable::from_params(&p).to_params();
        assert!((back.chi - p.chi).abs() < 1e-12);
        // T_φ = (1/6 − 1/40)⁻¹
        assert!((p.t_phi() - 1.0 / (1.0 / 6.0 - 1.0 / 40.0)).abs() < 1e-12);
    }

    #[test]
    fn resonant_conditional_phase_is_near_pi() {
        let p = DeviceParams::reference();
        let dphi = conditional_phase(&p, 0.0);
        assert!((dphi - PI).abs() < 0.02, "{dphi}");
        assert!((dphi - (PI - 0.01726)).abs() < 1e-4);
    }

    #[test]
    fn lossless_reflection_is_unitary() {
        let p = lossless();
        for d in [-3.0, 0.0, 0.4, 5.0] {
            for b in Branch::BOTH {
                assert!((reflection_amplitude(&p, b, d).norm() - 1.0).abs() < 1e-14);
                assert_eq!(loss_amplitude(&p, b, d).norm(), 0.0);
            }
        }
        assert!((conditional_phase(&p, 0.0) - PI).abs() < 1e-9);
    }

    #[test]
    fn detuned_phase_difference() {
        let p = DeviceParams::reference();
        let dphi = conditional_phase(&p, mhz_to_angular(0.7));
        assert!((dphi - 2.657).abs() < 0.1, "{dphi}");
    }

    #[test]
    fn loss_amplitude_matches_eta_closed_form() {
        let mut p = DeviceParams::reference();
        p.kappa_r = solve_kappa_r(p.kappa_i, p.chi);
        let eta = p.eta().unwrap().eta;
        let scale = ((1.0 - eta * eta) / (1.0 + eta * eta)).sqrt();
        // per unit input: |l| = |1/η ± i|·scale·η
        let closed = (1.0 / (eta * eta) + 1.0).sqrt() * scale * eta;
        for b in Branch::BOTH {
            assert!((loss_amplitude(&p, b, 0.0).norm() - closed).abs() < 1e-12);
            assert!((reflection_amplitude(&p, b, 0.0).norm() - eta).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_and_solver() {
        let p = DeviceParams::reference();
        let r = phase_matching_residual(&p) / (TAU * TAU);
        assert!((r - (2.23f64.powi(2) - 0.22f64.powi(2) - 4.0 * 1.21)).abs() < 1e-12);
        assert!((r - 0.0845).abs() < 1e-4);
        assert_eq!(phase_matching_residual(&lossless()), 0.0);
        let q = DeviceParams {
            kappa_r: solve_kappa_r(p.kappa_i, p.chi),
            ..p
        };
        assert!(phase_matching_residual(&q).abs() < 1e-12);
    }

    #[test]
    fn decoherence_factor_values() {
        let p = DeviceParams::reference();
        let d0 = decoherence_factor(&p, 0.0).unwrap();
        assert_eq!(d0.value, C64::new(1.0, 0.0));
        let d = decoherence_factor(&p, 1.07).unwrap();
        let x: f64 = 0.22 / 2.23;
        assert!((d.magnitude() - (-2.0 * x * 1.07 * 1.07).exp()).abs() < 1e-12);
        assert!((d.magnitude() - 0.798).abs() < 1e-3);
        assert!((d.value.arg() + d.azimuthal_shift).abs() < 1e-12);
        assert!((in_pi_units(d.azimuthal_shift) - 0.0794).abs() < 1e-3);
        assert!(decoherence_factor(&p, -1.0).is_err());
    }

    #[test]
    fn direct_loss_mode_overlap_has_closed_form_magnitude() {
        let mut p = DeviceParams::reference();
        p.kappa_r = solve_kappa_r(p.kappa_i, p.chi);
        let alpha = 1.07;
        let eta = p.eta().unwrap().eta;
        let a_in = alpha / eta;
        let l0 = loss_amplitude(&p, Branch::Zero, 0.0) * a_in;
        let l1 = loss_amplitude(&p, Branch::One, 0.0) * a_in;
        let direct = crate::fock::coherent_overlap(l0, l1);
        let closed = decoherence_factor(&p, alpha).unwrap().value;
        assert!((direct.norm() - closed.norm()).abs() < 1e-12);
        // opposite rotation sense for χ < 0
        assert!((direct.arg() + closed.arg()).abs() < 1e-12);
    }

    #[test]
    fn dephasing_round_trip() {
        let p = DeviceParams::reference();
        let dd = mhz_to_angular(-0.1);
        assert_eq!(induced_dephasing(&p, 0.0, dd).unwrap(), 0.0);
        let no_chi = DeviceParams { chi: 0.0, ..p };
        assert_eq!(induced_dephasing(&no_chi, 1.35, dd).unwrap(), 0.0);
        let g = induced_dephasing(&p, 1.35, dd).unwrap();
        assert!(g > 0.0);
        assert!((calibrate_flux(&p, g, dd).unwrap() - 1.35).abs() < 1e-9);
        assert!(calibrate_flux(&no_chi, g, dd).is_err());
    }

    #[test]
    fn alpha_calibration() {
        let p = DeviceParams::reference();
        let a = calibrate_alpha(&p, 1.35, 1.0, 0.0).unwrap();
        assert!((1.03..=1.11).contains(&a), "{a}");
        assert_eq!(calibrate_alpha(&p, 0.0, 1.0, 0.0).unwrap(), 0.0);
        let l = calibrate_alpha(&lossless(), 1.35, 1.0, 0.0).unwrap();
        assert!((l - 1.35f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let mut p = DeviceParams::reference();
        p.t2 = 50.0;
        assert!(p.validate().is_err());
        let mut q = DeviceParams::reference();
        q.readout_error_1 = 1.0;
        assert!(q.validate().is_err());
        let r = DeviceParams::reference().without_qubit_decay();
        r.validate().unwrap();
        assert!(r.t_phi().is_nan() || r.t_phi() > 0.0);
    }

    #[test]
    fn spectrum_rows() {
        let p = DeviceParams::reference();
        let rows = reflection_spectrum(&p, &linspace(-5.0, 5.0, 101));
        assert_eq!(rows.len(), 101);
        let mid = rows[50];
        assert_eq!(mid.delta_mhz, 0.0);
        assert!((mid.phase_difference - PI).abs() < 0.02);
    }
}
