//! Photon states produced by reflecting a coherent pulse off the
//! qubit-conditioned cavity, then rotating and measuring the qubit.
//!
//! States are built as 2×2 coefficient matrices over the two reflected
//! coherent components and rendered into the Fock basis once at the end.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::device::{decoherence_factor, Branch, DecoherenceFactor, DeviceParams};
use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, coherent_ket, coherent_overlap, DensityMatrix, Ket};
use crate::C64;

/// Default full-sequence duration in µs.
pub const DEFAULT_DURATION: f64 = 0.6;

/// How the raw qubit rotation phase θ_q is derived from the target phase θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", content = "offset", rename_all = "lowercase")]
pub enum PhaseCompensation {
    /// Offset by the loss-induced azimuthal shift δθ of the device model.
    #[default]
    Formula,
    /// Offset `θ − θ_q` by a calibrated value in radians.
    Fixed(f64),
}

/// One preparation: cat size, qubit rotation, detuning and conditioned branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrepSpec {
    /// Reflected coherent amplitude |α|.
    pub alpha: f64,
    /// Polar rotation angle ξ.
    pub xi: f64,
    /// Compensated superposition phase θ.
    pub theta: f64,
    /// Drive detuning in rad/µs; informational, see [`PrepSpec::with_detuning`].
    pub delta: f64,
    /// Phase between the two reflected components; π on resonance.
    pub optical_phase: f64,
    pub branch: Branch,
    /// Full sequence time t in µs.
    pub duration: f64,
    pub compensation: PhaseCompensation,
}

impl Default for PrepSpec {
    fn default() -> Self {
        Self {
            alpha: 1.07,
            xi: PI / 2.0,
            theta: 0.0,
            delta: 0.0,
            optical_phase: PI,
            branch: Branch::Zero,
            duration: DEFAULT_DURATION,
            compensation: PhaseCompensation::Formula,
        }
    }
}

impl PrepSpec {
    /// `𝒩(|α⟩ + |−α⟩)` on branch 0.
    pub fn even_cat(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    /// `𝒩(|α⟩ − |−α⟩)` up to a global phase, via branch 1.
    pub fn odd_cat(alpha: f64) -> Self {
        Self {
            alpha,
            branch: Branch::One,
            ..Self::default()
        }
    }

    /// `𝒩(|α⟩ − i|−α⟩)` on branch 0.
    pub fn yurke_stoler(alpha: f64) -> Self {
        Self {
            alpha,
            theta: PI / 2.0,
            ..Self::default()
        }
    }

    pub fn with_branch(self, branch: Branch) -> Self {
        Self { branch, ..self }
    }

    /// Sets the drive detuning and takes the optical phase from the device's
    /// conditional reflection phase at that detuning.
    pub fn with_detuning(self, params: &DeviceParams, delta: f64) -> Self {
        Self {
            delta,
            optical_phase: crate::device::conditional_phase(params, delta),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return bad(format!("alpha must be non-negative, got {}", self.alpha));
        }
        if !(self.duration > 0.0) {
            return bad(format!("duration must be positive, got {}", self.duration));
        }
        if !(0.0..=PI).contains(&self.xi) {
            return bad(format!("xi must lie in [0, π], got {}", self.xi));
        }
        for (name, v) in [
            ("theta", self.theta),
            ("delta", self.delta),
            ("optical_phase", self.optical_phase),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if let PhaseCompensation::Fixed(v) = self.compensation {
            if !v.is_finite() {
                return bad("compensation offset must be finite".into());
            }
        }
        Ok(())
    }

    /// The two reflected amplitudes `(β₀, β₁)`, symmetric about the imaginary
    /// axis with relative phase `optical_phase`; `(α, −α)` on resonance.
    pub fn components(&self) -> [C64; 2] {
        let gamma = 0.5 * (PI - self.optical_phase);
        let b0 = C64::from_polar(self.alpha, gamma);
        [b0, -b0.conj()]
    }

    fn half_angles(&self) -> (f64, f64) {
        ((0.5 * self.xi).cos(), (0.5 * self.xi).sin())
    }
}

/// Probabilities of projecting the qubit onto |0⟩ and |1⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchProbabilities {
    pub p0: f64,
    pub p1: f64,
}

impl BranchProbabilities {
    pub fn get(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Zero => self.p0,
            Branch::One => self.p1,
        }
    }
}

/// Which imperfections enter a prepared state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorChannels {
    pub cavity_loss: bool,
    pub qubit_lifetime: bool,
    pub readout: bool,
}

impl ErrorChannels {
    pub const NONE: Self = Self {
        cavity_loss: false,
        qubit_lifetime: false,
        readout: false,
    };
    pub const ALL: Self = Self {
        cavity_loss: true,
        qubit_lifetime: true,
        readout: true,
    };
    pub const CAVITY: Self = Self {
        cavity_loss: true,
        ..Self::NONE
    };
    pub const QUBIT: Self = Self {
        qubit_lifetime: true,
        ..Self::NONE
    };
    pub const READOUT: Self = Self {
        readout: true,
        ..Self::NONE
    };
    /// Cavity loss and qubit lifetime, no readout mixing.
    pub const LIFETIME: Self = Self {
        cavity_loss: true,
        qubit_lifetime: true,
        readout: false,
    };
}

/// `ρ = Σⱼₖ Cⱼₖ |βⱼ⟩⟨βₖ|` over two coherent components; unnormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentBasisState {
    pub components: [C64; 2],
    pub coeffs: Matrix2<C64>,
}

impl CoherentBasisState {
    pub fn pure(components: [C64; 2], amplitudes: [C64; 2]) -> Self {
        let v = nalgebra::Vector2::new(amplitudes[0], amplitudes[1]);
        Self {
            components,
            coeffs: v * v.adjoint(),
        }
    }

    /// `Tr ρ = Σⱼₖ Cⱼₖ ⟨βₖ|βⱼ⟩`, evaluated analytically.
    pub fn trace(&self) -> f64 {
        let mut t = C64::new(0.0, 0.0);
        for j in 0..2 {
            for k in 0..2 {
                t += self.coeffs[(j, k)] * coherent_overlap(self.components[k], self.components[j]);
            }
        }
        t.re
    }

    /// Coefficient of `|β₁⟩⟨β₀|` relative to the trace.
    pub fn coherence(&self) -> C64 {
        self.coeffs[(1, 0)] / self.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            components: self.components,
            coeffs: self.coeffs * C64::new(s, 0.0),
        }
    }

    /// Sum of two states sharing the same components.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.components != other.components {
            return Err(Error::InvalidParameter(
                "cannot add coherent-basis states with different components".into(),
            ));
        }
        Ok(Self {
            components: self.components,
            coeffs: self.coeffs + other.coeffs,
        })
    }

    /// Renders `V C V†` with the exact Fock projections of each component
    /// and normalizes on the truncated space.
    pub fn to_density(&self, cutoff: usize) -> Result<DensityMatrix> {
        for beta in self.components {
            coherent_ket(beta, cutoff)?;
        }
        let d = cutoff + 1;
        let mut v = DMatrix::zeros(d, 2);
        for (k, beta) in self.components.iter().enumerate() {
            v.set_column(k, &coherent_amplitudes(*beta, cutoff));
        }
        let c = DMatrix::from_fn(2, 2, |j, k| self.coeffs[(j, k)]);
        DensityMatrix::from_unnormalized(&v * c * v.adjoint())
    }
}

/// Joint qubit-photon state: `blocks[q][q']` is `⟨q|ρ|q'⟩` in the coherent basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    pub components: [C64; 2],
    pub blocks: [[Matrix2<C64>; 2]; 2],
}

impl JointState {
    /// Reduced qubit populations `(Tr block₀₀, Tr block₁₁)`.
    pub fn qubit_populations(&self) -> (f64, f64) {
        let tr = |m: Matrix2<C64>| {
            CoherentBasisState {
                components: self.components,
                coeffs: m,
            }
            .trace()
        };
        (tr(self.blocks[0][0]), tr(self.blocks[1][1]))
    }

    /// Reduced photon state, tracing out the qubit.
    pub fn photon_state(&self) -> CoherentBasisState {
        CoherentBasisState {
            components: self.components,
            coeffs: self.blocks[0][0] + self.blocks[1][1],
        }
    }

    /// Each block rendered in the Fock basis, without normalization.
    pub fn to_fock_blocks(&self, cutoff: usize) -> [[DMatrix<C64>; 2]; 2] {
        let d = cutoff + 1;
        let mut v = DMatrix::zeros(d, 2);
        for (k, beta) in self.components.iter().enumerate() {
            v.set_column(k, &coherent_amplitudes(*beta, cutoff));
        }
        let render = |m: &Matrix2<C64>| {
            let c = DMatrix::from_fn(2, 2, |j, k| m[(j, k)]);
            &v * c * v.adjoint()
        };
        [
            [render(&self.blocks[0][0]), render(&self.blocks[0][1])],
            [render(&self.blocks[1][0]), render(&self.blocks[1][1])],
        ]
    }
}

/// Qubit rotation `R_θ(ξ) = exp(−i ξ/2 (σₓ sin θ − σ_y cos θ))`.
pub fn qubit_rotation(xi: f64, theta: f64) -> Matrix2<C64> {
    let (c, s) = ((0.5 * xi).cos(), (0.5 * xi).sin());
    Matrix2::new(
        C64::new(c, 0.0),
        C64::from_polar(s, -theta),
        -C64::from_polar(s, theta),
        C64::new(c, 0.0),
    )
}

/// Applies `R` to the qubit and projects it onto `branch`; the trace of the
/// result is the branch probability.
pub fn rotate_and_project(joint: &JointState, rotation: &Matrix2<C64>, branch: Branch) -> CoherentBasisState {
    let b = branch.index();
    let mut coeffs = Matrix2::zeros();
    for j in 0..2 {
        for k in 0..2 {
            coeffs += joint.blocks[j][k] * (rotation[(b, j)] * rotation[(b, k)].conj());
        }
    }
    CoherentBasisState {
        components: joint.components,
        coeffs,
    }
}

/// Loss-mode overlap for the enabled channels.
pub fn decoherence(params: &DeviceParams, spec: &PrepSpec, channels: ErrorChannels) -> Result<DecoherenceFactor> {
    if channels.cavity_loss {
        decoherence_factor(params, spec.alpha)
    } else {
        Ok(DecoherenceFactor::identity())
    }
}

/// `θ − θ_q` applied by the experiment for this spec.
pub fn compensation_offset(factor: &DecoherenceFactor, compensation: PhaseCompensation) -> f64 {
    match compensation {
        PhaseCompensation::Formula => -factor.value.arg(),
        PhaseCompensation::Fixed(v) => v,
    }
}

/// The raw qubit phase θ_q that realizes the spec's θ.
pub fn qubit_phase(params: &DeviceParams, spec: &PrepSpec, channels: ErrorChannels) -> Result<f64> {
    if !channels.cavity_loss {
        return Ok(spec.theta);
    }
    let factor = decoherence(params, spec, channels)?;
    Ok(spec.theta - compensation_offset(&factor, spec.compensation))
}

/// `(e^{−t/T₁}, e^{−t/T₂})`, or `(1, 1)` with the qubit channel off.
fn lifetime_factors(params: &DeviceParams, spec: &PrepSpec, channels: ErrorChannels) -> (f64, f64) {
    if channels.qubit_lifetime {
        ((-spec.duration / params.t1).exp(), (-spec.duration / params.t2).exp())
    } else {
        (1.0, 1.0)
    }
}

/// Ideal state `c|β₀⟩ + s e^{−iθ}|β₁⟩` (branch 0) or `−s e^{iθ}|β₀⟩ + c|β₁⟩` (branch 1).
pub fn ideal_cat(spec: &PrepSpec, cutoff: usize) -> Result<Ket> {
    spec.validate()?;
    let [b0, b1] = spec.components();
    coherent_ket(b0, cutoff)?;
    let [w0, w1] = ideal_weights(spec);
    let v = coherent_amplitudes(b0, cutoff) * w0 + coherent_amplitudes(b1, cutoff) * w1;
    Ket::from_amplitudes(v)?.normalize()
}

fn ideal_weights(spec: &PrepSpec) -> [C64; 2] {
    let (c, s) = spec.half_angles();
    match spec.branch {
        Branch::Zero => [C64::new(c, 0.0), C64::from_polar(s, -spec.theta)],
        Branch::One => [-C64::from_polar(s, spec.theta), C64::new(c, 0.0)],
    }
}

/// The ideal state in coherent-basis form, trace normalized.
pub fn ideal_coherent(spec: &PrepSpec) -> CoherentBasisState {
    let st = CoherentBasisState::pure(spec.components(), ideal_weights(spec));
    st.scale(1.0 / st.trace())
}

/// Joint qubit-photon state after reflection, with loss-mode overlaps and
/// qubit decay over the spec's duration.
pub fn entangled_joint_state(
    params: &DeviceParams,
    spec: &PrepSpec,
    channels: ErrorChannels,
) -> Result<JointState> {
    spec.validate()?;
    let d = decoherence(params, spec, channels)?.value;
    let (e1, e2) = lifetime_factors(params, spec, channels);
    let z = C64::new(0.0, 0.0);
    let h = |x: C64| x * 0.5;
    let one = C64::new(1.0, 0.0);
    Ok(JointState {
        components: spec.components(),
        blocks: [
            [
                Matrix2::new(h(one), z, z, h(C64::new(1.0 - e1, 0.0))),
                Matrix2::new(z, h(d.conj() * e2), z, z),
            ],
            [
                Matrix2::new(z, z, h(d * e2), z),
                Matrix2::new(z, z, z, h(C64::new(e1, 0.0))),
            ],
        ],
    })
}

/// Closed-form branch state before normalization; its trace is the branch
/// probability.
fn branch_coefficients(
    params: &DeviceParams,
    spec: &PrepSpec,
    channels: ErrorChannels,
    branch: Branch,
) -> Result<CoherentBasisState> {
    let d = decoherence(params, spec, channels)?.value;
    let (e1, e2) = lifetime_factors(params, spec, channels);
    let theta_q = qubit_phase(params, spec, channels)?;
    let (c, s) = spec.half_angles();
    let (w_alpha, w_minus, sign) = match branch {
        Branch::Zero => (c * c, c * c * (1.0 - e1) + s * s * e1, 1.0),
        Branch::One => (s * s, s * s * (1.0 - e1) + c * c * e1, -1.0),
    };
    let cross = C64::from_polar(sign * c * s * e2, -theta_q) * d;
    let coeffs = Matrix2::new(
        C64::new(w_alpha, 0.0),
        cross.conj(),
        cross,
        C64::new(w_minus, 0.0),
    ) * C64::new(0.5, 0.0);
    Ok(CoherentBasisState {
        components: spec.components(),
        coeffs,
    })
}

/// Magnitude of the `|β₁⟩⟨β₀|` coefficient relative to the ideal state,
/// before any normalization.
pub fn coherence_suppression(params: &DeviceParams, spec: &PrepSpec, channels: ErrorChannels) -> Result<f64> {
    spec.validate()?;
    let with = branch_coefficients(params, spec, channels, spec.branch)?;
    let ideal = branch_coefficients(params, spec, ErrorChannels::NONE, spec.branch)?;
    let reference = ideal.coeffs[(1, 0)].norm();
    if !(reference > 0.0) {
        return Err(Error::Degenerate(reference));
    }
    Ok(with.coeffs[(1, 0)].norm() / reference)
}

/// A prepared photon state with the qubit branch statistics behind it.
#[derive(Debug, Clone)]
pub struct PreparedState {
    pub coherent: CoherentBasisState,
    pub rho: DensityMatrix,
    pub probabilities: BranchProbabilities,
}

/// Builds the photon state for `spec.branch` with the selected imperfections.
pub fn prepare(
    params: &DeviceParams,
    spec: &PrepSpec,
    channels: ErrorChannels,
    cutoff: usize,
) -> Result<PreparedState> {
    spec.validate()?;
    params.validate()?;
    let both = [
        branch_coefficients(params, spec, channels, Branch::Zero)?,
        branch_coefficients(params, spec, channels, Branch::One)?,
    ];
    let (p0, p1) = (both[0].trace(), both[1].trace());
    let total = p0 + p1;
    let probabilities = BranchProbabilities {
        p0: p0 / total,
        p1: p1 / total,
    };
    let b = spec.branch;
    let own = both[b.index()];
    let coherent = if channels.readout {
        let other = both[b.other().index()];
        own.scale(1.0 - params.readout_error(b))
            .add(&other.scale(params.readout_error(b.other())))?
    } else {
        own
    };
    let norm = coherent.trace();
    if !(norm > 1e-300) {
        return Err(Error::Degenerate(norm));
    }
    let coherent = coherent.scale(1.0 / norm);
    let rho = coherent.to_density(cutoff)?;
    Ok(PreparedState {
        coherent,
        rho,
        probabilities,
    })
}

/// State after cavity loss only.
pub fn lossy_state(params: &DeviceParams, spec: &PrepSpec, cutoff: usize) -> Result<DensityMatrix> {
    Ok(prepare(params, spec, ErrorChannels::CAVITY, cutoff)?.rho)
}

/// State after cavity loss and finite qubit lifetime, with branch probabilities.
pub fn lifetime_state(
    params: &DeviceParams,
    spec: &PrepSpec,
    cutoff: usize,
) -> Result<(DensityMatrix, BranchProbabilities)> {
    let p = prepare(params, spec, ErrorChannels::LIFETIME, cutoff)?;
    Ok((p.rho, p.probabilities))
}

/// Full prediction including Bayes mixing from qubit readout errors.
pub fn readout_mixed_state(params: &DeviceParams, spec: &PrepSpec, cutoff: usize) -> Result<DensityMatrix> {
    Ok(prepare(params, spec, ErrorChannels::ALL, cutoff)?.rho)
}
