#![allow(dead_code)]

use catstate::fock::DensityMatrix;
use catstate::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Random full-rank state `G G† / Tr` from `2·d²` uniform reals.
pub fn state_from(raw: &[f64], cutoff: usize) -> DensityMatrix {
    let d = cutoff + 1;
    let g = DMatrix::from_fn(d, d, |i, j| C64::new(raw[2 * (i * d + j)], raw[2 * (i * d + j) + 1]));
    let m = &g * g.adjoint();
    let t = m.trace().re;
    DensityMatrix::from_matrix(m.unscale(t)).unwrap()
}

pub fn random_state(cutoff: usize) -> impl Strategy<Value = DensityMatrix> {
    let d = cutoff + 1;
    proptest::collection::vec(-1.0f64..1.0, 2 * d * d).prop_map(move |raw| state_from(&raw, cutoff))
}

/// Random unitary from the QR factor of a random complex matrix.
pub fn unitary_from(raw: &[f64], d: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |i, j| C64::new(raw[2 * (i * d + j)], raw[2 * (i * d + j) + 1]));
    g.qr().q()
}
