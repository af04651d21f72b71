use std::f64::consts::PI;

use catstate::budget::{budget_point, budget_sweep, SweepAxis};
use catstate::device::{linspace, Branch, DeviceParams};
use catstate::protocol::PrepSpec;

#[test]
fn readout_infidelity_is_flat_in_xi() {
    let p = DeviceParams::reference();
    let rows = budget_sweep(&p, &PrepSpec::default(), SweepAxis::Xi, &SweepAxis::Xi.default_grid(), 11).unwrap();
    for b in Branch::BOTH {
        let vals: Vec<f64> = rows.iter().filter(|r| r.branch == b).map(|r| r.infidelity_readout).collect();
        let spread = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 0.05, "{b}: {spread}");
    }
}

#[test]
fn qubit_errors_hurt_less_without_superposition() {
    let p = DeviceParams::reference();
    for b in Branch::BOTH {
        let at = |xi| {
            let spec = PrepSpec { xi, ..PrepSpec::default() }.with_branch(b);
            budget_point(&p, &spec, SweepAxis::Xi, xi, 11).unwrap().infidelity_qubit
        };
        assert!(at(0.0) < at(PI / 2.0), "{b}");
    }
}

fn alpha_fidelities(branch: Branch, grid: &[f64]) -> Vec<f64> {
    let p = DeviceParams::reference();
    budget_sweep(&p, &PrepSpec::default(), SweepAxis::Alpha, grid, 11)
        .unwrap()
        .into_iter()
        .filter(|r| r.branch == branch)
        .map(|r| r.fidelity_total)
        .collect()
}

#[test]
fn even_fidelity_falls_with_cat_size() {
    let f = alpha_fidelities(Branch::Zero, &linspace(0.8, 1.3, 11));
    assert!(f.windows(2).all(|w| w[1] < w[0]), "{f:?}");
}

#[test]
fn odd_fidelity_peaks_near_unit_size() {
    // the odd branch is heralded with probability ~1 - exp(-2α²), so at small α
    // qubit and readout errors from the even branch are amplified
    let f = alpha_fidelities(Branch::One, &linspace(1.0, 1.3, 7));
    assert!(f.windows(2).all(|w| w[1] < w[0]), "{f:?}");
    let small = alpha_fidelities(Branch::One, &[0.8, 0.9]);
    assert!(small[0] < small[1], "{small:?}");
}

#[test]
fn cavity_loss_dominates_at_working_point() {
    let p = DeviceParams::reference();
    for spec in [PrepSpec::even_cat(1.07), PrepSpec::odd_cat(1.07)] {
        let r = budget_point(&p, &spec, SweepAxis::Alpha, 1.07, 11).unwrap();
        assert!(r.infidelity_cavity > r.infidelity_qubit && r.infidelity_cavity > r.infidelity_readout);
    }
}
