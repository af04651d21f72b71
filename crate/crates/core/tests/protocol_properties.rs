use std::f64::consts::PI;

use catstate::device::{Branch, DeviceParams};
use catstate::fock::{fidelity_pure, trace_distance};
use catstate::protocol::{ideal_cat, prepare, ErrorChannels, PrepSpec};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = PrepSpec> {
    (0.5f64..1.5, 0.0f64..(PI / 2.0), 0.0f64..PI, prop::bool::ANY).prop_map(|(alpha, xi, theta, one)| PrepSpec {
        alpha,
        xi,
        theta,
        branch: if one { Branch::One } else { Branch::Zero },
        ..PrepSpec::default()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prepared_states_are_physical(spec in spec_strategy()) {
        let p = DeviceParams::reference();
        let prep = prepare(&p, &spec, ErrorChannels::ALL, 11).unwrap();
        prep.rho.validate().unwrap();
        prop_assert!((prep.rho.trace() - 1.0).abs() < 1e-12);
        prop_assert!((prep.probabilities.p0 + prep.probabilities.p1 - 1.0).abs() < 1e-12);
        prop_assert!(prep.rho.purity() <= 1.0 + 1e-12);
    }

    #[test]
    fn ideal_device_reproduces_target(spec in spec_strategy()) {
        let p = DeviceParams::reference();
        let rho = prepare(&p, &spec, ErrorChannels::NONE, 11).unwrap().rho;
        let f = fidelity_pure(&rho, &ideal_cat(&spec, 11).unwrap()).unwrap();
        prop_assert!((f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn perfect_readout_adds_nothing(spec in spec_strategy()) {
        let p = DeviceParams::reference().without_readout_error();
        let with = prepare(&p, &spec, ErrorChannels::ALL, 11).unwrap().rho;
        let without = prepare(&p, &spec, ErrorChannels::LIFETIME, 11).unwrap().rho;
        prop_assert!(trace_distance(&with, &without).unwrap() < 1e-12);
    }
}

#[test]
fn even_and_odd_cats_have_definite_parity() {
    let p = DeviceParams::reference();
    for (spec, parity) in [(PrepSpec::even_cat(1.07), 0), (PrepSpec::odd_cat(1.07), 1)] {
        let rho = prepare(&p, &spec, ErrorChannels::NONE, 11).unwrap().rho;
        let wrong: f64 = rho.populations().iter().skip(1 - parity).step_by(2).sum();
        assert!(wrong < 1e-12, "{wrong}");
    }
}
