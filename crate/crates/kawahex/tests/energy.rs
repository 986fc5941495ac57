mod common;

use common::face_energy;
use kawahex::dynamics::{enumerate_moves, random_configuration};
use kawahex::energy::{critical_quantities, delta_energy, hamiltonian, partition_function, validate_regime};
use kawahex::{Configuration, HexLattice, Params};
use proptest::prelude::*;

#[test]
fn grid_rejects_off_grid_values() {
    assert!(Params::new(1.0, 1.365, 1.0).is_err());
    assert!(Params::with_grid(1.0, 1.365, 1.0, 0.005).is_ok());
    assert_eq!(Params::p1(2.0).units(4.92).unwrap(), 492);
}

#[test]
fn parses_parameter_text() {
    let p = Params::parse_text("# comment\nU = 1\nDelta = 1.39\nbeta=2.5\n").unwrap();
    assert_eq!(p, Params::p2(2.5));
    assert!(Params::parse_text("gamma = 3").is_err());
}

#[test]
fn regime_bounds() {
    assert!(validate_regime(&Params::p1(1.0)).is_ok());
    assert!(validate_regime(&Params::new(1.0, 0.9, 1.0).unwrap()).is_err());
    assert!(validate_regime(&Params::new(1.0, 1.5, 1.0).unwrap()).is_err());
    // Δ = 1.4 makes the critical ratio an integer, Δ = 1.25 puts δ at 1/2
    assert!(validate_regime(&Params::new(1.0, 1.4, 1.0).unwrap()).is_err());
    assert!(validate_regime(&Params::new(1.0, 1.25, 1.0).unwrap()).is_err());
    assert!(critical_quantities(&Params::new(1.0, 1.25, 1.0).unwrap()).is_err());
}

#[test]
fn partition_function_of_the_smallest_lattice() {
    let lat = HexLattice::new(1).unwrap();
    let p = Params::p1(0.7);
    let z: f64 = (0..1u64 << lat.num_sites())
        .map(|w| (-0.7 * p.value(face_energy(&lat, &Configuration::from_words(lat.num_sites(), &[w]), &p))).exp())
        .sum();
    let got = partition_function(&lat, &p).unwrap();
    assert!((got - z).abs() < 1e-9 * z);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn hamiltonian_matches_face_count(seed in any::<u64>(), density in 0.0f64..1.0, l in 1i64..7) {
        let lat = HexLattice::new(l).unwrap();
        let p = Params::p2(1.0);
        let c = random_configuration(&lat, density, seed);
        prop_assert_eq!(hamiltonian(&lat, &c, &p), face_energy(&lat, &c, &p));
    }

    // about 250 moves per case, so well over 10⁵ checked moves
    #[test]
    fn local_delta_matches_recompute(seed in any::<u64>(), density in 0.05f64..0.95) {
        let lat = HexLattice::new(6).unwrap();
        let p = Params::p1(1.0);
        let c = random_configuration(&lat, density, seed);
        let h = hamiltonian(&lat, &c, &p);
        for t in enumerate_moves(&lat, &c, &p) {
            let mut next = c.clone();
            t.mv.apply(&mut next);
            let dh = delta_energy(&lat, &c, &t.mv, &p).unwrap();
            prop_assert_eq!(dh, hamiltonian(&lat, &next, &p) - h);
            prop_assert_eq!(dh, t.dh);
        }
    }
}
