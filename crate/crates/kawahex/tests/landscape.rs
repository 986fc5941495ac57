use kawahex::dynamics::random_configuration;
use kawahex::energy::{critical_quantities, hamiltonian};
use kawahex::landscape::{classify, communication_height, cycle, gate_set, reducing_path, stability_level, SearchOptions, StructureClass};
use kawahex::shapes::{build_shape, place_faces, s_tilde_faces, standard_faces, ShapeSpec};
use kawahex::{Configuration, HexLattice, Params};
use proptest::prelude::*;

fn shape(lat: &HexLattice, s: &str) -> Configuration {
    build_shape(&s.parse::<ShapeSpec>().unwrap(), lat).unwrap()
}

#[test]
fn classes_of_hexagons() {
    let lat = HexLattice::new(6).unwrap();
    let p = Params::p1(1.0);
    assert_eq!(classify(&lat, &p, &shape(&lat, "EB(1,4)")).unwrap(), StructureClass::Z1);
    assert_eq!(classify(&lat, &p, &shape(&lat, "E(2)")).unwrap(), StructureClass::Z2);
    let mut c = shape(&lat, "E(1)");
    c.set(lat.inner_boundary()[0], true);
    assert_eq!(classify(&lat, &p, &c).unwrap(), StructureClass::FreeParticle);
}

#[test]
fn standard_shapes_reduce_at_both_points() {
    let lat = HexLattice::new(6).unwrap();
    for p in [Params::p1(1.0), Params::p2(1.0)] {
        for a in 1..=60 {
            let sigma = place_faces(&standard_faces(a), &lat).unwrap();
            let red = reducing_path(&lat, &p, &sigma, 2_000_000).unwrap();
            red.path.validate(&lat, &p).unwrap();
            red.path.reversed().validate(&lat, &p).unwrap();
            assert!(red.max_excess <= p.delta + p.u, "A={a}: excess {}", p.value(red.max_excess));
            assert!(red.drop > 0);
            assert_eq!(red.path.max_energy() - hamiltonian(&lat, &sigma, &p), red.max_excess);
        }
    }
}

#[test]
fn symmetry_quotient_agrees_on_invariant_endpoints() {
    let lat = HexLattice::new(2).unwrap();
    let p = Params::p1(1.0);
    let (e, f) = (Configuration::empty(&lat), Configuration::full(&lat));
    let plain = communication_height(&lat, &p, &e, &f, SearchOptions::default()).unwrap();
    let quot = communication_height(&lat, &p, &e, &f, SearchOptions::default().with_symmetry(true)).unwrap();
    assert!(plain.complete && quot.complete);
    assert_eq!(plain.value, quot.value);
    assert!(quot.explored < plain.explored);
}

#[test]
fn cutoff_certifies_a_lower_bound() {
    let lat = HexLattice::new(2).unwrap();
    let p = Params::p1(1.0);
    let (e, f) = (Configuration::empty(&lat), Configuration::full(&lat));
    let phi = communication_height(&lat, &p, &e, &f, SearchOptions::default()).unwrap().value.unwrap();
    let r = communication_height(&lat, &p, &e, &f, SearchOptions::default().with_cutoff(phi)).unwrap();
    assert_eq!(r.value, None);
    assert!(r.lower_bound >= phi);
}

#[test]
fn gate_contains_the_protocritical_shape() {
    let lat = HexLattice::new(6).unwrap();
    let p = Params::p1(1.0);
    let cq = critical_quantities(&p).unwrap();
    let gate = gate_set(&lat, &p, true, 10_000_000).unwrap();
    assert!(!gate.is_empty());
    let st = s_tilde_faces(cq.a_star - 1).unwrap();
    assert!(gate.shape_in_k(&st));
    assert!(gate.in_k(&place_faces(&st, &lat).unwrap()));
    assert!(!gate.shape_in_k(&standard_faces(cq.a_star)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn communication_height_is_symmetric(s1 in any::<u64>(), s2 in any::<u64>()) {
        let lat = HexLattice::new(1).unwrap();
        let p = Params::p2(1.0);
        let a = random_configuration(&lat, 0.5, s1);
        let b = random_configuration(&lat, 0.5, s2);
        let ab = communication_height(&lat, &p, &a, &b, SearchOptions::default()).unwrap();
        let ba = communication_height(&lat, &p, &b, &a, SearchOptions::default()).unwrap();
        prop_assert_eq!(ab.value, ba.value);
        let v = ab.value.unwrap();
        prop_assert!(v >= hamiltonian(&lat, &a, &p).max(hamiltonian(&lat, &b, &p)));
        let w = ab.witness.unwrap();
        prop_assert!(w.validate(&lat, &p).is_ok());
        prop_assert_eq!(w.max_energy(), v);
    }

    #[test]
    fn cycles_hold_their_seed(s in any::<u64>(), extra in 1i64..300) {
        let lat = HexLattice::new(1).unwrap();
        let p = Params::p1(1.0);
        let sigma = random_configuration(&lat, 0.5, s);
        let h = hamiltonian(&lat, &sigma, &p);
        let c = cycle(&lat, &p, &sigma, h + extra, SearchOptions::default()).unwrap();
        prop_assert!(c.contains(&sigma));
        prop_assert!(c.min_energy() <= h);
        prop_assert!(c.members().all(|(_, e)| e < h + extra));
        let v = stability_level(&lat, &p, &sigma, SearchOptions::default()).unwrap();
        if let Some(level) = v.level.filter(|&l| l > 0) {
            // σ's cycle below H(σ)+V_σ cannot contain anything lower than σ
            let inner = cycle(&lat, &p, &sigma, h + level, SearchOptions::default()).unwrap();
            prop_assert_eq!(inner.min_energy(), h);
        }
    }
}
