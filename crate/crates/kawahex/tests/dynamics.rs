use kawahex::dynamics::{
    apply_bond, enumerate_moves, random_configuration, replica_seed, run_until, EnergyAudit, Kernel, NoMonitor, Reached, Simulation, Target,
};
use kawahex::energy::{gibbs, hamiltonian};
use kawahex::{Configuration, HexLattice, Params};
use proptest::prelude::*;

#[test]
fn same_seed_same_trajectory() {
    let lat = HexLattice::new(4).unwrap();
    let p = Params::p1(2.0);
    let kernel = Kernel::new(&lat, &p);
    let start = random_configuration(&lat, 0.3, 11);
    let mut a = Simulation::new(&kernel, &start, &p, 5);
    let mut b = Simulation::new(&kernel, &start, &p, 5);
    for _ in 0..200_000 {
        assert_eq!(a.step(), b.step());
    }
    assert_eq!(a.configuration(), b.configuration());
    let mut c = Simulation::new(&kernel, &start, &p, 6);
    for _ in 0..200_000 {
        c.step();
    }
    assert_ne!(a.configuration(), c.configuration());
}

#[test]
fn cached_energy_never_drifts() {
    let lat = HexLattice::new(5).unwrap();
    let p = Params::p2(1.5);
    let kernel = Kernel::new(&lat, &p);
    let mut sim = Simulation::new(&kernel, &random_configuration(&lat, 0.5, 3), &p, 8);
    let mut audit = EnergyAudit {
        params: p,
        mismatches: 0,
        moves: 0,
    };
    let r = sim.run_until(Target::Both, 300_000, &mut audit);
    assert_eq!(audit.mismatches, 0);
    assert!(audit.moves > 1000);
    assert_eq!(sim.energy(), hamiltonian(&lat, &sim.configuration(), &p));
    assert!(r.steps <= 300_000);
}

#[test]
fn particle_count_follows_gibbs_measure() {
    let lat = HexLattice::new(1).unwrap();
    let n = lat.num_sites();
    let p = Params::p1(1.0);
    let mut exact = vec![0.0; n + 1];
    for w in 0..1u64 << n {
        let c = Configuration::from_words(n, &[w]);
        exact[c.count()] += gibbs(&lat, &c, &p);
    }
    let z: f64 = exact.iter().sum();
    let kernel = Kernel::new(&lat, &p);
    let mut sim = Simulation::new(&kernel, &Configuration::empty(&lat), &p, 99);
    let steps = 20_000_000;
    let mut hist = vec![0u64; n + 1];
    for _ in 0..steps {
        sim.step();
        hist[sim.configuration().count()] += 1;
    }
    let tv: f64 = hist
        .iter()
        .zip(&exact)
        .map(|(&h, &e)| (h as f64 / steps as f64 - e / z).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.01, "total variation {tv}");
}

#[test]
fn hitting_from_target_is_immediate() {
    let lat = HexLattice::new(2).unwrap();
    let p = Params::p1(1.0);
    let full = Configuration::full(&lat);
    let r = run_until(&lat, &full, Target::Full, &p, 10, 1, &mut NoMonitor).unwrap();
    assert_eq!((r.steps, r.reached), (0, Reached::Full));
    let r = run_until(&lat, &full, Target::Empty, &p, 10, 1, &mut NoMonitor).unwrap();
    assert_eq!((r.steps, r.reached), (10, Reached::Timeout));
}

#[test]
fn replica_seeds_differ() {
    let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| replica_seed(7, i)).collect();
    assert_eq!(seeds.len(), 1000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moves_account_for_every_bond(seed in any::<u64>(), density in 0.0f64..1.0) {
        let lat = HexLattice::new(4).unwrap();
        let p = Params::p1(1.0);
        let c = random_configuration(&lat, density, seed);
        let changing = lat.oriented_bonds().iter().filter(|b| apply_bond(&c, b) != c).count();
        let moves = enumerate_moves(&lat, &c, &p);
        prop_assert_eq!(moves.iter().map(|t| t.multiplicity).sum::<usize>(), changing);
        for t in &moves {
            let mut next = c.clone();
            t.mv.apply(&mut next);
            t.mv.inverse().apply(&mut next);
            prop_assert_eq!(&next, &c);
        }
    }
}
