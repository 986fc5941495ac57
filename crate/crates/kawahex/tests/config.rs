use std::collections::{BTreeSet, HashSet};

use kawahex::config::{boundary_walks, clusters, free_particles, holes, interacting, interior_bond_count};
use kawahex::dynamics::random_configuration;
use kawahex::shapes::{place_faces, regular_faces};
use kawahex::{Configuration, FaceCoord, HexLattice};
use proptest::prelude::*;

/// Components of occupied interior sites with at least one occupied
/// interior neighbour, by repeated set merging on the bond list.
fn oracle_clusters(lat: &HexLattice, c: &Configuration) -> BTreeSet<Vec<usize>> {
    let mut comps: Vec<BTreeSet<usize>> = Vec::new();
    for &(x, y) in lat.interior_bonds() {
        if !(c.get(x) && c.get(y)) {
            continue;
        }
        let hits: Vec<usize> = (0..comps.len()).filter(|&i| comps[i].contains(&x) || comps[i].contains(&y)).collect();
        let mut merged = BTreeSet::from([x, y]);
        for &i in hits.iter().rev() {
            merged.extend(comps.swap_remove(i));
        }
        comps.push(merged);
    }
    comps.into_iter().map(|s| s.into_iter().collect()).collect()
}

#[test]
fn ring_has_one_hole() {
    let lat = HexLattice::new(4).unwrap();
    let mut faces = regular_faces(2);
    let inner: HashSet<FaceCoord> = regular_faces(1).into_iter().collect();
    faces.retain(|f| !inner.contains(f));
    let c = place_faces(&faces, &lat).unwrap();
    let cl = clusters(&lat, &c);
    assert_eq!(cl.len(), 1);
    assert_eq!(cl[0].holes(&lat).len(), 1);
    assert_eq!(cl[0].holes(&lat)[0].len(), 6);
    let walks = boundary_walks(&faces);
    assert_eq!(walks.iter().filter(|w| w.external).count(), 1);
    assert!(walks.iter().all(|w| w.turning() == if w.external { 6 } else { -6 }));
    assert!(holes(&regular_faces(3)).is_empty());
}

#[test]
fn interacting_needs_distance_two() {
    let lat = HexLattice::new(8).unwrap();
    let a = regular_faces(1);
    let sep = |di: i32| {
        let b: Vec<FaceCoord> = a.iter().map(|f| f.translate(di, 0)).collect();
        let faces: Vec<FaceCoord> = a.iter().chain(&b).copied().collect();
        let c = place_faces(&faces, &lat).unwrap();
        let cl = clusters(&lat, &c);
        (
            cl.len(),
            if cl.len() == 2 {
                interacting(&lat, &cl[0], &cl[1]).unwrap()
            } else {
                false
            },
        )
    };
    // two unit hexagons two columns apart touch at a vertex across one empty triangle
    let outcomes: Vec<(usize, bool)> = (2..=5).map(sep).collect();
    assert!(outcomes.contains(&(2, true)), "{outcomes:?}");
    assert!(outcomes.contains(&(2, false)), "{outcomes:?}");
    let cl = clusters(&lat, &place_faces(&a, &lat).unwrap());
    assert!(interacting(&lat, &cl[0], &cl[0]).is_err());
}

proptest! {
    #[test]
    fn hex_and_json_roundtrip(seed in any::<u64>(), density in 0.0f64..1.0, l in 1i64..8) {
        let lat = HexLattice::new(l).unwrap();
        let c = random_configuration(&lat, density, seed);
        prop_assert_eq!(&Configuration::from_hex(&lat, &c.to_hex()).unwrap(), &c);
        let json = serde_json::to_string(&c.to_json(&lat)).unwrap();
        let back = Configuration::from_json(&lat, &serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn clusters_partition_the_bonded_particles(seed in any::<u64>(), density in 0.0f64..1.0) {
        let lat = HexLattice::new(6).unwrap();
        let c = random_configuration(&lat, density, seed);
        let cl = clusters(&lat, &c);
        let got: BTreeSet<Vec<usize>> = cl.iter().map(|k| k.sites.clone()).collect();
        prop_assert_eq!(&got, &oracle_clusters(&lat, &c));
        prop_assert_eq!(cl.iter().map(|k| k.bonds).sum::<usize>(), interior_bond_count(&lat, &c));
        let in_clusters: usize = cl.iter().map(|k| k.area()).sum();
        prop_assert_eq!(in_clusters + free_particles(&lat, &c).len(), c.count());
        for k in &cl {
            let faces = k.faces(&lat);
            let edges: usize = boundary_walks(&faces).iter().map(|w| w.len()).sum();
            prop_assert_eq!(edges, k.perimeter());
        }
    }
}
