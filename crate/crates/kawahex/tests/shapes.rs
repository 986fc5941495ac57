mod common;

use std::collections::HashSet;

use common::shape_energy;
use kawahex::hexlattice::Symmetry;
use kawahex::shapes::{
    bar_faces, bar_size, canonical_shape, closed_form_energy, d_tilde_faces, decompose_area, quasi_regular_area, quasi_regular_faces, regular_faces,
    s_tilde_faces, standard_faces, ShapeSpec,
};
use kawahex::{FaceCoord, Params};
use proptest::prelude::*;

/// Least perimeter of an A-triangle polyiamond: 2⌈(A + √(6A))/2⌉ − A.
fn min_perimeter(a: usize) -> usize {
    let half = (a as f64 + (6.0 * a as f64).sqrt()) / 2.0;
    2 * (half - 1e-9).ceil() as usize - a
}

fn connected(faces: &[FaceCoord]) -> bool {
    let set: HashSet<FaceCoord> = faces.iter().copied().collect();
    let mut seen = HashSet::from([faces[0]]);
    let mut stack = vec![faces[0]];
    while let Some(f) = stack.pop() {
        for g in f.neighbors() {
            if set.contains(&g) && seen.insert(g) {
                stack.push(g);
            }
        }
    }
    seen.len() == set.len()
}

#[test]
fn regular_and_quasi_regular_areas() {
    for r in 1..=6u32 {
        assert_eq!(regular_faces(r).len(), 6 * (r * r) as usize);
        for i in 0..=6 {
            assert_eq!(quasi_regular_faces(r, i).len(), quasi_regular_area(r, i));
        }
        assert_eq!(quasi_regular_area(r, 6), 6 * ((r + 1) * (r + 1)) as usize);
        let sizes: Vec<usize> = (1..=6).map(|m| bar_size(r, m)).collect();
        let r = r as usize;
        assert_eq!(sizes, vec![2 * r - 1, 2 * r + 1, 2 * r + 1, 2 * r + 1, 2 * r + 1, 2 * r + 3]);
    }
}

#[test]
fn bars_fill_the_next_hexagon() {
    for r in 1..=4u32 {
        for m in 1..=6 {
            let inner: HashSet<FaceCoord> = quasi_regular_faces(r, m - 1).into_iter().collect();
            let bar = bar_faces(r, m);
            assert_eq!(bar.len(), bar_size(r, m));
            assert!(bar.iter().all(|f| !inner.contains(f)));
            let mut all: Vec<FaceCoord> = inner.into_iter().chain(bar).collect();
            all.sort();
            let mut next = quasi_regular_faces(r, m);
            next.sort();
            assert_eq!(all, next);
        }
    }
}

#[test]
fn standard_shapes_have_least_perimeter() {
    let p = Params::p1(1.0);
    for a in 1..=300 {
        let faces = standard_faces(a);
        assert_eq!(faces.len(), a);
        assert!(connected(&faces), "S({a}) is disconnected");
        let bonds = (3 * a - min_perimeter(a)) / 2;
        let best = p.delta * a as i64 - p.u * bonds as i64;
        assert_eq!(shape_energy(&faces, &p), best, "A={a}");
        assert_eq!(closed_form_energy(a, &p), best, "A={a}");
    }
}

#[test]
fn area_decomposition_is_consistent() {
    for a in 6..=400 {
        let (r, i, k) = decompose_area(a);
        assert_eq!(quasi_regular_area(r, i) + k, a);
        assert!(i < 6 && k < bar_size(r, i + 1));
    }
}

#[test]
fn protocritical_shapes() {
    let p = Params::p1(1.0);
    for a in [21, 29, 56] {
        for faces in [s_tilde_faces(a).unwrap(), d_tilde_faces(a).unwrap()] {
            assert_eq!(faces.len(), a);
            assert!(connected(&faces));
            assert_eq!(shape_energy(&faces, &p), shape_energy(&standard_faces(a), &p));
        }
    }
    assert!(s_tilde_faces(22).is_err());
}

#[test]
fn shape_spec_roundtrip() {
    for s in ["E(2)", "EB(1,4)", "S(21)", "St(21)", "Dt(29)", "B(3)", "IB(3,2)", "EB(2,1)@3m+1,-2"] {
        let spec: ShapeSpec = s.parse().unwrap();
        assert_eq!(spec.to_string(), s);
    }
    for bad in ["E2", "EB(1,7)", "Q(3)", "S(3)@9", "S(3)x"] {
        assert!(bad.parse::<ShapeSpec>().is_err(), "{bad}");
    }
}

proptest! {
    #[test]
    fn canonical_shape_is_symmetry_invariant(a in 1usize..80, sym in 0usize..12, di in -5i32..5, dj in -5i32..5) {
        let s = Symmetry::all().nth(sym).unwrap();
        let faces = standard_faces(a);
        let moved: Vec<FaceCoord> = faces.iter().map(|f| f.transform(s).translate(di, dj)).collect();
        prop_assert_eq!(canonical_shape(&moved), canonical_shape(&faces));
    }
}
