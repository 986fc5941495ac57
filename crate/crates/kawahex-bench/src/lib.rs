//! Benchmark fixtures shared by the criterion benches.

use kawahex::dynamics::random_configuration;
use kawahex::experiments::StartSpec;
use kawahex::{Configuration, HexLattice};

/// The L = 6 lattice used by the acceptance runs.
pub fn lattice() -> HexLattice {
    HexLattice::new(6).expect("radius 6 is valid")
}

/// A supercritical droplet, the typical state of a long low-temperature run.
pub fn droplet(lat: &HexLattice) -> Configuration {
    "EB(2,1)"
        .parse::<StartSpec>()
        .and_then(|s| s.build(lat, 0))
        .expect("EB(2,1) fits in L = 6")
}

/// A half-filled random configuration with many small clusters.
pub fn gas(lat: &HexLattice) -> Configuration {
    random_configuration(lat, 0.5, 1)
}
