//! The reference path from □ to ■ that grows standard droplets one triangle
//! at a time, and the per-bar maxima along it.

use serde::{Deserialize, Serialize};

use super::path::{PathBuilder, PathRecord};
use crate::config::Configuration;
use crate::energy::{Energy, Params};
use crate::error::{Error, Result};
use crate::hexlattice::{FaceCoord, HexLattice};
use crate::shapes::{bar_faces, bar_size, place_faces, quasi_regular_faces};

/// Interior faces in the order the reference path fills them: the ring of
/// E(1), then for each radius the six bars clockwise.
pub fn reference_targets(lat: &HexLattice) -> Vec<FaceCoord> {
    let mut out = bar_faces(0, 1);
    for r in 1..lat.radius() {
        for m in 1..=6 {
            out.extend(bar_faces(r, m));
        }
    }
    out
}

/// ω*: every triangle of `reference_targets` is created at the nearest
/// boundary site and walked to its place through empty sites.
pub fn reference_path(lat: &HexLattice, p: &Params) -> Result<PathRecord> {
    let mut b = PathBuilder::new(lat, p, &Configuration::empty(lat));
    for f in reference_targets(lat) {
        let x = lat.site(&f).ok_or_else(|| Error::Placement(format!("{f:?} is not a lattice face")))?;
        b.bring_in(x)?;
    }
    Ok(b.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// From E_{B_i}(r) to E_{B_{i+1}}(r), attaching triangles in fill order.
    Growth,
    /// From E_{B_i}(r) to E_{B_{i−1}}(r), detaching in reverse fill order.
    Removal,
}

/// Location and height of the highest state on one bar segment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentMax {
    /// Triangles already attached (growth) or already removed (removal)
    /// when the maximum is first reached.
    pub index: usize,
    pub energy: Energy,
    /// Maximum of each single-particle phase, relative to the segment start.
    pub phases: Vec<Energy>,
}

/// Scans the segment of the reference path that adds bar `B_{i+1}` to
/// E_{B_i}(r) (growth, `i ≤ 5`) or strips bar `B_i` from E_{B_i}(r)
/// (removal, `1 ≤ i ≤ 6`).
pub fn segment_max(r: u32, i: usize, p: &Params, direction: Direction) -> Result<SegmentMax> {
    let valid = match direction {
        Direction::Growth => i <= 5,
        Direction::Removal => (1..=6).contains(&i),
    };
    if r == 0 || !valid {
        return Err(Error::Placement(format!("no {direction:?} segment for r={r}, i={i}")));
    }
    let lat = HexLattice::new(r as i64 + 3)?;
    let start = place_faces(&quasi_regular_faces(r, i), &lat)?;
    let mut b = PathBuilder::new(&lat, p, &start);
    let h0 = b.energy();
    let mut phases = Vec::new();
    match direction {
        Direction::Growth => {
            for f in bar_faces(r, i + 1) {
                let mark = b.len();
                b.bring_in(lat.site(&f).expect("fits"))?;
                phases.push(b.record().energies[mark..].iter().copied().max().expect("moves were made") - h0);
            }
        }
        Direction::Removal => {
            let bar = bar_faces(r, i);
            debug_assert_eq!(bar.len(), bar_size(r, i));
            for f in bar.iter().rev() {
                let mark = b.len();
                b.take_out(lat.site(f).expect("fits"))?;
                phases.push(b.record().energies[mark..].iter().copied().max().expect("moves were made") - h0);
            }
        }
    }
    let top = *phases.iter().max().expect("bars are non-empty");
    let index = phases.iter().position(|&e| e == top).expect("maximum exists");
    Ok(SegmentMax {
        index,
        energy: top + h0,
        phases,
    })
}
