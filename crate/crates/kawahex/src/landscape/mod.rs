//! Exact and bounded analysis of the energy landscape: communication
//! heights, stability levels, cycles, the reference path, the gate set and
//! constructive reducing paths.

mod gate;
mod path;
mod reducing;
mod refpath;
mod search;

pub use gate::{gate_set, GateSet};
pub use path::{PathBuilder, PathRecord};
pub use reducing::{classify, reducing_path, Reduction, StructureClass};
pub use refpath::{reference_path, reference_targets, segment_max, Direction, SegmentMax};
pub use search::{
    communication_height, communication_height_avoiding, cycle, stability_level, CycleResult, LandscapeResult, SearchOptions, StabilityResult,
    SymmetryTable, DEFAULT_CAP,
};
