use thiserror::Error;

use crate::config::Configuration;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice radius must be at least 1, got {0}")]
    InvalidRadius(i64),

    #[error("site id {0} is not part of the lattice")]
    UnknownSite(usize),

    #[error("shape does not fit inside the interior hexagon: {0}")]
    Placement(String),

    #[error("parameters outside the metastable regime: {0}")]
    Regime(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("energy grid cannot represent {name}={value} with unit {grid}")]
    GridTooCoarse { name: &'static str, value: f64, grid: f64 },

    #[error("move is not applicable: {0}")]
    InapplicableMove(String),

    #[error("lattice with {sites} sites is too large for exact enumeration (limit {limit})")]
    EnumerationTooLarge { sites: usize, limit: usize },

    #[error("exploration cap of {cap} states exceeded after {explored} states")]
    CapExceeded { cap: usize, explored: usize },

    #[error("clusters overlap")]
    OverlappingClusters,

    #[error("no reducing path construction applies to configuration {}", .0.to_hex())]
    Unclassified(Box<Configuration>),

    #[error("cannot parse {what}: {input}")]
    Parse { what: &'static str, input: String },

    #[error("lattice mismatch: configuration has {got} sites, lattice has {expected}")]
    LatticeMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
