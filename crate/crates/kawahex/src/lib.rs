//! Kawasaki dynamics of the Ising lattice gas on a finite hexagonal lattice
//! with open boundary, together with exact analysis of its energy landscape.

pub mod config;
pub mod dynamics;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod hexlattice;
pub mod landscape;
pub mod shapes;

pub use config::Configuration;
pub use energy::{Energy, Params};
pub use error::{Error, Result};
pub use hexlattice::{FaceCoord, HexLattice, SiteId};
