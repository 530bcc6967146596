//! Construction of the DCell network `D_{k,n}` and packing of internally
//! disjoint Steiner paths through any three of its vertices.
//!
//! The packer builds `floor((2n + 3k) / 4)` paths for every triple when
//! `n >= 6`. Every packing can be checked with [`verify::check_packing`],
//! and [`oracle`] gives exact answers on small instances.

pub mod cli;
pub mod error;
pub mod graphcore;
pub mod oracle;
pub mod packer;
pub mod topology;
pub mod verify;

pub use error::{Error, Result};
pub use graphcore::{Graph, Path};
pub use packer::{Packing, SteinerTriple};
pub use topology::{Coord, DCellParams};
