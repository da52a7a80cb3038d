//! Seeded simulation of slime-mould growth routed by volatile chemicals
//! through agar channel junctions and across open dishes.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] builds the arenas and their named zones,
//! * [`chemistry`] diffuses pad-emitted vapour and forms the signed stimulus,
//! * [`plasmodium`] moves the trail-laying agent swarm,
//! * [`experiments`] runs trials, classifies outcomes and aggregates
//!   Monte Carlo reports,
//! * [`frames`] writes PGM snapshots, and [`cli`] drives it all from JSON
//!   run configs.

pub mod chemistry;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod frames;
pub mod geometry;
pub mod plasmodium;

pub use error::{ChemistryError, CliError, GeometryError, SimError, SwarmError};
