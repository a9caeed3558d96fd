//! Exact capacity analysis for combinatorial mobile sensor networks.
//!
//! A network is a sequence of pairwise meetings between `n` sensors. Geometric
//! networks come from lines in the plane: sensors are lines and meetings are
//! crossings ordered by `x`. The crate computes exact capacities, builds extremal
//! line arrangements, estimates expected capacities by seeded simulation, and
//! decides whether a network can be drawn with straight lines using few slopes.

pub mod constructions;
pub mod formulas;
pub mod geometry;
pub mod lp;
pub mod montecarlo;
pub mod network;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod rational;
pub mod realize;
pub mod rng;
pub mod wiring;

pub mod cli;

pub use geometry::{Arrangement, Line, Slope, TiePolicy};
pub use network::{CapacityReport, Cmsn, Kind, Packet};
pub use rational::Rational;
