//! Route planning for a battery-constrained robot in environments with
//! multiple recharging depots.
//!
//! Given a set of task locations, a set of depots and a discharge time
//! budget, the solvers in this crate produce walks that visit every task
//! location while never accumulating more than the budget of travel time
//! between consecutive depot visits. Three solvers are provided:
//!
//! * [`route_approx::approximation_algorithm`] — segment-cover based
//!   routing with provable per-stage bounds,
//! * [`heuristic::heuristic_algorithm`] — a bundling/spanning-forest
//!   refinement that usually produces much cheaper routes,
//! * [`exact`] — a state-space search oracle for desk-scale instances.
//!
//! Instances are read from TSPLIB-style files (see [`instance`]) or
//! synthesized randomly (see [`synth`]). Outputs are plain walks plus a
//! [`walk::SolveReport`], serializable as JSON, and can be rendered as SVG
//! route plots ([`plot`]) or batch-benchmarked into CSV ([`bench`]).

pub mod bench;
pub mod depot_graph;
pub mod error;
pub mod exact;
pub mod heuristic;
pub mod instance;
pub mod plot;
pub mod route_approx;
pub mod segment_cover;
pub mod synth;
pub mod tsp;
pub mod walk;

mod graph;

pub use error::{Error, Result};
pub use instance::{DepotSelection, Instance, NodeId, RawInstance, WeightMode};
pub use walk::{SolveReport, Solution, Step, StepKind, Walk};
