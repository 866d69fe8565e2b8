//! Fast and safe 3D any-angle planning over Euclidean distance fields.
//!
//! The crate is organised bottom-up:
//!
//! * [`voxmap`] holds occupancy lattices, scenario generators, point-cloud
//!   ingestion and the `.vxm` map format.
//! * [`edf`] computes exact Euclidean distance fields and the segment
//!   clearance integral used by the planners' cost.
//! * [`search`] contains the planners: an A* baseline, a bounded
//!   line-of-sight Lazy Theta* that expands all 26 neighbours, and the
//!   gradient-guided variant that expands only a subset.
//! * [`metrics`] evaluates paths and runs seeded benchmark suites.
//! * [`verify`] hosts independent oracles and property checks of the
//!   distance-field bounds the planners rely on.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod edf;
pub mod error;
pub mod metrics;
pub mod search;
pub mod verify;
pub mod voxmap;

pub use edf::{compute_edf, EdfGrid, SegmentCost};
pub use error::{Error, Result};
pub use search::{
    plan, plan_astar, plan_fs, plan_lt_full, Algorithm, NeighbourPolicy, PathResult,
    PlannerConfig,
};
pub use voxmap::{GridCoord, OccupancyGrid, Scenario, ScenarioKind, WorldPoint};
