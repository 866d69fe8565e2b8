//! Planners sharing the clearance-penalised edge cost.
//!
//! * [`plan_astar`]: 26-connected A* baseline.
//! * [`plan_lt_full`]: Lazy Theta* with a bounded line of sight, expanding
//!   all 26 neighbours.
//! * [`plan_fs`]: the same search expanding only the neighbours picked by
//!   [`choose_neighbours`], with a single fallback rerun on exhaustion.

mod astar;
mod cost;
mod lazy_theta;
mod los;
mod neighbours;
mod open_list;

use std::fmt;
use std::str::FromStr;
#[cfg(not(target_arch = "wasm32"))]
use std::time::Instant;

use serde::Serialize;
#[cfg(target_arch = "wasm32")]
use web_time::Instant;

pub use astar::plan_astar;
pub use cost::{edge_cost, heuristic};
pub use lazy_theta::{plan_fs, plan_lt_full};
pub use los::{line_of_sight, traverse_segment, Visibility};
pub use neighbours::{choose_neighbours, NeighbourChoice, OFFSETS};

use crate::edf::EdfGrid;
use crate::error::{Error, Result};
use crate::voxmap::{GridCoord, Lattice, OccupancyGrid};

/// Neighbour counts the reduced expansion supports.
pub const FIXED_COUNTS: [u8; 6] = [9, 10, 11, 13, 15, 17];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NeighbourPolicy {
    Full26,
    Fixed(u8),
    /// `near` neighbours while the retreat and goal directions agree (angle
    /// below 90°), `far` otherwise.
    Adaptive { near: u8, far: u8 },
}

impl NeighbourPolicy {
    pub fn validate(self) -> Result<()> {
        let ok = |k: u8| FIXED_COUNTS.contains(&k);
        match self {
            NeighbourPolicy::Full26 => Ok(()),
            NeighbourPolicy::Fixed(k) if ok(k) => Ok(()),
            NeighbourPolicy::Adaptive { near, far } if ok(near) && ok(far) && near < far => Ok(()),
            other => Err(Error::InvalidConfig(format!(
                "neighbour policy {other} not supported; counts must be one of {FIXED_COUNTS:?}"
            ))),
        }
    }
}

impl fmt::Display for NeighbourPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeighbourPolicy::Full26 => f.write_str("full"),
            NeighbourPolicy::Fixed(k) => write!(f, "{k}"),
            NeighbourPolicy::Adaptive { near, far } => write!(f, "{near}-{far}"),
        }
    }
}

impl FromStr for NeighbourPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("cannot parse neighbour policy {s:?}"));
        let policy = match s.trim() {
            "full" | "26" | "all" => NeighbourPolicy::Full26,
            t => match t.split_once('-') {
                Some((a, b)) => NeighbourPolicy::Adaptive {
                    near: a.parse().map_err(|_| bad())?,
                    far: b.parse().map_err(|_| bad())?,
                },
                None => NeighbourPolicy::Fixed(t.parse().map_err(|_| bad())?),
            },
        };
        policy.validate()?;
        Ok(policy)
    }
}

impl Serialize for NeighbourPolicy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlannerConfig {
    /// Weight of the clearance penalty (m³).
    pub c_w: f64,
    /// Longest parent link accepted by the visibility check (m).
    pub max_los: f64,
    pub neighbours: NeighbourPolicy,
    /// Policy for the rerun after the reduced search exhausts its open list.
    pub fallback: NeighbourPolicy,
    pub heuristic_weight: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            c_w: 500.0,
            max_los: 1.0,
            neighbours: NeighbourPolicy::Adaptive { near: 9, far: 11 },
            fallback: NeighbourPolicy::Fixed(17),
            heuristic_weight: 1.0,
        }
    }
}

impl PlannerConfig {
    pub fn with_neighbours(mut self, neighbours: NeighbourPolicy) -> Self {
        self.neighbours = neighbours;
        self
    }

    pub fn validate(&self, resolution: f64) -> Result<()> {
        if !(self.c_w >= 0.0 && self.c_w.is_finite()) {
            return Err(Error::InvalidConfig(format!("c_w must be finite and >= 0, got {}", self.c_w)));
        }
        if !(self.max_los >= resolution) {
            return Err(Error::InvalidConfig(format!(
                "max_los {} must be at least the resolution {resolution}",
                self.max_los
            )));
        }
        if !(self.heuristic_weight >= 1.0 && self.heuristic_weight.is_finite()) {
            return Err(Error::InvalidConfig("heuristic_weight must be >= 1".into()));
        }
        self.neighbours.validate()?;
        if !matches!(self.fallback, NeighbourPolicy::Full26 | NeighbourPolicy::Fixed(17)) {
            return Err(Error::InvalidConfig("fallback must be full or 17".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    AStar,
    LtFull,
    Fs(NeighbourPolicy),
}

impl Algorithm {
    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::AStar => f.write_str("astar"),
            Algorithm::LtFull => f.write_str("lt_full"),
            Algorithm::Fs(p) => write!(f, "fs_{p}"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "astar" | "a*" => Ok(Algorithm::AStar),
            "lt_full" | "lt" | "lazy_theta" => Ok(Algorithm::LtFull),
            t => {
                let policy = t
                    .strip_prefix("fs_")
                    .or_else(|| t.strip_prefix("fs:"))
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm {s:?}")))?;
                Ok(Algorithm::Fs(policy.parse()?))
            }
        }
    }
}

impl Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathResult {
    pub waypoints: Vec<GridCoord>,
    pub total_cost: f64,
    /// Nodes popped from the open list (stale entries excluded).
    pub explored_nodes: usize,
    /// Seconds spent planning.
    pub wall_time: f64,
    pub fallback_used: bool,
}

/// Runs the chosen planner. For [`Algorithm::Fs`] the policy in the
/// algorithm overrides `cfg.neighbours`.
pub fn plan(
    algorithm: Algorithm,
    occ: &OccupancyGrid,
    edf: &EdfGrid,
    cfg: &PlannerConfig,
    start: GridCoord,
    goal: GridCoord,
) -> Result<PathResult> {
    match algorithm {
        Algorithm::AStar => plan_astar(occ, edf, cfg, start, goal),
        Algorithm::LtFull => plan_lt_full(occ, edf, cfg, start, goal),
        Algorithm::Fs(p) => plan_fs(occ, edf, &cfg.with_neighbours(p), start, goal),
    }
}

pub(crate) const NO_PARENT: u32 = u32::MAX;

/// Walks parent links back from `goal` to `start`.
pub fn reconstruct_path(parents: &[u32], lattice: &Lattice, start: GridCoord, goal: GridCoord) -> Result<Vec<GridCoord>> {
    let start_idx = lattice.index(start);
    let mut idx = lattice.index(goal);
    let mut path = vec![goal];
    while idx != start_idx {
        let p = parents[idx];
        if p == NO_PARENT || p as usize == idx || path.len() > parents.len() {
            return Err(Error::BrokenParentChain(lattice.coord(idx)));
        }
        idx = p as usize;
        path.push(lattice.coord(idx));
    }
    path.reverse();
    Ok(path)
}

pub(crate) fn check_query(
    occ: &OccupancyGrid,
    edf: &EdfGrid,
    cfg: &PlannerConfig,
    start: GridCoord,
    goal: GridCoord,
) -> Result<()> {
    if occ.lattice() != edf.lattice() {
        return Err(Error::InvalidConfig("occupancy and distance grids differ in shape".into()));
    }
    cfg.validate(occ.resolution())?;
    for c in [start, goal] {
        if !occ.contains(c) {
            return Err(Error::OutOfBounds);
        }
        if occ.is_occupied(c) {
            return Err(Error::NotFree(c));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voxmap::WorldPoint;

    #[test]
    fn policy_parsing() {
        assert_eq!("9".parse::<NeighbourPolicy>().unwrap(), NeighbourPolicy::Fixed(9));
        assert_eq!(
            "9-11".parse::<NeighbourPolicy>().unwrap(),
            NeighbourPolicy::Adaptive { near: 9, far: 11 }
        );
        assert_eq!("full".parse::<NeighbourPolicy>().unwrap(), NeighbourPolicy::Full26);
        assert!("12".parse::<NeighbourPolicy>().is_err());
        assert!("11-9".parse::<NeighbourPolicy>().is_err());
        assert!("x".parse::<NeighbourPolicy>().is_err());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in [
            Algorithm::AStar,
            Algorithm::LtFull,
            Algorithm::Fs(NeighbourPolicy::Fixed(10)),
            Algorithm::Fs(NeighbourPolicy::Adaptive { near: 11, far: 13 }),
        ] {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("fs:9".parse::<Algorithm>().unwrap(), Algorithm::Fs(NeighbourPolicy::Fixed(9)));
        assert!("dijkstra".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_validation() {
        let cfg = PlannerConfig::default();
        cfg.validate(0.2).unwrap();
        assert!(PlannerConfig { max_los: 0.1, ..cfg }.validate(0.2).is_err());
        assert!(PlannerConfig { c_w: -1.0, ..cfg }.validate(0.2).is_err());
        assert!(PlannerConfig { heuristic_weight: 0.5, ..cfg }.validate(0.2).is_err());
        assert!(PlannerConfig { fallback: NeighbourPolicy::Fixed(9), ..cfg }.validate(0.2).is_err());
        PlannerConfig { fallback: NeighbourPolicy::Full26, ..cfg }.validate(0.2).unwrap();
    }

    #[test]
    fn reconstruct_chains() {
        let l = Lattice::new([3, 1, 1], 1.0, WorldPoint::default()).unwrap();
        let s = GridCoord::new(0, 0, 0);
        let g = GridCoord::new(2, 0, 0);
        let parents = vec![0, NO_PARENT, 0];
        assert_eq!(reconstruct_path(&parents, &l, s, s).unwrap(), vec![s]);
        assert_eq!(reconstruct_path(&parents, &l, s, g).unwrap(), vec![s, g]);
        let broken = vec![0, NO_PARENT, 1];
        assert!(matches!(reconstruct_path(&broken, &l, s, g), Err(Error::BrokenParentChain(_))));
        let cycle = vec![0, 2, 1];
        assert!(reconstruct_path(&cycle, &l, s, g).is_err());
    }
}
