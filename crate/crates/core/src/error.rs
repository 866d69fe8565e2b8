use std::io;

use thiserror::Error;

use crate::voxmap::GridCoord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point or coordinate lies outside the lattice")]
    OutOfBounds,
    #[error("grid dimensions {dims:?} too small, need at least {min} voxels per axis")]
    DimsTooSmall { dims: [usize; 3], min: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("point cloud contains no points")]
    EmptyPointCloud,
    #[error("no valid start/goal pair found")]
    NoValidPair,
    #[error("obstacle set is empty")]
    EmptyObstacleSet,
    #[error("{to:?} is not a 26-neighbour of {from:?}")]
    NotNeighbour { from: GridCoord, to: GridCoord },
    #[error("segment has zero length")]
    ZeroLengthSegment,
    #[error("segment endpoint {0:?} lies on an obstacle")]
    EndpointOccupied(GridCoord),
    #[error("quadrature needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
    #[error("{0:?} is not a free voxel")]
    NotFree(GridCoord),
    #[error("no path found")]
    NoPath { explored_nodes: usize, fallback_used: bool },
    #[error("broken parent chain at {0:?}")]
    BrokenParentChain(GridCoord),
    #[error("bad file format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}
