//! Distance fields for `.vxm` maps, cached on disk by content hash.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use edf_planner::{compute_edf, EdfGrid, Error, OccupancyGrid};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const CACHE_ENV: &str = "EDF_PLANNER_CACHE_DIR";

pub fn cache_dir() -> PathBuf {
    env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| env::temp_dir().join("edf-planner-cache"))
}

pub struct LoadedMap {
    pub grid: OccupancyGrid,
    pub digest: String,
}

pub fn load_map(path: &Path) -> Result<LoadedMap> {
    let bytes = fs::read(path).map_err(CliError::io(path))?;
    let digest = format!("{:x}", Sha256::digest(&bytes));
    let grid = OccupancyGrid::read_vxm(bytes.as_slice())?;
    Ok(LoadedMap { grid, digest })
}

/// Distance field for `grid`; an obstacle-free map gets a uniform field equal
/// to the lattice's largest extent.
pub fn fresh_edf(grid: &OccupancyGrid) -> Result<EdfGrid> {
    match compute_edf(grid) {
        Err(Error::EmptyObstacleSet) => {
            let l = *grid.lattice();
            let extent = l.dims.iter().copied().max().unwrap_or(1) as f64 * l.resolution;
            Ok(EdfGrid::uniform(l, extent)?)
        }
        other => Ok(other?),
    }
}

/// Returns the EDF from `explicit` if given, else from the cache, computing
/// and storing it on a miss. Files whose lattice disagrees with the map are
/// rejected (explicit) or replaced (cache).
pub fn edf_for(map: &LoadedMap, explicit: Option<&Path>) -> Result<EdfGrid> {
    if let Some(p) = explicit {
        let edf = EdfGrid::load(p)?;
        if edf.lattice() != map.grid.lattice() {
            return Err(CliError::Usage(format!("{} does not match the map's lattice", p.display())));
        }
        return Ok(edf);
    }
    let dir = cache_dir();
    let path = dir.join(format!("{}.edf", map.digest));
    if let Ok(edf) = EdfGrid::load(&path) {
        if edf.lattice() == map.grid.lattice() {
            return Ok(edf);
        }
    }
    let edf = fresh_edf(&map.grid)?;
    if fs::create_dir_all(&dir).is_ok() {
        let tmp = dir.join(format!("{}.edf.{}", map.digest, std::process::id()));
        if edf.save(&tmp).is_ok() {
            let _ = fs::rename(&tmp, &path);
        }
    }
    Ok(edf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use edf_planner::{GridCoord, WorldPoint};

    #[test]
    fn empty_map_gets_uniform_field() {
        let g = OccupancyGrid::new([4, 6, 5], 0.5, WorldPoint::default()).unwrap();
        let edf = fresh_edf(&g).unwrap();
        assert!(edf.values().iter().all(|&v| v == 3.0));
    }

    #[test]
    fn occupied_map_gets_exact_field() {
        let mut g = OccupancyGrid::new([5, 1, 1], 0.5, WorldPoint::default()).unwrap();
        g.set(GridCoord::new(0, 0, 0), true);
        assert_eq!(fresh_edf(&g).unwrap().values(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
