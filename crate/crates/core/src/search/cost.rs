use crate::edf::EdfGrid;
use crate::error::Result;
use crate::voxmap::{GridCoord, Lattice};

/// Length plus clearance penalty, `‖b − a‖ + c_w / O(a, b)`.
pub fn edge_cost(edf: &EdfGrid, a: GridCoord, b: GridCoord, c_w: f64) -> Result<f64> {
    let seg = edf.segment_o(a, b)?;
    Ok(seg.length + c_w / seg.value)
}

/// Unchecked [`edge_cost`] for endpoints already known to be free and distinct.
#[inline]
pub(crate) fn edge_cost_unchecked(edf: &EdfGrid, a: GridCoord, b: GridCoord, c_w: f64) -> f64 {
    let len = edf.lattice().distance(a, b);
    if c_w == 0.0 {
        return len;
    }
    let o = 0.5 * (edf.at(a) + edf.at(b)) * len;
    debug_assert!(o > 0.0, "segment {a:?}->{b:?} touches an obstacle");
    len + c_w / o
}

/// Weighted straight-line distance to the goal, in meters.
pub fn heuristic(lattice: &Lattice, a: GridCoord, goal: GridCoord, weight: f64) -> f64 {
    weight * lattice.distance(a, goal)
}
