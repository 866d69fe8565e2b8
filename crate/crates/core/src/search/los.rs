//! Exact voxel traversal between voxel centers.
//!
//! Crossing parameters along each axis are rational, `(2m + 1) / (2n)`, so
//! they are compared in scaled integer form. Simultaneous crossings step all
//! tied axes at once: a segment that only grazes an edge or a corner does not
//! enter the voxels meeting there. Traversal is therefore symmetric in its
//! endpoints.

use crate::voxmap::{GridCoord, OccupancyGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Visibility {
    Visible,
    Blocked,
    TooFar,
}

// Guards distance comparisons such as 5 * 0.2 against 1.0.
const LOS_EPS: f64 = 1e-9;

/// Calls `visit` on every voxel whose interior the segment between the
/// centers of `a` and `b` crosses, endpoints included, in order from `a`.
/// Stops early and returns `true` as soon as `visit` does.
pub fn traverse_segment(a: GridCoord, b: GridCoord, mut visit: impl FnMut(GridCoord) -> bool) -> bool {
    let delta = a.delta(b);
    let n = delta.map(|d| d.unsigned_abs() as i64);
    let step = delta.map(|d| d.signum());
    let scale: i64 = n.iter().filter(|&&v| v > 0).product();
    let mut next = [i64::MAX; 3];
    let mut inc = [0i64; 3];
    for axis in 0..3 {
        if n[axis] > 0 {
            inc[axis] = 2 * scale / n[axis];
            next[axis] = scale / n[axis];
        }
    }
    let mut cur = [a.i as i64, a.j as i64, a.k as i64];
    let mut remaining = n;
    if visit(a) {
        return true;
    }
    while remaining.iter().any(|&r| r > 0) {
        let t = (0..3).filter(|&ax| remaining[ax] > 0).map(|ax| next[ax]).min().unwrap();
        for axis in 0..3 {
            if remaining[axis] > 0 && next[axis] == t {
                cur[axis] += step[axis];
                next[axis] += inc[axis];
                remaining[axis] -= 1;
            }
        }
        if visit(GridCoord::new(cur[0] as usize, cur[1] as usize, cur[2] as usize)) {
            return true;
        }
    }
    false
}

pub fn line_of_sight(occ: &OccupancyGrid, a: GridCoord, b: GridCoord, max_los: f64) -> Visibility {
    if !occ.contains(a) || !occ.contains(b) {
        return Visibility::Blocked;
    }
    if occ.lattice().distance(a, b) > max_los + LOS_EPS {
        return Visibility::TooFar;
    }
    if traverse_segment(a, b, |c| occ.is_occupied(c)) {
        Visibility::Blocked
    } else {
        Visibility::Visible
    }
}
