//! Euclidean distance fields and the segment clearance integral.
//!
//! Distances are measured between voxel centers. The transform is the exact
//! separable lower-envelope algorithm: one 1D pass per axis over squared
//! integer distances, so every stored value is `sqrt(n) * resolution` for an
//! integer `n` and is bit-identical to a brute-force nearest-obstacle scan.

use std::fs;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::voxmap::{read_lattice_header, write_lattice_header, GridCoord, Lattice, OccupancyGrid, WorldPoint};

const INF: i64 = i64::MAX / 4;

#[derive(Clone, Debug, PartialEq)]
pub struct EdfGrid {
    lattice: Lattice,
    dist: Vec<f64>,
}

/// Clearance integral of a straight segment with its convex-obstacle bounds (m²).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentCost {
    /// Trapezoid approximation; also the upper bound.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Segment length in meters.
    pub length: f64,
}

/// Squared distance, in voxel units, from every voxel center to the nearest
/// occupied voxel center.
pub fn squared_voxel_distances(occ: &OccupancyGrid) -> Result<Vec<i64>> {
    if !occ.cells().iter().any(|&o| o) {
        return Err(Error::EmptyObstacleSet);
    }
    let [nx, ny, nz] = occ.dims();
    let mut f: Vec<i64> = occ.cells().iter().map(|&o| if o { 0 } else { INF }).collect();
    let longest = nx.max(ny).max(nz);
    let mut line = vec![0i64; longest];
    let mut out = vec![0i64; longest];
    let mut env = Envelope::with_capacity(longest);

    // Along k (contiguous).
    for base in (0..nx * ny).map(|r| r * nz) {
        env.transform(&f[base..base + nz], &mut out[..nz]);
        f[base..base + nz].copy_from_slice(&out[..nz]);
    }
    // Along j.
    for i in 0..nx {
        for k in 0..nz {
            let idx = |j: usize| (i * ny + j) * nz + k;
            for j in 0..ny {
                line[j] = f[idx(j)];
            }
            env.transform(&line[..ny], &mut out[..ny]);
            for j in 0..ny {
                f[idx(j)] = out[j];
            }
        }
    }
    // Along i.
    for j in 0..ny {
        for k in 0..nz {
            let idx = |i: usize| (i * ny + j) * nz + k;
            for i in 0..nx {
                line[i] = f[idx(i)];
            }
            env.transform(&line[..nx], &mut out[..nx]);
            for i in 0..nx {
                f[idx(i)] = out[i];
            }
        }
    }
    Ok(f)
}

/// Lower envelope of parabolas `(x - s)^2 + f(s)` over integer sites.
struct Envelope {
    sites: Vec<usize>,
    starts: Vec<i64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self { sites: Vec::with_capacity(n), starts: Vec::with_capacity(n) }
    }

    fn transform(&mut self, f: &[i64], out: &mut [i64]) {
        let n = f.len();
        let eval = |x: i64, s: usize| (x - s as i64).pow(2) + f[s];
        self.sites.clear();
        self.starts.clear();
        for u in 0..n {
            if f[u] >= INF {
                continue;
            }
            loop {
                match (self.sites.last(), self.starts.last()) {
                    (Some(&s), Some(&t)) if eval(t, s) > eval(t, u) => {
                        self.sites.pop();
                        self.starts.pop();
                    }
                    _ => break,
                }
            }
            match self.sites.last() {
                None => {
                    self.sites.push(u);
                    self.starts.push(0);
                }
                Some(&s) => {
                    // First integer x where parabola u is strictly below s.
                    let (si, ui) = (s as i64, u as i64);
                    let num = ui * ui - si * si + f[u] - f[s];
                    let w = 1 + num.div_euclid(2 * (ui - si));
                    if w < n as i64 {
                        self.sites.push(u);
                        self.starts.push(w);
                    }
                }
            }
        }
        if self.sites.is_empty() {
            out.fill(INF);
            return;
        }
        let mut q = self.sites.len() - 1;
        for x in (0..n).rev() {
            out[x] = eval(x as i64, self.sites[q]);
            if x as i64 == self.starts[q] && q > 0 {
                q -= 1;
            }
        }
    }
}

/// Exact Euclidean distance field of the occupied voxels.
pub fn compute_edf(occ: &OccupancyGrid) -> Result<EdfGrid> {
    let sq = squared_voxel_distances(occ)?;
    let res = occ.resolution();
    Ok(EdfGrid {
        lattice: *occ.lattice(),
        dist: sq.into_iter().map(|v| (v as f64).sqrt() * res).collect(),
    })
}

impl EdfGrid {
    /// Wraps precomputed distances (meters). Values must be finite and non-negative.
    pub fn from_values(lattice: Lattice, dist: Vec<f64>) -> Result<Self> {
        if dist.len() != lattice.len() {
            return Err(Error::InvalidGrid(format!("expected {} values, got {}", lattice.len(), dist.len())));
        }
        if let Some(v) = dist.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidGrid(format!("distance {v} is not finite and non-negative")));
        }
        Ok(Self { lattice, dist })
    }

    /// Samples a distance function at every voxel center.
    pub fn from_fn(lattice: Lattice, f: impl Fn(WorldPoint) -> f64) -> Result<Self> {
        let dist = (0..lattice.len()).map(|idx| f(lattice.center(lattice.coord(idx)))).collect();
        Self::from_values(lattice, dist)
    }

    /// Constant field, for obstacle-free maps and synthetic tests.
    pub fn uniform(lattice: Lattice, value: f64) -> Result<Self> {
        Self::from_values(lattice, vec![value; lattice.len()])
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dims(&self) -> [usize; 3] {
        self.lattice.dims
    }

    pub fn resolution(&self) -> f64 {
        self.lattice.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.dist
    }

    pub fn max_value(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    pub fn edf_at(&self, c: GridCoord) -> Result<f64> {
        if !self.lattice.contains(c) {
            return Err(Error::OutOfBounds);
        }
        Ok(self.dist[self.lattice.index(c)])
    }

    /// Unchecked lookup for planner inner loops.
    #[inline]
    pub(crate) fn at(&self, c: GridCoord) -> f64 {
        self.dist[self.lattice.index(c)]
    }

    /// Distance at the voxel containing `p`.
    pub fn sample_nearest(&self, p: WorldPoint) -> Result<f64> {
        Ok(self.at(self.lattice.world_to_grid(p)?))
    }

    /// Finite-difference slope of the field from `s` toward the neighbour `to`.
    /// Positive values mean the step approaches an obstacle.
    pub fn directional_derivative(&self, s: GridCoord, to: GridCoord) -> Result<f64> {
        let d2 = s.dist2(to);
        if !(1..=3).contains(&d2) || s.delta(to).iter().any(|v| v.abs() > 1) {
            return Err(Error::NotNeighbour { from: s, to });
        }
        Ok((self.edf_at(s)? - self.edf_at(to)?) / self.lattice.distance(s, to))
    }

    fn endpoints(&self, a: GridCoord, b: GridCoord) -> Result<(f64, f64, f64)> {
        let (da, db) = (self.edf_at(a)?, self.edf_at(b)?);
        if a == b {
            return Err(Error::ZeroLengthSegment);
        }
        if da == 0.0 {
            return Err(Error::EndpointOccupied(a));
        }
        if db == 0.0 {
            return Err(Error::EndpointOccupied(b));
        }
        Ok((da, db, self.lattice.distance(a, b)))
    }

    /// Trapezoid estimate of the clearance integral with its convex bounds.
    pub fn segment_o(&self, a: GridCoord, b: GridCoord) -> Result<SegmentCost> {
        let (da, db, len) = self.endpoints(a, b)?;
        Ok(segment_cost(da, db, len))
    }

    /// Composite trapezoid rule over `n_samples` equally spaced points of the
    /// segment, reading the field at the voxel containing each point.
    pub fn segment_o_quadrature(&self, a: GridCoord, b: GridCoord, n_samples: usize) -> Result<f64> {
        if n_samples < 2 {
            return Err(Error::TooFewSamples(n_samples));
        }
        let (_, _, len) = self.endpoints(a, b)?;
        let (pa, pb) = (self.lattice.center(a), self.lattice.center(b));
        let intervals = (n_samples - 1) as f64;
        let mut sum = 0.0;
        for m in 0..n_samples {
            let t = m as f64 / intervals;
            let w = if m == 0 || m == n_samples - 1 { 0.5 } else { 1.0 };
            sum += w * self.sample_nearest(pa.lerp(pb, t))?;
        }
        Ok(sum / intervals * len)
    }

    /// Relative gap between the bounds, `L / (d(a) + d(b))`.
    pub fn relative_error_bound(&self, a: GridCoord, b: GridCoord) -> Result<f64> {
        let (da, db) = (self.edf_at(a)?, self.edf_at(b)?);
        if da + db == 0.0 {
            return Err(Error::EndpointOccupied(a));
        }
        Ok(self.lattice.distance(a, b) / (da + db))
    }

    pub fn write_edf<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(EDF_MAGIC)?;
        write_lattice_header(&mut w, &self.lattice)?;
        for &v in &self.dist {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_edf<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != EDF_MAGIC {
            return Err(Error::Format("missing EDF1 magic".into()));
        }
        let lattice = read_lattice_header(&mut r)?;
        let mut raw = Vec::with_capacity(lattice.len() * 4);
        r.read_to_end(&mut raw)?;
        if raw.len() != lattice.len() * 4 {
            return Err(Error::Format(format!(
                "payload has {} bytes, expected {}",
                raw.len(),
                lattice.len() * 4
            )));
        }
        let dist = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect();
        Self::from_values(lattice, dist).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::with_capacity(56 + self.dist.len() * 4);
        self.write_edf(&mut buf)?;
        fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_edf(BufReader::new(fs::File::open(path)?))
    }
}

const EDF_MAGIC: &[u8; 4] = b"EDF1";

/// Bounds from endpoint clearances `da`, `db` and length `len`.
pub fn segment_cost(da: f64, db: f64, len: f64) -> SegmentCost {
    let upper = 0.5 * (da + db) * len;
    SegmentCost { value: upper, upper, lower: (upper - 0.5 * len * len).max(0.0), length: len }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn grid(dims: [usize; 3], res: f64) -> OccupancyGrid {
        OccupancyGrid::new(dims, res, WorldPoint::default()).unwrap()
    }

    fn brute(occ: &OccupancyGrid) -> Vec<i64> {
        let l = occ.lattice();
        let obstacles: Vec<GridCoord> = (0..l.len()).filter(|&i| occ.cells()[i]).map(|i| l.coord(i)).collect();
        (0..l.len()).map(|i| obstacles.iter().map(|o| o.dist2(l.coord(i))).min().unwrap()).collect()
    }

    #[test]
    fn single_obstacle_corner_distance() {
        let mut g = grid([5, 5, 5], 1.0);
        g.set(GridCoord::new(2, 2, 2), true);
        let edf = compute_edf(&g).unwrap();
        assert_eq!(edf.edf_at(GridCoord::new(0, 0, 0)).unwrap(), 12f64.sqrt());
        assert_eq!(edf.edf_at(GridCoord::new(2, 2, 2)).unwrap(), 0.0);
    }

    #[test]
    fn face_neighbour_distance_is_resolution() {
        let mut g = grid([4, 4, 4], 0.2);
        g.set(GridCoord::new(1, 1, 1), true);
        let edf = compute_edf(&g).unwrap();
        assert_eq!(edf.edf_at(GridCoord::new(1, 1, 2)).unwrap(), 0.2);
        assert!(matches!(edf.edf_at(GridCoord::new(4, 0, 0)), Err(Error::OutOfBounds)));
    }

    #[test]
    fn empty_obstacle_set_rejected() {
        assert!(matches!(compute_edf(&grid([3, 3, 3], 1.0)), Err(Error::EmptyObstacleSet)));
    }

    #[test]
    fn matches_brute_force_on_anisotropic_grids() {
        let mut state = 0x9e3779b97f4a7c15u64;
        for dims in [[1, 1, 7], [7, 1, 1], [3, 9, 2], [11, 4, 6], [1, 13, 1]] {
            let mut g = grid(dims, 1.0);
            for idx in 0..g.lattice().len() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                if state.is_multiple_of(5) {
                    let c = g.lattice().coord(idx);
                    g.set(c, true);
                }
            }
            if g.occupied_count() == 0 {
                g.set(GridCoord::new(0, 0, 0), true);
            }
            assert_eq!(squared_voxel_distances(&g).unwrap(), brute(&g), "{dims:?}");
        }
    }

    #[test]
    fn directional_derivative_cases() {
        let l = Lattice::new([3, 3, 3], 1.0, WorldPoint::default()).unwrap();
        let mut vals = vec![2.0; l.len()];
        vals[l.index(GridCoord::new(2, 1, 1))] = 1.0;
        vals[l.index(GridCoord::new(2, 2, 2))] = 3.0 + 3f64.sqrt();
        vals[l.index(GridCoord::new(0, 0, 0))] = 3.0;
        let edf = EdfGrid::from_values(l, vals).unwrap();
        let s = GridCoord::new(1, 1, 1);
        assert_eq!(edf.directional_derivative(s, GridCoord::new(2, 1, 1)).unwrap(), 1.0);
        assert_eq!(edf.directional_derivative(s, GridCoord::new(1, 1, 2)).unwrap(), 0.0);
        let got = edf.directional_derivative(GridCoord::new(0, 0, 0), s).unwrap();
        assert_eq!(got, (3.0 - 2.0) / 3f64.sqrt());
        assert!(matches!(
            edf.directional_derivative(GridCoord::new(0, 0, 0), GridCoord::new(2, 2, 2)),
            Err(Error::NotNeighbour { .. })
        ));
        assert!(edf.directional_derivative(s, s).is_err());
    }

    #[test]
    fn diagonal_derivative_retreats_at_unit_rate() {
        let l = Lattice::new([2, 2, 2], 1.0, WorldPoint::default()).unwrap();
        let mut vals = vec![3.0; l.len()];
        vals[l.index(GridCoord::new(1, 1, 1))] = 3.0 + 3f64.sqrt();
        let edf = EdfGrid::from_values(l, vals).unwrap();
        let d = edf.directional_derivative(GridCoord::new(0, 0, 0), GridCoord::new(1, 1, 1)).unwrap();
        assert!((d + 1.0).abs() < 1e-15);
    }

    #[test]
    fn segment_cost_arithmetic() {
        let c = segment_cost(2.0, 1.0, 1.0);
        assert_eq!((c.value, c.lower, c.upper), (1.5, 1.0, 1.5));
        let c = segment_cost(3.0, 3.0, 1.0);
        assert_eq!((c.value, c.lower), (3.0, 2.5));
        // Clamped when the gap exceeds the estimate.
        let c = segment_cost(0.1, 0.1, 2.0);
        assert_eq!(c.lower, 0.0);
    }

    #[test]
    fn segment_guards() {
        let mut g = grid([4, 1, 1], 1.0);
        g.set(GridCoord::new(0, 0, 0), true);
        let edf = compute_edf(&g).unwrap();
        let (a, b) = (GridCoord::new(1, 0, 0), GridCoord::new(3, 0, 0));
        assert!(matches!(edf.segment_o(a, a), Err(Error::ZeroLengthSegment)));
        assert!(matches!(edf.segment_o(GridCoord::new(0, 0, 0), b), Err(Error::EndpointOccupied(_))));
        assert!(matches!(edf.segment_o_quadrature(a, b, 1), Err(Error::TooFewSamples(1))));
        assert_eq!(edf.segment_o(a, b).unwrap().value, 0.5 * (1.0 + 3.0) * 2.0);
    }

    #[test]
    fn quadrature_of_constant_field_is_exact() {
        let l = Lattice::new([9, 9, 9], 0.25, WorldPoint::default()).unwrap();
        let edf = EdfGrid::uniform(l, 1.75).unwrap();
        for (a, b) in [
            (GridCoord::new(0, 0, 0), GridCoord::new(8, 8, 8)),
            (GridCoord::new(1, 2, 3), GridCoord::new(1, 2, 4)),
            (GridCoord::new(8, 0, 4), GridCoord::new(0, 7, 4)),
        ] {
            let len = l.distance(a, b);
            let q = edf.segment_o_quadrature(a, b, 17).unwrap();
            assert!((q - 1.75 * len).abs() <= 1e-12 * q, "{q} vs {}", 1.75 * len);
        }
    }

    #[test]
    fn relative_error_bound_cases() {
        let l = Lattice::new([3, 1, 1], 1.0, WorldPoint::default()).unwrap();
        let edf = EdfGrid::from_values(l, vec![2.0, 2.0, 0.0]).unwrap();
        let b = edf.relative_error_bound(GridCoord::new(0, 0, 0), GridCoord::new(1, 0, 0)).unwrap();
        assert_eq!(b, 0.25);
        let occ = EdfGrid::from_values(l, vec![0.0, 0.0, 0.0]).unwrap();
        assert!(occ.relative_error_bound(GridCoord::new(0, 0, 0), GridCoord::new(1, 0, 0)).is_err());
    }

    #[test]
    fn edf_file_round_trip_is_f32() {
        let mut g = grid([6, 5, 4], 0.3);
        g.set(GridCoord::new(1, 1, 1), true);
        let edf = compute_edf(&g).unwrap();
        let mut buf = Vec::new();
        edf.write_edf(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"EDF1");
        assert_eq!(buf.len(), 4 + 12 + 32 + 6 * 5 * 4 * 4);
        let back = EdfGrid::read_edf(Cursor::new(&buf)).unwrap();
        assert_eq!(back.lattice(), edf.lattice());
        for (a, b) in back.values().iter().zip(edf.values()) {
            assert_eq!(*a, *b as f32 as f64);
        }
        assert!(EdfGrid::read_edf(Cursor::new(&buf[..buf.len() - 1])).is_err());
    }
}
