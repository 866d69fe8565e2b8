//! Occupancy lattices, procedural scenarios and map I/O.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::edf::{compute_edf, EdfGrid};
use crate::error::{Error, Result};

/// Integer voxel index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCoord {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl GridCoord {
    pub const fn new(i: usize, j: usize, k: usize) -> Self {
        Self { i, j, k }
    }

    /// Applies a signed offset, returning `None` on underflow.
    pub fn offset(self, d: [i32; 3]) -> Option<Self> {
        Some(Self {
            i: self.i.checked_add_signed(d[0] as isize)?,
            j: self.j.checked_add_signed(d[1] as isize)?,
            k: self.k.checked_add_signed(d[2] as isize)?,
        })
    }

    pub fn delta(self, to: GridCoord) -> [i64; 3] {
        [
            to.i as i64 - self.i as i64,
            to.j as i64 - self.j as i64,
            to.k as i64 - self.k as i64,
        ]
    }

    /// Squared center-to-center distance in voxel units.
    pub fn dist2(self, to: GridCoord) -> i64 {
        let d = self.delta(to);
        d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
    }

    pub fn as_array(self) -> [usize; 3] {
        [self.i, self.j, self.k]
    }
}

impl From<[usize; 3]> for GridCoord {
    fn from(a: [usize; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl fmt::Display for GridCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.i, self.j, self.k)
    }
}

/// Continuous position in meters.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl WorldPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(self, o: WorldPoint) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2) + (self.z - o.z).powi(2)).sqrt()
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn lerp(self, o: WorldPoint, t: f64) -> WorldPoint {
        WorldPoint::new(
            self.x + (o.x - self.x) * t,
            self.y + (o.y - self.y) * t,
            self.z + (o.z - self.z) * t,
        )
    }
}

/// Shape and placement of a voxel lattice, shared by occupancy and distance grids.
///
/// Voxel `(i, j, k)` spans `origin + [i, i+1) * resolution` on each axis and its
/// center is at `origin + (i + 0.5) * resolution`. Storage is row-major with
/// `k` varying fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub dims: [usize; 3],
    pub resolution: f64,
    pub origin: WorldPoint,
}

impl Lattice {
    pub fn new(dims: [usize; 3], resolution: f64, origin: WorldPoint) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidGrid(format!("dims {dims:?} must be positive")));
        }
        let cells = dims.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d as u64));
        if cells.is_none_or(|n| n > 1 << 32 || usize::try_from(n).is_err()) {
            return Err(Error::InvalidGrid(format!("dims {dims:?} too large")));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidGrid(format!("resolution {resolution} must be positive")));
        }
        if !origin.as_array().iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self { dims, resolution, origin })
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, c: GridCoord) -> bool {
        c.i < self.dims[0] && c.j < self.dims[1] && c.k < self.dims[2]
    }

    #[inline]
    pub fn index(&self, c: GridCoord) -> usize {
        (c.i * self.dims[1] + c.j) * self.dims[2] + c.k
    }

    #[inline]
    pub fn coord(&self, idx: usize) -> GridCoord {
        let k = idx % self.dims[2];
        let rest = idx / self.dims[2];
        GridCoord::new(rest / self.dims[1], rest % self.dims[1], k)
    }

    pub fn center(&self, c: GridCoord) -> WorldPoint {
        let r = self.resolution;
        WorldPoint::new(
            self.origin.x + (c.i as f64 + 0.5) * r,
            self.origin.y + (c.j as f64 + 0.5) * r,
            self.origin.z + (c.k as f64 + 0.5) * r,
        )
    }

    pub fn world_to_grid(&self, p: WorldPoint) -> Result<GridCoord> {
        let mut out = [0usize; 3];
        for (axis, (v, o)) in p.as_array().into_iter().zip(self.origin.as_array()).enumerate() {
            let f = ((v - o) / self.resolution).floor();
            if !(f >= 0.0 && f < self.dims[axis] as f64) {
                return Err(Error::OutOfBounds);
            }
            out[axis] = f as usize;
        }
        Ok(out.into())
    }

    /// Center-to-center distance in meters.
    pub fn distance(&self, a: GridCoord, b: GridCoord) -> f64 {
        (a.dist2(b) as f64).sqrt() * self.resolution
    }
}

/// Boolean voxel lattice; `true` marks an obstacle.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    lattice: Lattice,
    occupied: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(dims: [usize; 3], resolution: f64, origin: WorldPoint) -> Result<Self> {
        let lattice = Lattice::new(dims, resolution, origin)?;
        Ok(Self { occupied: vec![false; lattice.len()], lattice })
    }

    pub fn from_cells(lattice: Lattice, occupied: Vec<bool>) -> Result<Self> {
        if occupied.len() != lattice.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} cells, got {}",
                lattice.len(),
                occupied.len()
            )));
        }
        Ok(Self { lattice, occupied })
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

    pub fn origin(&self) -> WorldPoint {
        self.lattice.origin
    }

    pub fn cells(&self) -> &[bool] {
        &self.occupied
    }

    pub fn contains(&self, c: GridCoord) -> bool {
        self.lattice.contains(c)
    }

    /// Out-of-bounds coordinates report as occupied.
    pub fn is_occupied(&self, c: GridCoord) -> bool {
        !self.contains(c) || self.occupied[self.lattice.index(c)]
    }

    pub fn is_free(&self, c: GridCoord) -> bool {
        !self.is_occupied(c)
    }

    pub fn set(&mut self, c: GridCoord, occupied: bool) {
        let idx = self.lattice.index(c);
        self.occupied[idx] = occupied;
    }

    /// Marks the half-open box `[lo, hi)` (clipped to the lattice).
    pub fn fill_box(&mut self, lo: [usize; 3], hi: [usize; 3], occupied: bool) {
        let d = self.dims();
        for i in lo[0]..hi[0].min(d[0]) {
            for j in lo[1]..hi[1].min(d[1]) {
                for k in lo[2]..hi[2].min(d[2]) {
                    self.set(GridCoord::new(i, j, k), occupied);
                }
            }
        }
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn center(&self, c: GridCoord) -> WorldPoint {
        self.lattice.center(c)
    }

    pub fn world_to_grid(&self, p: WorldPoint) -> Result<GridCoord> {
        self.lattice.world_to_grid(p)
    }

    pub fn write_vxm<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(VXM_MAGIC)?;
        write_lattice_header(&mut w, &self.lattice)?;
        let mut cells = self.occupied.iter().copied();
        let mut current = match cells.next() {
            Some(v) => v,
            None => return Ok(()),
        };
        let mut run: u32 = 1;
        for v in cells {
            if v == current && run < u32::MAX {
                run += 1;
            } else {
                w.write_all(&run.to_le_bytes())?;
                w.write_all(&[current as u8])?;
                current = v;
                run = 1;
            }
        }
        w.write_all(&run.to_le_bytes())?;
        w.write_all(&[current as u8])?;
        Ok(())
    }

    pub fn read_vxm<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != VXM_MAGIC {
            return Err(Error::Format("missing VXM1 magic".into()));
        }
        let lattice = read_lattice_header(&mut r)?;
        let n = lattice.len();
        let mut occupied = Vec::with_capacity(n);
        let mut rec = [0u8; 5];
        while occupied.len() < n {
            r.read_exact(&mut rec)
                .map_err(|_| Error::Format("truncated run-length payload".into()))?;
            let run = u32::from_le_bytes(rec[..4].try_into().unwrap()) as usize;
            let value = match rec[4] {
                0 => false,
                1 => true,
                v => return Err(Error::Format(format!("invalid cell value {v}"))),
            };
            if run == 0 || occupied.len() + run > n {
                return Err(Error::Format("run lengths do not match dims".into()));
            }
            occupied.resize(occupied.len() + run, value);
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Format("trailing bytes after payload".into()));
        }
        Self::from_cells(lattice, occupied)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::new();
        self.write_vxm(&mut buf)?;
        fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_vxm(BufReader::new(fs::File::open(path)?))
    }
}

const VXM_MAGIC: &[u8; 4] = b"VXM1";

pub(crate) fn write_lattice_header<W: Write>(w: &mut W, l: &Lattice) -> Result<()> {
    for d in l.dims {
        w.write_all(&(d as u32).to_le_bytes())?;
    }
    w.write_all(&l.resolution.to_le_bytes())?;
    for o in l.origin.as_array() {
        w.write_all(&o.to_le_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_lattice_header<R: Read>(r: &mut R) -> Result<Lattice> {
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    let mut dims = [0usize; 3];
    for d in &mut dims {
        r.read_exact(&mut b4)?;
        *d = u32::from_le_bytes(b4) as usize;
    }
    r.read_exact(&mut b8)?;
    let resolution = f64::from_le_bytes(b8);
    let mut origin = [0f64; 3];
    for o in &mut origin {
        r.read_exact(&mut b8)?;
        *o = f64::from_le_bytes(b8);
    }
    Lattice::new(dims, resolution, WorldPoint::new(origin[0], origin[1], origin[2]))
        .map_err(|e| Error::Format(e.to_string()))
}

/// Builds a lattice from an ASCII point cloud with one `x y z` triple per line.
///
/// Blank lines and lines starting with `#` are skipped.
pub fn load_pointcloud_xyz(path: impl AsRef<Path>, resolution: f64, padding: usize) -> Result<OccupancyGrid> {
    let file = fs::File::open(path)?;
    let mut points = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        points.push(parse_xyz(trimmed).map_err(|msg| Error::Parse { line: n + 1, msg })?);
    }
    voxelize_points(&points, resolution, padding)
}

fn parse_xyz(line: &str) -> std::result::Result<WorldPoint, String> {
    let fields: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
    if fields.len() != 3 {
        return Err(format!("expected 3 values, found {}", fields.len()));
    }
    let mut v = [0f64; 3];
    for (slot, f) in v.iter_mut().zip(&fields) {
        *slot = f.parse::<f64>().map_err(|e| format!("{f:?}: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("{f:?} is not finite"));
        }
    }
    Ok(WorldPoint::new(v[0], v[1], v[2]))
}

/// Occupies every voxel that contains at least one point. The lattice is the
/// points' bounding box grown by `padding` free voxels on every side.
pub fn voxelize_points(points: &[WorldPoint], resolution: f64, padding: usize) -> Result<OccupancyGrid> {
    if points.is_empty() {
        return Err(Error::EmptyPointCloud);
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for (a, v) in p.as_array().into_iter().enumerate() {
            lo[a] = lo[a].min(v);
            hi[a] = hi[a].max(v);
        }
    }
    let pad = padding as f64 * resolution;
    let mut dims = [0usize; 3];
    for a in 0..3 {
        dims[a] = ((hi[a] - lo[a]) / resolution).floor() as usize + 1 + 2 * padding;
    }
    let origin = WorldPoint::new(lo[0] - pad, lo[1] - pad, lo[2] - pad);
    let mut grid = OccupancyGrid::new(dims, resolution, origin)?;
    for p in points {
        let mut c = [0usize; 3];
        for a in 0..3 {
            // Same arithmetic as the dims above keeps the extreme points inside.
            let f = ((p.as_array()[a] - lo[a]) / resolution).floor() as usize + padding;
            c[a] = f.min(dims[a] - 1 - padding);
        }
        grid.set(c.into(), true);
    }
    Ok(grid)
}

/// Procedural analogues of the indoor benchmark scenes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Two parallel walls joined by a crossbar.
    H,
    /// An arch; the goal sits underneath it.
    InvertedU,
    /// A cup with a narrow opening; the goal sits inside.
    NearClosedU,
    /// A seeded single-storey maze.
    Maze,
    /// A hollow box enclosing the goal, for exercising unreachable queries.
    Sealed,
}

impl ScenarioKind {
    pub const BENCHMARK: [ScenarioKind; 4] =
        [ScenarioKind::H, ScenarioKind::InvertedU, ScenarioKind::NearClosedU, ScenarioKind::Maze];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::H => "h",
            ScenarioKind::InvertedU => "inverted_u",
            ScenarioKind::NearClosedU => "near_closed_u",
            ScenarioKind::Maze => "maze",
            ScenarioKind::Sealed => "sealed",
        }
    }

    /// Label used in benchmark output; these are generated stand-ins, not the original maps.
    pub fn label(self) -> &'static str {
        match self {
            ScenarioKind::H => "S1-analogue",
            ScenarioKind::InvertedU => "S2-analogue",
            ScenarioKind::NearClosedU => "S3-analogue",
            ScenarioKind::Maze => "S4-analogue",
            ScenarioKind::Sealed => "sealed",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "h" | "s1" => Ok(ScenarioKind::H),
            "inverted_u" | "s2" => Ok(ScenarioKind::InvertedU),
            "near_closed_u" | "s3" => Ok(ScenarioKind::NearClosedU),
            "maze" | "s4" => Ok(ScenarioKind::Maze),
            "sealed" => Ok(ScenarioKind::Sealed),
            other => Err(format!("unknown scenario kind {other:?}")),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Wall template parameters, in voxels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TemplateParams {
    pub wall: usize,
    pub opening: usize,
}

impl Default for TemplateParams {
    fn default() -> Self {
        Self { wall: 2, opening: 4 }
    }
}

pub const MIN_SCENARIO_DIM: usize = 16;

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub grid: OccupancyGrid,
    pub start: GridCoord,
    pub goal: GridCoord,
    pub min_clearance: f64,
}

pub fn gen_scenario(kind: ScenarioKind, dims: [usize; 3], resolution: f64, seed: u64) -> Result<Scenario> {
    gen_scenario_with(kind, dims, resolution, seed, TemplateParams::default())
}

pub fn gen_scenario_with(
    kind: ScenarioKind,
    dims: [usize; 3],
    resolution: f64,
    seed: u64,
    params: TemplateParams,
) -> Result<Scenario> {
    if dims.iter().any(|&d| d < MIN_SCENARIO_DIM) {
        return Err(Error::DimsTooSmall { dims, min: MIN_SCENARIO_DIM });
    }
    if params.wall == 0 || params.opening == 0 {
        return Err(Error::InvalidGrid("wall and opening must be positive".into()));
    }
    let mut grid = OccupancyGrid::new(dims, resolution, WorldPoint::default())?;
    let [nx, ny, nz] = dims;
    let t = params.wall;
    let (start, goal) = match kind {
        ScenarioKind::H => {
            let hz = nz * 3 / 4;
            let xl = nx / 3;
            let xr = 2 * nx / 3 - t;
            let (y0, y1) = (ny / 5, ny - ny / 5);
            grid.fill_box([xl, y0, 0], [xl + t, y1, hz], true);
            grid.fill_box([xr, y0, 0], [xr + t, y1, hz], true);
            let yc = ny / 2 - t / 2;
            grid.fill_box([xl, yc, 0], [xr + t, yc + t, hz], true);
            (GridCoord::new(nx / 6, ny / 2, nz / 4), GridCoord::new(nx - 1 - nx / 6, ny / 2, nz / 4))
        }
        ScenarioKind::InvertedU => {
            let xl = nx / 4;
            let xr = 3 * nx / 4 - t;
            let zr = nz * 2 / 3;
            let (y0, y1) = (ny / 4, 3 * ny / 4);
            grid.fill_box([xl, y0, 0], [xl + t, y1, zr], true);
            grid.fill_box([xr, y0, 0], [xr + t, y1, zr], true);
            grid.fill_box([xl, y0, zr], [xr + t, y1, zr + t], true);
            (GridCoord::new(nx / 8, ny / 2, nz / 4), GridCoord::new(nx / 2, ny / 2, nz / 4))
        }
        ScenarioKind::NearClosedU => {
            let (x0, x1) = (nx / 4, 3 * nx / 4);
            let (y0, y1) = (ny / 4, 3 * ny / 4);
            grid.fill_box([x0, y0, 0], [x0 + t, y1, nz], true);
            grid.fill_box([x1 - t, y0, 0], [x1, y1, nz], true);
            grid.fill_box([x0, y0, 0], [x1, y0 + t, nz], true);
            grid.fill_box([x0, y1 - t, 0], [x1, y1, nz], true);
            let w = params.opening.min(x1 - x0 - 2 * t);
            let oc = (x0 + x1) / 2 - w / 2;
            grid.fill_box([oc, y1 - t, 0], [oc + w, y1, nz], false);
            (GridCoord::new(nx / 2, ny / 8, nz / 2), GridCoord::new(nx / 2, ny / 2, nz / 2))
        }
        ScenarioKind::Maze => build_maze(&mut grid, params, seed),
        ScenarioKind::Sealed => {
            let c = [nx / 2, ny / 2, nz / 2];
            let r = (nx.min(ny).min(nz) / 8).max(1);
            grid.fill_box(
                [c[0] - r - t, c[1] - r - t, c[2] - r - t],
                [c[0] + r + t + 1, c[1] + r + t + 1, c[2] + r + t + 1],
                true,
            );
            grid.fill_box([c[0] - r, c[1] - r, c[2] - r], [c[0] + r + 1, c[1] + r + 1, c[2] + r + 1], false);
            (GridCoord::new(1, 1, 1), GridCoord::from(c))
        }
    };
    Ok(Scenario {
        name: format!("{}-{}x{}x{}-s{}", kind.label(), nx, ny, nz, seed),
        kind,
        grid,
        start,
        goal,
        min_clearance: 2.0 * resolution,
    })
}

/// Carves a maze over square cells of `opening` voxels separated by walls of
/// `wall` voxels, then opens one entrance at each end.
fn build_maze(grid: &mut OccupancyGrid, params: TemplateParams, seed: u64) -> (GridCoord, GridCoord) {
    let [nx, ny, nz] = grid.dims();
    let (t, w) = (params.wall, params.opening);
    let pitch = t + w;
    let cx = ((nx - t) / pitch).max(1);
    let cy = ((ny - t) / pitch).max(1);
    let ex = cx * pitch + t;
    let ey = cy * pitch + t;
    for x in 0..ex.min(nx) {
        for y in 0..ey.min(ny) {
            if x % pitch < t || y % pitch < t {
                grid.fill_box([x, y, 0], [x + 1, y + 1, nz], true);
            }
        }
    }
    let cell_lo = |c: usize| c * pitch + t;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut visited = vec![false; cx * cy];
    let mut stack = vec![(0usize, 0usize)];
    visited[0] = true;
    while let Some(&(x, y)) = stack.last() {
        let mut options: Vec<(usize, usize)> = Vec::with_capacity(4);
        if x > 0 && !visited[(x - 1) * cy + y] {
            options.push((x - 1, y));
        }
        if x + 1 < cx && !visited[(x + 1) * cy + y] {
            options.push((x + 1, y));
        }
        if y > 0 && !visited[x * cy + y - 1] {
            options.push((x, y - 1));
        }
        if y + 1 < cy && !visited[x * cy + y + 1] {
            options.push((x, y + 1));
        }
        match options.choose(&mut rng) {
            None => {
                stack.pop();
            }
            Some(&(qx, qy)) => {
                visited[qx * cy + qy] = true;
                if qx != x {
                    let wx = cell_lo(x.max(qx)) - t;
                    grid.fill_box([wx, cell_lo(y), 0], [wx + t, cell_lo(y) + w, nz], false);
                } else {
                    let wy = cell_lo(y.max(qy)) - t;
                    grid.fill_box([cell_lo(x), wy, 0], [cell_lo(x) + w, wy + t, nz], false);
                }
                stack.push((qx, qy));
            }
        }
    }
    // Entrances: west wall of the first cell, east wall of the last one.
    grid.fill_box([0, cell_lo(0), 0], [t, cell_lo(0) + w, nz], false);
    let last = cell_lo(cx - 1) + w;
    grid.fill_box([last, cell_lo(cy - 1), 0], [last + t, cell_lo(cy - 1) + w, nz], false);

    let mid = |lo: usize| lo + w / 2;
    (
        GridCoord::new(mid(cell_lo(0)), mid(cell_lo(0)), nz / 2),
        GridCoord::new(mid(cell_lo(cx - 1)), mid(cell_lo(cy - 1)), nz / 2),
    )
}

impl Scenario {
    /// Checks that start and goal are free with the promised clearance.
    pub fn validate(&self, edf: &EdfGrid) -> Result<()> {
        for c in [self.start, self.goal] {
            if !self.grid.is_free(c) {
                return Err(Error::NotFree(c));
            }
            if edf.edf_at(c)? < self.min_clearance {
                return Err(Error::InvalidGrid(format!("{c} is closer than {} m to an obstacle", self.min_clearance)));
            }
        }
        Ok(())
    }

    pub fn edf(&self) -> Result<EdfGrid> {
        compute_edf(&self.grid)
    }
}

const MAX_PAIR_ATTEMPTS: usize = 10_000;

/// Draws a seeded (start, goal) pair of distinct free voxels whose clearance is
/// at least `min_clearance`.
pub fn sample_start_goal(
    grid: &OccupancyGrid,
    edf: &EdfGrid,
    min_clearance: f64,
    seed: u64,
) -> Result<(GridCoord, GridCoord)> {
    sample_start_goal_separated(grid, edf, min_clearance, 0.0, seed)
}

/// As [`sample_start_goal`], additionally rejecting pairs closer than
/// `min_separation` meters.
pub fn sample_start_goal_separated(
    grid: &OccupancyGrid,
    edf: &EdfGrid,
    min_clearance: f64,
    min_separation: f64,
    seed: u64,
) -> Result<(GridCoord, GridCoord)> {
    let lattice = grid.lattice();
    let candidates: Vec<usize> = (0..lattice.len())
        .filter(|&idx| !grid.cells()[idx] && edf.values()[idx] >= min_clearance)
        .collect();
    if candidates.len() < 2 {
        return Err(Error::NoValidPair);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_PAIR_ATTEMPTS {
        let a = candidates[rng.gen_range(0..candidates.len())];
        let b = candidates[rng.gen_range(0..candidates.len())];
        if a == b {
            continue;
        }
        let (ca, cb) = (lattice.coord(a), lattice.coord(b));
        if lattice.distance(ca, cb) >= min_separation {
            return Ok((ca, cb));
        }
    }
    Err(Error::NoValidPair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn unit_grid(n: usize) -> OccupancyGrid {
        OccupancyGrid::new([n, n, n], 1.0, WorldPoint::default()).unwrap()
    }

    #[test]
    fn world_to_grid_floors() {
        let g = unit_grid(4);
        assert_eq!(g.world_to_grid(WorldPoint::new(2.4, 0.0, 0.0)).unwrap(), GridCoord::new(2, 0, 0));
        assert_eq!(g.world_to_grid(WorldPoint::default()).unwrap(), GridCoord::new(0, 0, 0));
        assert!(matches!(g.world_to_grid(WorldPoint::new(-0.1, 0.0, 0.0)), Err(Error::OutOfBounds)));
        assert!(matches!(g.world_to_grid(WorldPoint::new(4.0, 0.0, 0.0)), Err(Error::OutOfBounds)));
        assert!(g.world_to_grid(WorldPoint::new(f64::NAN, 0.0, 0.0)).is_err());
    }

    #[test]
    fn index_and_coord_are_inverse() {
        let l = Lattice::new([3, 5, 7], 0.5, WorldPoint::default()).unwrap();
        for idx in 0..l.len() {
            assert_eq!(l.index(l.coord(idx)), idx);
        }
        assert_eq!(l.index(GridCoord::new(0, 0, 1)), 1);
    }

    #[test]
    fn rejects_degenerate_lattices() {
        assert!(OccupancyGrid::new([0, 4, 4], 1.0, WorldPoint::default()).is_err());
        assert!(OccupancyGrid::new([4, 4, 4], 0.0, WorldPoint::default()).is_err());
        assert!(OccupancyGrid::new([4, 4, 4], -1.0, WorldPoint::default()).is_err());
    }

    #[test]
    fn vxm_round_trip() {
        let mut g = OccupancyGrid::new([5, 4, 3], 0.2, WorldPoint::new(-1.0, 2.0, 0.5)).unwrap();
        g.fill_box([1, 1, 0], [3, 2, 3], true);
        g.set(GridCoord::new(4, 3, 2), true);
        let mut buf = Vec::new();
        g.write_vxm(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"VXM1");
        let back = OccupancyGrid::read_vxm(Cursor::new(&buf)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn vxm_rejects_corruption() {
        let g = unit_grid(3);
        let mut buf = Vec::new();
        g.write_vxm(&mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(OccupancyGrid::read_vxm(Cursor::new(&bad)).is_err());
        let truncated = &buf[..buf.len() - 2];
        assert!(OccupancyGrid::read_vxm(Cursor::new(truncated)).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(OccupancyGrid::read_vxm(Cursor::new(&extra)).is_err());
    }

    #[test]
    fn single_point_cloud() {
        let g = voxelize_points(&[WorldPoint::default()], 1.0, 1).unwrap();
        assert_eq!(g.dims(), [3, 3, 3]);
        assert_eq!(g.occupied_count(), 1);
        assert!(g.is_occupied(GridCoord::new(1, 1, 1)));
    }

    #[test]
    fn two_point_cloud() {
        let pts = [WorldPoint::default(), WorldPoint::new(1.0, 0.0, 0.0)];
        let g = voxelize_points(&pts, 0.5, 0).unwrap();
        assert_eq!(g.dims(), [3, 1, 1]);
        assert!(g.is_occupied(GridCoord::new(0, 0, 0)));
        assert!(g.is_free(GridCoord::new(1, 0, 0)));
        assert!(g.is_occupied(GridCoord::new(2, 0, 0)));
    }

    #[test]
    fn pointcloud_parse_errors_carry_line() {
        let dir = std::env::temp_dir().join(format!("voxmap-xyz-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let bad = dir.join("bad.xyz");
        fs::write(&bad, "0 0 0\n1 1 1\na b c\n").unwrap();
        match load_pointcloud_xyz(&bad, 1.0, 0) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let empty = dir.join("empty.xyz");
        fs::write(&empty, "\n# nothing\n").unwrap();
        assert!(matches!(load_pointcloud_xyz(&empty, 1.0, 0), Err(Error::EmptyPointCloud)));
        fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn scenarios_are_deterministic() {
        for kind in ScenarioKind::BENCHMARK {
            let a = gen_scenario(kind, [64, 64, 64], 0.2, 42).unwrap();
            let b = gen_scenario(kind, [64, 64, 64], 0.2, 42).unwrap();
            assert_eq!(a.grid, b.grid, "{kind}");
            assert_eq!((a.start, a.goal), (b.start, b.goal));
        }
    }

    #[test]
    fn maze_depends_on_seed() {
        let a = gen_scenario(ScenarioKind::Maze, [40, 40, 16], 0.2, 1).unwrap();
        let b = gen_scenario(ScenarioKind::Maze, [40, 40, 16], 0.2, 2).unwrap();
        assert_ne!(a.grid, b.grid);
    }

    #[test]
    fn oversized_lattices_rejected() {
        assert!(Lattice::new([1 << 22; 3], 1.0, WorldPoint::default()).is_err());
        assert!(Lattice::new([usize::MAX, 2, 2], 1.0, WorldPoint::default()).is_err());
        assert!(Lattice::new([1 << 16, 1 << 16, 1], 1.0, WorldPoint::default()).is_ok());
    }

    #[test]
    fn small_dims_rejected() {
        assert!(matches!(
            gen_scenario(ScenarioKind::Maze, [12, 12, 12], 0.2, 1),
            Err(Error::DimsTooSmall { .. })
        ));
    }

    #[test]
    fn scenario_endpoints_have_clearance() {
        for kind in ScenarioKind::BENCHMARK {
            for dims in [[16, 16, 16], [48, 48, 24], [64, 64, 64]] {
                let s = gen_scenario(kind, dims, 0.2, 3).unwrap();
                let edf = s.edf().unwrap();
                s.validate(&edf).unwrap_or_else(|e| panic!("{kind} {dims:?}: {e}"));
            }
        }
    }

    #[test]
    fn start_goal_sampling() {
        let mut g = unit_grid(8);
        g.set(GridCoord::new(0, 0, 0), true);
        let edf = compute_edf(&g).unwrap();
        let a = sample_start_goal(&g, &edf, 0.0, 7).unwrap();
        let b = sample_start_goal(&g, &edf, 0.0, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.0, a.1);
        assert!(g.is_free(a.0) && g.is_free(a.1));

        let mut full = unit_grid(4);
        full.fill_box([0, 0, 0], [4, 4, 4], true);
        let edf = compute_edf(&full).unwrap();
        assert!(matches!(sample_start_goal(&full, &edf, 0.0, 1), Err(Error::NoValidPair)));
    }
}
