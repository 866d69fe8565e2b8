//! Independent oracles and property suites for the distance field, the
//! segment cost bounds, the planner cost's triangle inequality and the 2D
//! neighbour-selection quality study.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::edf::{compute_edf, EdfGrid};
use crate::error::{Error, Result};
use crate::voxmap::{GridCoord, Lattice, OccupancyGrid, WorldPoint};

/// Summary shared by every property suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport<T> {
    pub suite: String,
    pub cases: usize,
    pub failures: usize,
    pub first_counterexample: Option<T>,
}

impl<T> SuiteReport<T> {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Nearest-occupied scan over voxel centers. Obstacles are bucketed by `i`
/// plane and planes are visited outward from the query until the plane gap
/// alone exceeds the best squared distance found.
pub fn brute_force_edf(occ: &OccupancyGrid) -> Result<EdfGrid> {
    let lattice = *occ.lattice();
    let [nx, _, _] = lattice.dims;
    let mut planes: Vec<Vec<(i64, i64)>> = vec![Vec::new(); nx];
    for idx in (0..lattice.len()).filter(|&i| occ.cells()[i]) {
        let c = lattice.coord(idx);
        planes[c.i].push((c.j as i64, c.k as i64));
    }
    if planes.iter().all(Vec::is_empty) {
        return Err(Error::EmptyObstacleSet);
    }
    let res = lattice.resolution;
    let dist = (0..lattice.len())
        .into_par_iter()
        .map(|idx| {
            let c = lattice.coord(idx);
            let (j, k) = (c.j as i64, c.k as i64);
            let mut best = i64::MAX;
            for gap in 0..nx as i64 {
                if gap * gap >= best {
                    break;
                }
                for i in [c.i as i64 - gap, c.i as i64 + gap] {
                    if !(0..nx as i64).contains(&i) || (gap == 0 && i != c.i as i64) {
                        continue;
                    }
                    for &(oj, ok) in &planes[i as usize] {
                        best = best.min(gap * gap + (oj - j).pow(2) + (ok - k).pow(2));
                    }
                    if gap == 0 {
                        break;
                    }
                }
            }
            (best as f64).sqrt() * res
        })
        .collect();
    EdfGrid::from_values(lattice, dist)
}

fn random_grid(rng: &mut ChaCha8Rng, dims: [usize; 3], res: f64) -> Result<OccupancyGrid> {
    let mut g = OccupancyGrid::new(dims, res, WorldPoint::default())?;
    let n = g.lattice().len();
    let density = rng.gen_range(0.0005..0.15);
    let mut any = false;
    for idx in 0..n {
        if rng.gen_bool(density) {
            let c = g.lattice().coord(idx);
            g.set(c, true);
            any = true;
        }
    }
    if !any {
        let c = g.lattice().coord(rng.gen_range(0..n));
        g.set(c, true);
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdfMismatch {
    pub grid: usize,
    pub dims: [usize; 3],
    pub voxel: GridCoord,
    pub transform: f64,
    pub oracle: f64,
}

/// Compares the separable transform with the exhaustive scan on `n_grids`
/// seeded random grids with each side in `4..=max_dim`.
pub fn check_edf_exactness(n_grids: usize, max_dim: usize, seed: u64) -> Result<SuiteReport<EdfMismatch>> {
    let mut failures = 0;
    let mut first = None;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for gi in 0..n_grids {
        let dims: [usize; 3] = std::array::from_fn(|_| rng.gen_range(4..=max_dim.max(4)));
        let res = [0.05, 0.1, 0.2, 0.5, 1.0][rng.gen_range(0..5)];
        let g = random_grid(&mut rng, dims, res)?;
        let (fast, slow) = (compute_edf(&g)?, brute_force_edf(&g)?);
        let bad: Vec<usize> = (0..fast.values().len()).filter(|&i| fast.values()[i] != slow.values()[i]).collect();
        if let Some(&i) = bad.first() {
            failures += 1;
            first.get_or_insert(EdfMismatch {
                grid: gi,
                dims,
                voxel: g.lattice().coord(i),
                transform: fast.values()[i],
                oracle: slow.values()[i],
            });
        }
    }
    Ok(SuiteReport { suite: "edf".into(), cases: n_grids, failures, first_counterexample: first })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzViolation {
    pub grid: usize,
    pub a: GridCoord,
    pub b: GridCoord,
    pub da: f64,
    pub db: f64,
    pub distance: f64,
}

/// Checks `|d(a) − d(b)| ≤ ‖a − b‖ + 1e-9` over every 26-adjacent pair of
/// `n_grids` seeded `dim³` grids. Cases count adjacent pairs.
pub fn check_lipschitz(n_grids: usize, dim: usize, seed: u64) -> Result<SuiteReport<LipschitzViolation>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut cases, mut failures, mut first) = (0usize, 0usize, None);
    for gi in 0..n_grids {
        let res = [0.1, 0.2, 0.5, 1.0][gi % 4];
        let edf = compute_edf(&random_grid(&mut rng, [dim; 3], res)?)?;
        let l = *edf.lattice();
        for idx in 0..l.len() {
            let a = l.coord(idx);
            // Each unordered pair once: forward half of the offset table.
            for o in &crate::search::OFFSETS[13..] {
                let Some(b) = a.offset(*o).filter(|b| l.contains(*b)) else { continue };
                cases += 1;
                let (da, db, distance) = (edf.at(a), edf.at(b), l.distance(a, b));
                if (da - db).abs() > distance + 1e-9 {
                    failures += 1;
                    first.get_or_insert(LipschitzViolation { grid: gi, a, b, da, db, distance });
                }
            }
        }
    }
    Ok(SuiteReport { suite: "lipschitz".into(), cases, failures, first_counterexample: first })
}

// ---------------------------------------------------------------------------
// Triangle inequality

/// One parent / current / next triple with its clearances and leg lengths.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleCase {
    pub s_p: GridCoord,
    pub s_c: GridCoord,
    pub s_n: GridCoord,
    pub resolution: f64,
    /// Clearance at `s_p`.
    pub p: f64,
    /// Clearance at `s_c`.
    pub c: f64,
    /// Clearance at `s_n`.
    pub n: f64,
    /// `‖s_n − s_p‖`.
    pub l: f64,
    /// `‖s_c − s_p‖`.
    pub d: f64,
    /// `‖s_n − s_c‖`, one grid step.
    pub a: f64,
}

impl TriangleCase {
    pub fn from_values(p: f64, c: f64, n: f64, l: f64, d: f64, a: f64) -> Self {
        let o = GridCoord::new(0, 0, 0);
        Self { s_p: o, s_c: o, s_n: o, resolution: 0.0, p, c, n, l, d, a }
    }

    pub fn r(&self) -> f64 {
        self.p + self.n
    }

    pub fn s(&self) -> f64 {
        self.p + self.c
    }

    pub fn t(&self) -> f64 {
        self.c + self.n
    }

    /// Direct parent → next cost, excluding the shared `g(s_p)`.
    pub fn g1(&self, c_w: f64) -> f64 {
        self.l + 2.0 * c_w / (self.r() * self.l)
    }

    /// Two-leg cost through `s_c`, excluding the shared `g(s_p)`.
    pub fn g2(&self, c_w: f64) -> f64 {
        self.d + 2.0 * c_w / (self.s() * self.d) + self.a + 2.0 * c_w / (self.t() * self.a)
    }

    /// Lipschitz and geometric preconditions, with `≤` where distance fields
    /// on a lattice attain equality.
    pub fn premises_hold(&self) -> bool {
        let tol = 1e-12;
        (self.p - self.n).abs() <= self.l + tol
            && (self.p - self.c).abs() <= self.d + tol
            && (self.n - self.c).abs() <= self.a + tol
            && self.l <= self.d + self.a + tol
            && self.l >= self.a - tol
            && self.d >= self.a - tol
            && self.p > 0.0
            && self.c > 0.0
            && self.n > 0.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TriangleReport {
    #[serde(flatten)]
    pub summary: SuiteReport<TriangleCase>,
    /// Cases where the direct edge's penalty exceeds the two-leg penalty.
    /// Such cases are allowed; the length terms cover them.
    pub penalty_order_inversions: usize,
    /// Failures where the direct edge is shorter than the first leg (`L < d`).
    pub failures_with_short_direct_edge: usize,
}

const TRIANGLE_GRIDS: usize = 16;
const TRIANGLE_DIM: usize = 24;
const TRIANGLE_RESOLUTIONS: [f64; 4] = [0.1, 0.2, 0.5, 1.0];
/// Parent search radius in voxels; also the line-of-sight bound.
const TRIANGLE_REACH: i64 = 5;
const CHUNK: usize = 8192;

fn random_obstacle_grid(rng: &mut ChaCha8Rng, res: f64) -> Result<OccupancyGrid> {
    let n = TRIANGLE_DIM;
    let mut g = OccupancyGrid::new([n, n, n], res, WorldPoint::default())?;
    for _ in 0..rng.gen_range(1..6) {
        let lo: [usize; 3] = std::array::from_fn(|_| rng.gen_range(0..n));
        let hi: [usize; 3] = std::array::from_fn(|a| (lo[a] + rng.gen_range(1..8)).min(n));
        g.fill_box(lo, hi, true);
    }
    let scatter = rng.gen_range(0..n * n * n / 50);
    for _ in 0..scatter {
        g.set(GridCoord::new(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)), true);
    }
    Ok(g)
}

fn triangle_grids(seed: u64) -> Result<Vec<EdfGrid>> {
    (0..TRIANGLE_GRIDS)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x5151 + i as u64));
            let g = random_obstacle_grid(&mut rng, TRIANGLE_RESOLUTIONS[i % TRIANGLE_RESOLUTIONS.len()])?;
            compute_edf(&g)
        })
        .collect()
}

fn random_offset(rng: &mut ChaCha8Rng, c: GridCoord, reach: i64, dims: [usize; 3]) -> Option<GridCoord> {
    let v: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-reach..=reach));
    let p = [c.i as i64 + v[0], c.j as i64 + v[1], c.k as i64 + v[2]];
    (0..3)
        .all(|a| (0..dims[a] as i64).contains(&p[a]))
        .then(|| GridCoord::new(p[0] as usize, p[1] as usize, p[2] as usize))
}

/// Draws one triple from a real field: `s_c` a 26-neighbour of `s_n`, all
/// three free, legs ordered as `L ≥ a`, `d ≥ a`, and `L` within line of sight.
fn sample_triangle(rng: &mut ChaCha8Rng, edf: &EdfGrid) -> TriangleCase {
    let l = edf.lattice();
    let res = l.resolution;
    let max_los = TRIANGLE_REACH as f64 * res;
    loop {
        let s_n = l.coord(rng.gen_range(0..l.len()));
        let Some(s_c) = random_offset(rng, s_n, 1, l.dims).filter(|c| *c != s_n) else { continue };
        let Some(s_p) = random_offset(rng, s_c, TRIANGLE_REACH, l.dims) else { continue };
        if s_p == s_c || s_p == s_n {
            continue;
        }
        let (p, c, n) = (edf.at(s_p), edf.at(s_c), edf.at(s_n));
        if p == 0.0 || c == 0.0 || n == 0.0 {
            continue;
        }
        let (ll, d, a) = (l.distance(s_p, s_n), l.distance(s_p, s_c), l.distance(s_c, s_n));
        if ll > max_los || ll < a || d < a {
            continue;
        }
        return TriangleCase { s_p, s_c, s_n, resolution: res, p, c, n, l: ll, d, a };
    }
}

/// Samples `n_cases` triples from distance fields of random obstacle grids
/// and checks `g₁ < g₂` at `c_w = 1`.
pub fn check_triangle_inequality(n_cases: usize, seed: u64) -> Result<TriangleReport> {
    let grids = triangle_grids(seed)?;
    let chunks = n_cases.div_ceil(CHUNK);
    let per_chunk: Vec<(usize, usize, usize, Option<TriangleCase>)> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x2545_f491_4f6c_dd1d) ^ ci as u64);
            let count = CHUNK.min(n_cases - ci * CHUNK);
            let (mut fails, mut inversions, mut short, mut first) = (0, 0, 0, None);
            for m in 0..count {
                let case = sample_triangle(&mut rng, &grids[(ci * CHUNK + m) % grids.len()]);
                debug_assert!(case.premises_hold(), "{case:?}");
                if case.g1(1.0) >= case.g2(1.0) {
                    fails += 1;
                    short += (case.l < case.d) as usize;
                    first.get_or_insert(case.clone());
                }
                if 1.0 / (case.r() * case.l) > 1.0 / (case.s() * case.d) + 1.0 / (case.t() * case.a) {
                    inversions += 1;
                }
            }
            (fails, inversions, short, first)
        })
        .collect();
    let failures = per_chunk.iter().map(|c| c.0).sum();
    let penalty_order_inversions = per_chunk.iter().map(|c| c.1).sum();
    let failures_with_short_direct_edge = per_chunk.iter().map(|c| c.2).sum();
    Ok(TriangleReport {
        summary: SuiteReport {
            suite: "triangle".into(),
            cases: n_cases,
            failures,
            first_counterexample: per_chunk.into_iter().find_map(|c| c.3),
        },
        penalty_order_inversions,
        failures_with_short_direct_edge,
    })
}

/// Searches synthetic clearances that ignore the Lipschitz premises for
/// cases with `g₁ ≥ g₂`. Geometry still respects the leg ordering.
pub fn search_premise_violations(n_cases: usize, seed: u64) -> SuiteReport<TriangleCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut failures, mut first) = (0, None);
    for _ in 0..n_cases {
        let a = rng.gen_range(0.1..1.0f64);
        let d = rng.gen_range(a..3.0);
        let l = rng.gen_range(a.max(d - a)..=d + a);
        let case = TriangleCase::from_values(
            rng.gen_range(0.001..0.05),
            rng.gen_range(0.5..5.0),
            rng.gen_range(0.001..0.05),
            l,
            d,
            a,
        );
        if case.g1(1.0) >= case.g2(1.0) {
            failures += 1;
            first.get_or_insert(case);
        }
    }
    SuiteReport { suite: "triangle-adversarial".into(), cases: n_cases, failures, first_counterexample: first }
}

// ---------------------------------------------------------------------------
// Segment integral bounds

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum ConvexObstacle {
    Sphere { radius: f64 },
    /// Axis-aligned box centered at the origin with the given half extents.
    Box { half_extents: [f64; 3] },
}

impl ConvexObstacle {
    /// Exact Euclidean distance to the solid, 0 inside.
    pub fn distance(&self, p: WorldPoint) -> f64 {
        match *self {
            ConvexObstacle::Sphere { radius } => {
                (p.x * p.x + p.y * p.y + p.z * p.z).sqrt().max(radius) - radius
            }
            ConvexObstacle::Box { half_extents: h } => {
                let q = [
                    (p.x.abs() - h[0]).max(0.0),
                    (p.y.abs() - h[1]).max(0.0),
                    (p.z.abs() - h[2]).max(0.0),
                ];
                (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt()
            }
        }
    }

    fn segment_clear(&self, a: WorldPoint, b: WorldPoint) -> bool {
        match *self {
            ConvexObstacle::Sphere { radius } => {
                let ab = [b.x - a.x, b.y - a.y, b.z - a.z];
                let len2 = ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2];
                let t = (-(a.x * ab[0] + a.y * ab[1] + a.z * ab[2]) / len2).clamp(0.0, 1.0);
                let c = a.lerp(b, t);
                (c.x * c.x + c.y * c.y + c.z * c.z).sqrt() > radius
            }
            ConvexObstacle::Box { half_extents: h } => {
                // Slab test on the closed box.
                let (pa, pb) = (a.as_array(), b.as_array());
                let (mut t0, mut t1) = (0.0f64, 1.0f64);
                for ax in 0..3 {
                    let dv = pb[ax] - pa[ax];
                    if dv == 0.0 {
                        if pa[ax].abs() > h[ax] {
                            return true;
                        }
                        continue;
                    }
                    let (mut lo, mut hi) = ((-h[ax] - pa[ax]) / dv, (h[ax] - pa[ax]) / dv);
                    if lo > hi {
                        std::mem::swap(&mut lo, &mut hi);
                    }
                    t0 = t0.max(lo);
                    t1 = t1.min(hi);
                    if t0 > t1 {
                        return true;
                    }
                }
                false
            }
        }
    }
}

pub const HH_RESOLUTION: f64 = 0.125;
pub const HH_HALF_WIDTH: f64 = 4.0;
const HH_MAX_LENGTH: f64 = 4.0;

/// Lattice whose voxel centers are the multiples of `HH_RESOLUTION` in
/// `[-4, 4]³`.
pub fn hh_lattice() -> Lattice {
    let n = (2.0 * HH_HALF_WIDTH / HH_RESOLUTION) as usize + 1;
    let o = -HH_HALF_WIDTH - HH_RESOLUTION / 2.0;
    Lattice::new([n, n, n], HH_RESOLUTION, WorldPoint::new(o, o, o)).expect("static lattice")
}

/// Samples the exact distance to `obstacle` at every voxel center.
pub fn analytic_field(obstacle: ConvexObstacle) -> EdfGrid {
    EdfGrid::from_fn(hh_lattice(), |p| obstacle.distance(p)).expect("distances are finite")
}

/// Quadrature sample count used by the bound check.
pub fn hh_samples(length: f64, resolution: f64) -> usize {
    (8.0 * length / resolution).ceil() as usize + 1
}

/// Trapezoid error bound for a 1-Lipschitz integrand read at nearest voxel
/// centers: lookup error `(√3/2)·res` per sample plus `L²/(4(n−1))`.
pub fn quadrature_tolerance(length: f64, resolution: f64, n_samples: usize) -> f64 {
    3f64.sqrt() / 2.0 * resolution * length + length * length / (4.0 * (n_samples - 1) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HhCase {
    pub a: GridCoord,
    pub b: GridCoord,
    pub length: f64,
    pub lower: f64,
    pub upper: f64,
    pub quadrature: f64,
    pub tolerance: f64,
    /// `(upper − quadrature) / upper`.
    pub relative_error: f64,
    /// `L / (d(a) + d(b))`.
    pub relative_bound: f64,
}

impl HhCase {
    pub fn within_bounds(&self) -> bool {
        self.lower <= self.quadrature && self.quadrature <= self.upper + self.tolerance
    }

    pub fn within_relative_bound(&self) -> bool {
        self.relative_error <= self.relative_bound + self.tolerance / self.upper
    }
}

pub fn evaluate_segment(edf: &EdfGrid, a: GridCoord, b: GridCoord) -> Result<HhCase> {
    let bounds = edf.segment_o(a, b)?;
    let res = edf.resolution();
    let n = hh_samples(bounds.length, res);
    let quadrature = edf.segment_o_quadrature(a, b, n)?;
    Ok(HhCase {
        a,
        b,
        length: bounds.length,
        lower: bounds.lower,
        upper: bounds.upper,
        quadrature,
        tolerance: quadrature_tolerance(bounds.length, res, n),
        relative_error: (bounds.upper - quadrature) / bounds.upper,
        relative_bound: edf.relative_error_bound(a, b)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HhReport {
    #[serde(flatten)]
    pub summary: SuiteReport<HhCase>,
    pub obstacle: ConvexObstacle,
    /// Cases violating the relative error bound.
    pub relative_failures: usize,
    /// Largest `|upper − lower − L²/2|` over cases where `lower` is unclamped.
    pub max_gap_deviation: f64,
}

/// Checks `lower ≤ quadrature ≤ upper + ε` and the relative error bound on
/// random segments that stay outside `obstacle`.
pub fn check_hh_bounds(obstacle: ConvexObstacle, n_segments: usize, seed: u64) -> Result<HhReport> {
    let edf = analytic_field(obstacle);
    let lattice = *edf.lattice();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut segments = Vec::with_capacity(n_segments);
    while segments.len() < n_segments {
        let a = lattice.coord(rng.gen_range(0..lattice.len()));
        let b = lattice.coord(rng.gen_range(0..lattice.len()));
        if a == b || lattice.distance(a, b) > HH_MAX_LENGTH {
            continue;
        }
        if !obstacle.segment_clear(lattice.center(a), lattice.center(b)) {
            continue;
        }
        segments.push((a, b));
    }
    let cases = segments
        .par_iter()
        .map(|&(a, b)| evaluate_segment(&edf, a, b))
        .collect::<Result<Vec<_>>>()?;
    let failed = |c: &HhCase| !c.within_bounds();
    let max_gap_deviation = cases
        .iter()
        .filter(|c| c.lower > 0.0)
        .map(|c| (c.upper - c.lower - c.length * c.length / 2.0).abs())
        .fold(0.0, f64::max);
    Ok(HhReport {
        summary: SuiteReport {
            suite: "hh".into(),
            cases: cases.len(),
            failures: cases.iter().filter(|c| failed(c)).count(),
            first_counterexample: cases.iter().find(|c| failed(c)).cloned(),
        },
        obstacle,
        relative_failures: cases.iter().filter(|c| !c.within_relative_bound()).count(),
        max_gap_deviation,
    })
}

// ---------------------------------------------------------------------------
// 2D neighbour-selection quality study

/// The planner's default weight of 500 at 0.2 m voxels, expressed in voxel
/// units (`c_w / res³`).
pub const QUALITY_DEFAULT_CW: f64 = 62_500.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QualityConfig {
    /// Neighbours kept out of 8.
    pub k_selected: usize,
    /// Distance from the current node to the obstacle point (voxels).
    pub obstacle_radius: f64,
    pub obstacle_step_deg: f64,
    /// Goal orbit radii around the obstacle, one per setup (voxels).
    pub goal_radii: Vec<f64>,
    pub goal_step_deg: f64,
    /// Parent distance behind the current node (voxels).
    pub line_of_sight: Vec<f64>,
    /// Clearance weight in voxel units.
    pub c_w: f64,
}

impl Default for QualityConfig {
    fn default() -> Self {
        Self {
            k_selected: 3,
            obstacle_radius: 3.0,
            obstacle_step_deg: 5.0,
            goal_radii: vec![2.0, 6.0],
            goal_step_deg: 5.0,
            line_of_sight: (1..=10).map(f64::from).collect(),
            c_w: QUALITY_DEFAULT_CW,
        }
    }
}

impl QualityConfig {
    pub fn validate(&self) -> Result<()> {
        let divides = |s: f64| s > 0.0 && (360.0 / s).fract().abs() < 1e-9;
        if !(1..=8).contains(&self.k_selected) {
            return Err(Error::InvalidConfig(format!("k_selected {} not in 1..=8", self.k_selected)));
        }
        if !divides(self.obstacle_step_deg) || !divides(self.goal_step_deg) {
            return Err(Error::InvalidConfig("angular steps must divide 360".into()));
        }
        if !(self.obstacle_radius > 2f64.sqrt()) {
            return Err(Error::InvalidConfig("obstacle must lie beyond the neighbour ring".into()));
        }
        if self.goal_radii.is_empty() || self.line_of_sight.is_empty() {
            return Err(Error::InvalidConfig("empty sweep".into()));
        }
        if self.line_of_sight.iter().any(|v| !(*v > 0.0)) || self.goal_radii.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidConfig("radii and line of sight must be positive".into()));
        }
        if !(self.c_w >= 0.0) {
            return Err(Error::InvalidConfig("c_w must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QualityRow {
    pub line_of_sight: f64,
    pub configurations: usize,
    pub hits: usize,
    /// Percentage of configurations whose selection contains one of the
    /// three cheapest neighbours.
    pub score: f64,
}

/// 2D offsets in lexicographic order.
const OFFSETS_2D: [[i32; 2]; 8] = [[-1, -1], [-1, 0], [-1, 1], [0, -1], [0, 1], [1, -1], [1, 0], [1, 1]];

type V2 = [f64; 2];

fn norm2(v: V2) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

fn unit2(v: V2) -> Option<V2> {
    let n = norm2(v);
    (n > 1e-12).then(|| [v[0] / n, v[1] / n])
}

/// 2D counterpart of the planner's selection for a current node at the origin
/// and a point obstacle at `obs`. Returns offset indices, best first.
pub fn select_2d(obs: V2, goal: V2, k: usize) -> Vec<usize> {
    let d = |p: V2| norm2([p[0] - obs[0], p[1] - obs[1]]);
    let here = d([0.0, 0.0]);
    let mut retreat: Option<(usize, f64)> = None;
    for (n, o) in OFFSETS_2D.iter().enumerate() {
        let v = [o[0] as f64, o[1] as f64];
        let deriv = (here - d(v)) / norm2(v);
        if retreat.is_none_or(|(_, b)| deriv < b) {
            retreat = Some((n, deriv));
        }
    }
    let r = OFFSETS_2D[retreat.unwrap().0];
    let r = unit2([r[0] as f64, r[1] as f64]).unwrap();
    let u = match unit2(goal) {
        Some(g) => unit2([r[0] + g[0], r[1] + g[1]]).unwrap_or(g),
        None => r,
    };
    let score = |n: usize| {
        let o = OFFSETS_2D[n];
        let v = unit2([o[0] as f64, o[1] as f64]).unwrap();
        v[0] * u[0] + v[1] * u[1]
    };
    let mut order: Vec<usize> = (0..8).collect();
    order.sort_by(|&a, &b| score(b).total_cmp(&score(a)).then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// Indices of the three neighbours with the lowest `g + h` for a parent at
/// `parent`, obstacle at `obs` and goal at `goal`.
pub fn cheapest_three_2d(parent: V2, obs: V2, goal: V2, c_w: f64) -> Vec<usize> {
    let d = |p: V2| norm2([p[0] - obs[0], p[1] - obs[1]]);
    let cost = |n: usize| {
        let o = OFFSETS_2D[n];
        let v = [o[0] as f64, o[1] as f64];
        let len = norm2([v[0] - parent[0], v[1] - parent[1]]);
        let clearance = 0.5 * (d(parent) + d(v)) * len;
        len + c_w / clearance + norm2([goal[0] - v[0], goal[1] - v[1]])
    };
    let mut order: Vec<usize> = (0..8).collect();
    order.sort_by(|&a, &b| cost(a).total_cmp(&cost(b)).then(a.cmp(&b)));
    order.truncate(3);
    order
}

/// Sweeps obstacle and goal positions for every line-of-sight value. The
/// parent sits `line_of_sight` voxels behind the current node, opposite the
/// goal.
pub fn quality_study_2d(cfg: &QualityConfig) -> Result<Vec<QualityRow>> {
    cfg.validate()?;
    let steps = |s: f64| (360.0 / s).round() as usize;
    let mut configs = Vec::new();
    for oi in 0..steps(cfg.obstacle_step_deg) {
        let alpha = (oi as f64 * cfg.obstacle_step_deg).to_radians();
        let obs = [cfg.obstacle_radius * alpha.cos(), cfg.obstacle_radius * alpha.sin()];
        for &rg in &cfg.goal_radii {
            for gi in 0..steps(cfg.goal_step_deg) {
                let beta = (gi as f64 * cfg.goal_step_deg).to_radians();
                let goal = [obs[0] + rg * beta.cos(), obs[1] + rg * beta.sin()];
                if norm2(goal) < 1e-9 {
                    continue;
                }
                configs.push((obs, goal, select_2d(obs, goal, cfg.k_selected)));
            }
        }
    }
    Ok(cfg
        .line_of_sight
        .iter()
        .map(|&los| {
            let hits = configs
                .iter()
                .filter(|(obs, goal, selected)| {
                    let g = unit2(*goal).unwrap();
                    let parent = [-los * g[0], -los * g[1]];
                    let best = cheapest_three_2d(parent, *obs, *goal, cfg.c_w);
                    selected.iter().any(|n| best.contains(n))
                })
                .count();
            QualityRow {
                line_of_sight: los,
                configurations: configs.len(),
                hits,
                score: 100.0 * hits as f64 / configs.len() as f64,
            }
        })
        .collect())
}
