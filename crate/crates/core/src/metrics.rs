//! Path quality metrics and the seeded benchmark runner.
//!
//! Every algorithm in a suite sees the same start/goal pairs. Results are
//! reported as mean ± standard error of the mean, plus the ratio of each mean
//! to the baseline's mean.

use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::Serialize;

use crate::edf::EdfGrid;
use crate::error::{Error, Result};
use crate::search::{plan, Algorithm, PathResult, PlannerConfig};
use crate::voxmap::{sample_start_goal_separated, GridCoord, Lattice, Scenario, WorldPoint};

/// Sum of segment lengths of a polyline.
pub fn path_length(points: &[WorldPoint]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Mean heading change at interior waypoints, in degrees. Paths with fewer
/// than three waypoints score 0.
pub fn mean_angle(points: &[WorldPoint]) -> Result<f64> {
    if points.len() < 3 {
        return Ok(0.0);
    }
    let dir = |a: WorldPoint, b: WorldPoint| -> Result<[f64; 3]> {
        let d = [b.x - a.x, b.y - a.y, b.z - a.z];
        let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if n == 0.0 {
            return Err(Error::ZeroLengthSegment);
        }
        Ok([d[0] / n, d[1] / n, d[2] / n])
    };
    let mut total = 0.0;
    for w in points.windows(3) {
        let (u, v) = (dir(w[0], w[1])?, dir(w[1], w[2])?);
        let cos = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0);
        total += cos.acos().to_degrees();
    }
    Ok(total / (points.len() - 2) as f64)
}

/// Mean clearance along the polyline, resampled every `resolution` meters
/// (endpoints included) with nearest-voxel lookups.
pub fn mean_clearance(edf: &EdfGrid, points: &[WorldPoint]) -> Result<f64> {
    let Some(&first) = points.first() else {
        return Ok(0.0);
    };
    let res = edf.resolution();
    let mut sum = edf.sample_nearest(first)?;
    let mut count = 1usize;
    for w in points.windows(2) {
        let steps = ((w[0].distance(w[1]) / res).ceil() as usize).max(1);
        for m in 1..=steps {
            sum += edf.sample_nearest(w[0].lerp(w[1], m as f64 / steps as f64))?;
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

pub fn world_waypoints(lattice: &Lattice, waypoints: &[GridCoord]) -> Vec<WorldPoint> {
    waypoints.iter().map(|&c| lattice.center(c)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathMetrics {
    /// Meters.
    pub length: f64,
    pub explored: usize,
    /// Seconds.
    pub time: f64,
    /// Meters.
    pub mean_clearance: f64,
    /// Degrees.
    pub mean_angle: f64,
}

impl PathMetrics {
    pub fn evaluate(edf: &EdfGrid, result: &PathResult) -> Result<Self> {
        let pts = world_waypoints(edf.lattice(), &result.waypoints);
        Ok(Self {
            length: path_length(&pts),
            explored: result.explored_nodes,
            time: result.wall_time,
            mean_clearance: mean_clearance(edf, &pts)?,
            mean_angle: mean_angle(&pts)?,
        })
    }

    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::Time => self.time,
            Metric::Length => self.length,
            Metric::Explored => self.explored as f64,
            Metric::Clearance => self.mean_clearance,
            Metric::Angle => self.mean_angle,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Metric {
    #[serde(rename = "T")]
    Time,
    #[serde(rename = "L")]
    Length,
    #[serde(rename = "N")]
    Explored,
    #[serde(rename = "MD")]
    Clearance,
    #[serde(rename = "MA")]
    Angle,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Time, Metric::Length, Metric::Explored, Metric::Clearance, Metric::Angle];

    pub fn code(self) -> &'static str {
        match self {
            Metric::Time => "T",
            Metric::Length => "L",
            Metric::Explored => "N",
            Metric::Clearance => "MD",
            Metric::Angle => "MA",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Mean and standard error of the mean (sample standard deviation / √n).
pub fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchConfig {
    pub planner: PlannerConfig,
    pub runs: usize,
    pub seed: u64,
    pub baseline: Algorithm,
    /// Minimum straight-line distance between sampled start and goal (m).
    pub min_separation: f64,
    /// Planning calls per cell; the median wall time is reported.
    pub timing_repeats: usize,
    /// Run cells one at a time so timings do not contend for cores.
    pub serial_timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            planner: PlannerConfig::default(),
            runs: 20,
            seed: 0,
            baseline: Algorithm::AStar,
            min_separation: 2.0,
            timing_repeats: 3,
            serial_timing: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricStat {
    pub metric: Metric,
    pub mean: f64,
    pub sem: f64,
    /// `mean / baseline mean`; absent when the baseline is missing or its mean is 0.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub runs_ok: usize,
    pub runs_failed: usize,
    pub fallback_runs: usize,
    pub metrics: Vec<MetricStat>,
}

impl AlgorithmSummary {
    pub fn stat(&self, m: Metric) -> &MetricStat {
        self.metrics.iter().find(|s| s.metric == m).expect("all metrics are reported")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunFailure {
    pub pair: usize,
    pub algorithm: Algorithm,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub pairs: Vec<(GridCoord, GridCoord)>,
    /// Pairs on which every algorithm succeeded; only these enter the statistics.
    pub pairs_used: usize,
    /// Runs that found no path. Their pair is excluded from every algorithm's statistics.
    pub failures: Vec<RunFailure>,
    pub algorithms: Vec<AlgorithmSummary>,
    /// Per-pair metrics, indexed `[algorithm][pair]`; `None` marks a failure.
    #[serde(skip)]
    pub raw: Vec<Vec<Option<PathMetrics>>>,
}

impl ScenarioReport {
    pub fn summary(&self, a: Algorithm) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|s| s.algorithm == a)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricReport {
    pub config: BenchConfig,
    pub scenarios: Vec<ScenarioReport>,
}

impl MetricReport {
    /// One row per (scenario, algorithm, metric).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scenario,algorithm,metric,mean,sem,ratio,runs_ok,runs_failed\n");
        for sc in &self.scenarios {
            for a in &sc.algorithms {
                for s in &a.metrics {
                    let ratio = s.ratio.map(|r| r.to_string()).unwrap_or_default();
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        sc.scenario, a.algorithm, s.metric, s.mean, s.sem, ratio, a.runs_ok, a.runs_failed
                    );
                }
            }
        }
        out
    }

    /// True if some algorithm completed every cell it was given.
    pub fn any_algorithm_complete(&self) -> bool {
        let Some(first) = self.scenarios.first() else {
            return false;
        };
        first.algorithms.iter().enumerate().any(|(ai, _)| {
            self.scenarios.iter().all(|sc| sc.algorithms[ai].runs_failed == 0)
        })
    }
}

fn pair_seed(seed: u64, scenario: usize, run: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((scenario as u64) << 32)
        .wrapping_add(run as u64)
}

/// Plans `repeats` times and keeps the median wall time.
fn timed_plan(
    algorithm: Algorithm,
    scenario: &Scenario,
    edf: &EdfGrid,
    cfg: &PlannerConfig,
    pair: (GridCoord, GridCoord),
    repeats: usize,
) -> Result<PathResult> {
    let mut result = plan(algorithm, &scenario.grid, edf, cfg, pair.0, pair.1)?;
    let mut times = vec![result.wall_time];
    for _ in 1..repeats.max(1) {
        times.push(plan(algorithm, &scenario.grid, edf, cfg, pair.0, pair.1)?.wall_time);
    }
    times.sort_by(f64::total_cmp);
    result.wall_time = times[times.len() / 2];
    Ok(result)
}

/// Runs every algorithm on `cfg.runs` seeded start/goal pairs per scenario.
/// Distance fields are computed up front and excluded from timing.
pub fn run_benchmark(scenarios: &[Scenario], algorithms: &[Algorithm], cfg: &BenchConfig) -> Result<MetricReport> {
    if cfg.runs == 0 {
        return Err(Error::InvalidConfig("runs must be at least 1".into()));
    }
    if algorithms.is_empty() {
        return Err(Error::InvalidConfig("no algorithms given".into()));
    }
    let mut reports = Vec::with_capacity(scenarios.len());
    for (si, sc) in scenarios.iter().enumerate() {
        let edf = sc.edf()?;
        let pairs = (0..cfg.runs)
            .map(|r| {
                sample_start_goal_separated(&sc.grid, &edf, sc.min_clearance, cfg.min_separation, pair_seed(cfg.seed, si, r))
            })
            .collect::<Result<Vec<_>>>()?;

        let cells: Vec<(usize, usize)> =
            (0..algorithms.len()).flat_map(|a| (0..pairs.len()).map(move |p| (a, p))).collect();
        let run_cell = |&(a, p): &(usize, usize)| {
            timed_plan(algorithms[a], sc, &edf, &cfg.planner, pairs[p], cfg.timing_repeats)
                .and_then(|r| Ok((PathMetrics::evaluate(&edf, &r)?, r.fallback_used)))
        };
        let outcomes: Vec<Result<(PathMetrics, bool)>> = if cfg.serial_timing {
            cells.iter().map(run_cell).collect()
        } else {
            cells.par_iter().map(run_cell).collect()
        };

        let mut raw = vec![vec![None; pairs.len()]; algorithms.len()];
        let mut fallbacks = vec![0usize; algorithms.len()];
        let mut failures = Vec::new();
        for (&(a, p), outcome) in cells.iter().zip(outcomes) {
            match outcome {
                Ok((m, fb)) => {
                    raw[a][p] = Some(m);
                    fallbacks[a] += fb as usize;
                }
                Err(e @ Error::NoPath { .. }) => {
                    failures.push(RunFailure { pair: p, algorithm: algorithms[a], error: e.to_string() })
                }
                Err(e) => return Err(e),
            }
        }
        let usable: Vec<usize> = (0..pairs.len()).filter(|&p| raw.iter().all(|r| r[p].is_some())).collect();

        let stats: Vec<Vec<(f64, f64)>> = raw
            .iter()
            .map(|per_pair| {
                Metric::ALL
                    .iter()
                    .map(|&m| {
                        let vals: Vec<f64> = usable.iter().map(|&p| per_pair[p].unwrap().get(m)).collect();
                        mean_sem(&vals)
                    })
                    .collect()
            })
            .collect();
        let base = algorithms.iter().position(|a| *a == cfg.baseline);
        let summaries = algorithms
            .iter()
            .enumerate()
            .map(|(a, &algorithm)| AlgorithmSummary {
                algorithm,
                runs_ok: raw[a].iter().filter(|m| m.is_some()).count(),
                runs_failed: raw[a].iter().filter(|m| m.is_none()).count(),
                fallback_runs: fallbacks[a],
                metrics: Metric::ALL
                    .iter()
                    .enumerate()
                    .map(|(mi, &metric)| {
                        let (mean, sem) = stats[a][mi];
                        let ratio = base
                            .map(|b| stats[b][mi].0)
                            .filter(|bm| *bm != 0.0 && bm.is_finite())
                            .map(|bm| mean / bm)
                            .filter(|r| r.is_finite());
                        MetricStat { metric, mean, sem, ratio }
                    })
                    .collect(),
            })
            .collect();
        reports.push(ScenarioReport {
            scenario: sc.name.clone(),
            pairs,
            pairs_used: usable.len(),
            failures,
            algorithms: summaries,
            raw,
        });
    }
    Ok(MetricReport { config: cfg.clone(), scenarios: reports })
}

#[derive(Clone, Debug, Serialize)]
pub struct TimeCurvePoint {
    pub scenario: String,
    pub algorithm: Algorithm,
    pub c_w: f64,
    pub mean_time: f64,
    pub sem_time: f64,
    /// 95% normal-approximation interval half width.
    pub ci95: f64,
}

/// Mean planning time versus `c_w` for each algorithm.
pub fn time_curves(
    scenario: &Scenario,
    algorithms: &[Algorithm],
    weights: &[f64],
    cfg: &BenchConfig,
) -> Result<Vec<TimeCurvePoint>> {
    let mut out = Vec::new();
    for &c_w in weights {
        let mut c = cfg.clone();
        c.planner.c_w = c_w;
        let report = run_benchmark(std::slice::from_ref(scenario), algorithms, &c)?;
        for s in &report.scenarios[0].algorithms {
            let t = s.stat(Metric::Time);
            out.push(TimeCurvePoint {
                scenario: scenario.name.clone(),
                algorithm: s.algorithm,
                c_w,
                mean_time: t.mean,
                sem_time: t.sem,
                ci95: 1.96 * t.sem,
            });
        }
    }
    Ok(out)
}

pub fn time_curves_csv(points: &[TimeCurvePoint]) -> String {
    let mut out = String::from("scenario,algorithm,cw,mean_time_s,sem_time_s,ci95_s\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{},{},{}", p.scenario, p.algorithm, p.c_w, p.mean_time, p.sem_time, p.ci95);
    }
    out
}
