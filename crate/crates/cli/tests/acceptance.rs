//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Exits 0 once every criterion has run; set `ACCEPTANCE_STRICT=1` to exit 1
//! when any criterion fails.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use edf_planner::metrics::{run_benchmark, BenchConfig, Metric, MetricReport};
use edf_planner::search::OFFSETS;
use edf_planner::verify::{
    analytic_field, check_edf_exactness, check_hh_bounds, check_lipschitz, check_triangle_inequality,
    evaluate_segment, quality_study_2d, ConvexObstacle, QualityConfig,
};
use edf_planner::voxmap::{gen_scenario, Lattice};
use edf_planner::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn edf_exactness() -> Outcome {
    let t = Instant::now();
    let r = check_edf_exactness(50, 32, 0).unwrap();
    let secs = t.elapsed().as_secs_f64();
    outcome(r.passed() && secs < 30.0, format!("{} grids, {} mismatches, {secs:.2} s", r.cases, r.failures))
}

fn lipschitz() -> Outcome {
    let r = check_lipschitz(20, 48, 0).unwrap();
    outcome(r.passed(), format!("{} adjacent pairs, {} violations", r.cases, r.failures))
}

const OBSTACLES: [ConvexObstacle; 2] =
    [ConvexObstacle::Sphere { radius: 1.0 }, ConvexObstacle::Box { half_extents: [1.0, 0.5, 0.75] }];

fn hermite_hadamard() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, o) in OBSTACLES.iter().enumerate() {
        let r = check_hh_bounds(*o, 1000, i as u64).unwrap();
        pass &= r.summary.cases == 1000 && r.summary.passed();
        parts.push(format!("{} segments, {} outside bounds", r.summary.cases, r.summary.failures));
    }
    let edf = analytic_field(OBSTACLES[0]);
    let l = edf.lattice();
    let a = l.world_to_grid(WorldPoint::new(0.0, 0.0, 3.0)).unwrap();
    let b = l.world_to_grid(WorldPoint::new(0.0, 0.0, 4.0)).unwrap();
    let c = evaluate_segment(&edf, a, b).unwrap();
    let closed = (c.quadrature - 2.5).abs() <= 0.01 && c.upper == 2.5;
    pass &= closed;
    parts.push(format!("sphere (0,0,3)->(0,0,4): quadrature {:.5}, approximation {}", c.quadrature, c.upper));
    outcome(pass, parts.join("; "))
}

fn relative_error() -> Outcome {
    let mut total = 0;
    let mut bad = 0;
    for (i, o) in OBSTACLES.iter().enumerate() {
        let r = check_hh_bounds(*o, 1000, i as u64).unwrap();
        total += r.summary.cases;
        bad += r.relative_failures;
    }
    outcome(bad == 0, format!("{bad} of {total} segments exceed the relative bound"))
}

fn triangle() -> Outcome {
    let t = Instant::now();
    let r = check_triangle_inequality(1_000_000, 0).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let mut detail = format!("{} cases, {} counterexamples, {secs:.2} s", r.summary.cases, r.summary.failures);
    if let Some(c) = &r.summary.first_counterexample {
        detail += &format!(
            "; first: res {} P {:.4} C' {:.4} N' {:.4} L {:.4} d {:.4} a {:.4}",
            c.resolution, c.p, c.c, c.n, c.l, c.d, c.a
        );
    }
    outcome(r.summary.passed() && secs < 60.0, detail)
}

#[derive(PartialEq)]
struct Key(f64);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Key {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0)
    }
}

/// Dijkstra over 26-connected free voxels; returns the cost and the path's
/// axis, face-diagonal and cube-diagonal step counts.
fn dijkstra(g: &OccupancyGrid, s: GridCoord, t: GridCoord) -> Option<(f64, [usize; 3])> {
    let l = g.lattice();
    let mut dist = vec![f64::INFINITY; l.len()];
    let mut prev = vec![usize::MAX; l.len()];
    let mut heap = BinaryHeap::new();
    dist[l.index(s)] = 0.0;
    heap.push(Reverse((Key(0.0), l.index(s))));
    while let Some(Reverse((Key(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == l.index(t) {
            break;
        }
        let c = l.coord(u);
        for dv in OFFSETS {
            let Some(nb) = c.offset(dv).filter(|n| g.is_free(*n)) else { continue };
            let w = ((dv[0] * dv[0] + dv[1] * dv[1] + dv[2] * dv[2]) as f64).sqrt() * l.resolution;
            let v = l.index(nb);
            if d + w < dist[v] {
                dist[v] = d + w;
                prev[v] = u;
                heap.push(Reverse((Key(d + w), v)));
            }
        }
    }
    let ti = l.index(t);
    if !dist[ti].is_finite() {
        return None;
    }
    let mut counts = [0; 3];
    let mut v = ti;
    while v != l.index(s) {
        let p = prev[v];
        counts[(l.coord(p).dist2(l.coord(v)) - 1) as usize] += 1;
        v = p;
    }
    Some((dist[ti], counts))
}

fn step_counts(path: &[GridCoord]) -> [usize; 3] {
    let mut c = [0; 3];
    for w in path.windows(2) {
        c[(w[0].dist2(w[1]) - 1) as usize] += 1;
    }
    c
}

fn baseline_equivalence() -> Outcome {
    let cfg = PlannerConfig { c_w: 0.0, ..Default::default() };
    let (mut agree, mut bitwise, mut unreachable, mut bad) = (0, 0, 0, Vec::new());
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = Lattice::new([16; 3], 0.25, WorldPoint::default()).unwrap();
        let mut cells: Vec<bool> = (0..l.len()).map(|_| rng.gen_bool(0.25)).collect();
        let pick = |rng: &mut ChaCha8Rng, cells: &[bool]| loop {
            let i = rng.gen_range(0..cells.len());
            if !cells[i] {
                return i;
            }
        };
        let (si, ti) = (pick(&mut rng, &cells), pick(&mut rng, &cells));
        cells[0] |= cells.iter().all(|c| !c);
        let g = OccupancyGrid::from_cells(l, cells).unwrap();
        let edf = compute_edf(&g).unwrap();
        let (s, t) = (l.coord(si), l.coord(ti));
        match (dijkstra(&g, s, t), plan_astar(&g, &edf, &cfg, s, t)) {
            (Some((d, counts)), Ok(r)) => {
                if step_counts(&r.waypoints) == counts && (r.total_cost - d).abs() <= 1e-9 {
                    agree += 1;
                    bitwise += (r.total_cost == d) as usize;
                } else {
                    bad.push(seed);
                }
            }
            (None, Err(Error::NoPath { .. })) => unreachable += 1,
            _ => bad.push(seed),
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{agree} optimal paths with identical step counts ({bitwise} bit-identical sums), \
             {unreachable} unreachable on both, mismatching seeds {bad:?}"
        ),
    )
}

const FS9: Algorithm = Algorithm::Fs(NeighbourPolicy::Fixed(9));

fn scenario_suite() -> MetricReport {
    let scenarios: Vec<Scenario> =
        ScenarioKind::BENCHMARK.iter().map(|&k| gen_scenario(k, [48, 48, 24], 0.2, 0).unwrap()).collect();
    let cfg = BenchConfig { serial_timing: true, ..BenchConfig::default() };
    run_benchmark(&scenarios, &[Algorithm::AStar, Algorithm::LtFull, FS9], &cfg).unwrap()
}

fn exploration_reduction(report: &MetricReport) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for sc in &report.scenarios {
        let fs = sc.summary(FS9).unwrap();
        let lt = sc.summary(Algorithm::LtFull).unwrap();
        let n = fs.stat(Metric::Explored).mean / lt.stat(Metric::Explored).mean;
        let (tf, tl) = (fs.stat(Metric::Time).mean, lt.stat(Metric::Time).mean);
        let ok = n <= 0.80 && tf < tl;
        pass &= ok;
        parts.push(format!(
            "{} N {n:.3} T {:.4}/{:.4} s fallbacks {}{}",
            sc.scenario,
            tf,
            tl,
            fs.fallback_runs,
            if ok { "" } else { " (fails)" }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn path_quality(report: &MetricReport) -> Outcome {
    let mut length_ok = true;
    let mut angle_wins = 0;
    let mut parts = Vec::new();
    for sc in &report.scenarios {
        let fs = sc.summary(FS9).unwrap();
        let a = sc.summary(Algorithm::AStar).unwrap();
        let lr = fs.stat(Metric::Length).mean / a.stat(Metric::Length).mean;
        let (ma_fs, ma_a) = (fs.stat(Metric::Angle).mean, a.stat(Metric::Angle).mean);
        length_ok &= lr <= 1.15;
        angle_wins += (ma_fs <= ma_a) as usize;
        parts.push(format!("{} L ratio {lr:.3} MA {ma_fs:.1}/{ma_a:.1}", sc.scenario));
    }
    outcome(length_ok && angle_wins >= 3, format!("{}; MA wins {angle_wins}/4", parts.join("; ")))
}

fn quality_study() -> Outcome {
    let min = |k| {
        quality_study_2d(&QualityConfig { k_selected: k, ..QualityConfig::default() })
            .unwrap()
            .iter()
            .map(|r| r.score)
            .fold(f64::INFINITY, f64::min)
    };
    let (k5, k3) = (min(5), min(3));
    outcome(k5 == 100.0 && k3 >= 75.0, format!("k=5 minimum {k5:.2}%, k=3 minimum {k3:.2}%"))
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_edf-planner"));
    c.env("EDF_PLANNER_CACHE_DIR", std::env::temp_dir().join("edf-planner-acceptance-cache"));
    c
}

fn bench_csv(dir: &Path, name: &str) -> String {
    let out = dir.join(name);
    let status = bin()
        .args(["bench", "--seed", "7", "--runs", "5", "--timing-repeats", "1", "--out-csv"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "bench exited with {status}");
    std::fs::read_to_string(out).unwrap()
}

fn without_timing(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| l.split(',').nth(2) != Some("T")).collect()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let a = bench_csv(dir.path(), "a.csv");
    let b = bench_csv(dir.path(), "b.csv");
    let (ra, rb) = (without_timing(&a), without_timing(&b));
    let rows = ra.len().saturating_sub(1);
    outcome(ra == rb && rows > 0, format!("{rows} non-timing rows compared, identical: {}", ra == rb))
}

/// Size of the 26-connected free component containing `s`.
fn component_size(g: &OccupancyGrid, s: GridCoord) -> usize {
    let l = g.lattice();
    let mut seen = vec![false; l.len()];
    let mut queue = VecDeque::from([s]);
    seen[l.index(s)] = true;
    let mut n = 0;
    while let Some(c) = queue.pop_front() {
        n += 1;
        for o in OFFSETS {
            if let Some(nb) = c.offset(o).filter(|nb| g.is_free(*nb)) {
                if !std::mem::replace(&mut seen[l.index(nb)], true) {
                    queue.push_back(nb);
                }
            }
        }
    }
    n
}

fn no_path_record(args: &[&str]) -> (Option<i32>, serde_json::Value) {
    let out = bin().args(args).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null);
    (out.status.code(), v)
}

fn fallback() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("sealed.vxm");
    let map_s = map.to_str().unwrap();
    let gen = bin()
        .args(["gen", "--kind", "sealed", "--dims", "24", "--res", "0.2", "--seed", "0", "--out", map_s])
        .output()
        .unwrap();
    let info: serde_json::Value = serde_json::from_slice(&gen.stdout).unwrap();
    let coord = |key: &str| {
        let v: Vec<String> = info[key].as_array().unwrap().iter().map(|x| x.to_string()).collect();
        v.join(",")
    };
    let (start, goal) = (coord("start"), coord("goal"));
    let base = ["plan", "--map", map_s, "--start", &start, "--goal", &goal];

    let (code, rec) = no_path_record(&[&base[..], &["--algo", "fs_9"]].concat());
    let default_ok = code == Some(3) && rec["error"] == "no_path" && rec["fallback_used"] == true;

    let grid = OccupancyGrid::load(&map).unwrap();
    let s = info["start"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect::<Vec<_>>();
    let component = component_size(&grid, GridCoord::new(s[0], s[1], s[2]));
    let (code_full, rec_full) = no_path_record(&[&base[..], &["--algo", "lt_full"]].concat());
    let (code_fb, rec_fb) = no_path_record(&[&base[..], &["--algo", "fs_9", "--fallback", "full"]].concat());
    let explored_full = rec_full["explored_nodes"].as_u64().unwrap_or(0) as usize;
    let explored_fb = rec_fb["explored_nodes"].as_u64().unwrap_or(0) as usize;
    // One reduced pass plus one full pass: component < explored <= 2 * component.
    let once = code_full == Some(3)
        && code_fb == Some(3)
        && explored_full == component
        && explored_fb > component
        && explored_fb <= 2 * component;
    outcome(
        default_ok && once,
        format!(
            "exit {code:?}, fallback_used {}; full search explores {explored_full} of {component} reachable voxels, \
             fs_9 with full fallback explores {explored_fb}",
            rec["fallback_used"]
        ),
    )
}

fn main() {
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut record = |n: usize, name: &'static str, o: Outcome| {
        println!("[{}] {n:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };
    record(1, "EDF exactness", edf_exactness());
    record(2, "Lipschitz", lipschitz());
    record(3, "Hermite-Hadamard bounds", hermite_hadamard());
    record(4, "relative error bound", relative_error());
    record(5, "triangle inequality", triangle());
    record(6, "A* equals Dijkstra at c_w = 0", baseline_equivalence());
    let report = scenario_suite();
    record(7, "exploration reduction", exploration_reduction(&report));
    record(8, "path quality", path_quality(&report));
    record(9, "neighbour-selection quality study", quality_study());
    record(10, "bench determinism", determinism());
    record(11, "sealed-chamber fallback", fallback());

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("acceptance: {} of {} criteria passed; failing: {failed:?}", results.len() - failed.len(), results.len());
    if strict && !failed.is_empty() {
        std::process::exit(1);
    }
}
