use std::fs;
use std::io::{self, Write};
use std::path::Path;

use edf_planner::metrics::{self, run_benchmark, time_curves, time_curves_csv, BenchConfig, PathMetrics};
use edf_planner::verify::{self, ConvexObstacle, QualityConfig};
use edf_planner::voxmap::{gen_scenario, load_pointcloud_xyz};
use edf_planner::{plan as run_planner, Algorithm, PlannerConfig, Scenario};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::{edf_for, fresh_edf, load_map};
use crate::error::{CliError, Result};
use crate::{BenchArgs, EdfArgs, GenArgs, PlanArgs, PlannerArgs, PlotArgs, Suite, SuiteArgs, VerifyArgs};

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(CliError::io(path))
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::io("<stdout>")(e)),
        _ => Ok(()),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}

fn planner_config(a: &PlannerArgs) -> PlannerConfig {
    PlannerConfig { c_w: a.cw, max_los: a.los, fallback: a.fallback, ..PlannerConfig::default() }
}

pub fn gen(a: GenArgs) -> Result<()> {
    if let Some(xyz) = &a.xyz {
        let grid = load_pointcloud_xyz(xyz, a.res, a.padding)?;
        grid.save(&a.out)?;
        emit(&format!("{}\n", json!({ "out": a.out, "dims": grid.dims(), "occupied": grid.occupied_count() })))?;
        return Ok(());
    }
    let kind = a.kind.expect("clap requires --kind without --xyz");
    let sc = gen_scenario(kind, a.dims, a.res, a.seed)?;
    sc.grid.save(&a.out)?;
    emit(&format!("{}\n", json!({
            "out": a.out,
            "kind": kind,
            "dims": sc.grid.dims(),
            "start": sc.start.as_array(),
            "goal": sc.goal.as_array(),
        })))?;
    Ok(())
}

pub fn edf(a: EdfArgs) -> Result<()> {
    let map = load_map(&a.map)?;
    let edf = fresh_edf(&map.grid)?;
    edf.save(&a.out)?;
    emit(&format!("{}\n", json!({ "out": a.out, "dims": edf.dims(), "max": edf.max_value() })))?;
    Ok(())
}

pub fn plan(a: PlanArgs) -> Result<()> {
    let algorithm = match a.algo.as_str() {
        "fs" => Algorithm::Fs(a.neighbours),
        other => other.parse().map_err(|e: edf_planner::Error| CliError::Usage(e.to_string()))?,
    };
    let cfg = planner_config(&a.planner).with_neighbours(a.neighbours);
    let map = load_map(&a.map)?;
    cfg.validate(map.grid.resolution())?;
    let edf = edf_for(&map, a.edf.as_deref())?;
    let result = run_planner(algorithm, &map.grid, &edf, &cfg, a.start, a.goal)?;
    let m = PathMetrics::evaluate(&edf, &result)?;
    let world = metrics::world_waypoints(map.grid.lattice(), &result.waypoints);
    let record = json!({
        "algorithm": algorithm,
        "config": cfg,
        "start": a.start.as_array(),
        "goal": a.goal.as_array(),
        "waypoints": result.waypoints.iter().map(|c| c.as_array()).collect::<Vec<_>>(),
        "world_waypoints": world.iter().map(|p| p.as_array()).collect::<Vec<_>>(),
        "total_cost": result.total_cost,
        "explored_nodes": result.explored_nodes,
        "wall_time_s": result.wall_time,
        "fallback_used": result.fallback_used,
    });
    let line = format!(
        "algorithm={algorithm} T={:.6} L={:.4} N={} MD={:.4} MA={:.3} cost={:.4} fallback={}",
        m.time, m.length, m.explored, m.mean_clearance, m.mean_angle, result.total_cost, result.fallback_used
    );
    match &a.out {
        Some(out) => {
            write_file(out, to_json(&record))?;
            emit(&format!("{line}\n"))?;
        }
        None => {
            emit(&format!("{}\n", to_json(&record)))?;
            eprintln!("{line}");
        }
    }
    Ok(())
}

fn suite_scenarios(s: &SuiteArgs) -> Result<Vec<Scenario>> {
    if s.scenarios.is_empty() {
        return Err(CliError::Usage("no scenarios given".into()));
    }
    Ok(s.scenarios
        .iter()
        .map(|&k| gen_scenario(k, s.dims, s.res, s.map_seed))
        .collect::<edf_planner::Result<Vec<_>>>()?)
}

fn bench_config(s: &SuiteArgs, baseline: Algorithm) -> Result<BenchConfig> {
    let cfg = BenchConfig {
        planner: planner_config(&s.planner),
        runs: s.runs,
        seed: s.seed,
        baseline,
        min_separation: s.min_separation,
        timing_repeats: s.timing_repeats,
        serial_timing: s.serial_timing,
    };
    cfg.planner.validate(s.res)?;
    Ok(cfg)
}

pub fn bench(a: BenchArgs) -> Result<()> {
    let scenarios = suite_scenarios(&a.suite)?;
    let cfg = bench_config(&a.suite, a.baseline)?;
    let report = run_benchmark(&scenarios, &a.algos, &cfg)?;
    let csv = report.to_csv();
    match &a.out_csv {
        Some(p) => write_file(p, &csv)?,
        None => emit(&csv)?,
    }
    if let Some(p) = &a.out_json {
        write_file(p, to_json(&report))?;
    }
    if report.any_algorithm_complete() {
        Ok(())
    } else {
        Err(edf_planner::Error::NoPath { explored_nodes: 0, fallback_used: false }.into())
    }
}

pub fn plotdata(a: PlotArgs) -> Result<()> {
    let scenarios = suite_scenarios(&a.suite)?;
    let cfg = bench_config(&a.suite, a.algos[0])?;
    let mut points = Vec::new();
    for sc in &scenarios {
        points.extend(time_curves(sc, &a.algos, &a.weights, &cfg)?);
    }
    let csv = time_curves_csv(&points);
    match &a.out {
        Some(p) => write_file(p, csv),
        None => emit(&csv),
    }
}

fn summary(suite: &str, cases: usize, failures: usize, first: Value, extra: Value) -> Value {
    let mut v = json!({ "suite": suite, "cases": cases, "failures": failures, "first_counterexample": first });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

pub fn verify(a: VerifyArgs) -> Result<()> {
    let report = match a.suite {
        Suite::Edf => {
            let r = verify::check_edf_exactness(a.cases.unwrap_or(50), a.dim.unwrap_or(32), a.seed)?;
            serde_json::to_value(&r).expect("serializable")
        }
        Suite::Lipschitz => {
            let r = verify::check_lipschitz(a.cases.unwrap_or(20), a.dim.unwrap_or(48), a.seed)?;
            serde_json::to_value(&r).expect("serializable")
        }
        Suite::Hh => {
            let n = a.cases.unwrap_or(1000);
            let obstacles =
                [ConvexObstacle::Sphere { radius: 1.0 }, ConvexObstacle::Box { half_extents: [1.0, 0.5, 0.75] }];
            let reports = obstacles
                .iter()
                .enumerate()
                .map(|(i, &o)| verify::check_hh_bounds(o, n, a.seed.wrapping_add(i as u64)))
                .collect::<edf_planner::Result<Vec<_>>>()?;
            let failures = reports.iter().map(|r| r.summary.failures + r.relative_failures).sum();
            let first = reports
                .iter()
                .find_map(|r| r.summary.first_counterexample.as_ref())
                .map_or(Value::Null, |c| serde_json::to_value(c).expect("serializable"));
            summary(
                "hh",
                reports.iter().map(|r| r.summary.cases).sum(),
                failures,
                first,
                json!({ "obstacles": reports }),
            )
        }
        Suite::Triangle => {
            let r = verify::check_triangle_inequality(a.cases.unwrap_or(1_000_000), a.seed)?;
            serde_json::to_value(&r).expect("serializable")
        }
        Suite::TriangleAdversarial => {
            let r = verify::search_premise_violations(a.cases.unwrap_or(1_000_000), a.seed);
            serde_json::to_value(&r).expect("serializable")
        }
        Suite::Quality => {
            let cfg = QualityConfig { k_selected: a.k, c_w: a.cw, ..QualityConfig::default() };
            let rows = verify::quality_study_2d(&cfg)?;
            let low: Vec<_> = rows.iter().filter(|r| r.score < a.min_score).collect();
            let min = rows.iter().map(|r| r.score).fold(f64::INFINITY, f64::min);
            summary(
                "quality",
                rows.iter().map(|r| r.configurations).sum(),
                low.len(),
                low.first().map_or(Value::Null, |r| serde_json::to_value(r).expect("serializable")),
                json!({ "k": a.k, "c_w": a.cw, "min_score": min, "rows": rows }),
            )
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("serializable");
    match &a.out {
        Some(p) => write_file(p, &text)?,
        None => emit(&format!("{text}\n"))?,
    }
    if report["failures"].as_u64() == Some(0) {
        Ok(())
    } else {
        Err(CliError::PropertyFailed(report["suite"].as_str().unwrap_or("verify").to_string()))
    }
}
