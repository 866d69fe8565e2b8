//! `edf-planner` command-line tool.

mod cache;
mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use edf_planner::{Algorithm, GridCoord, NeighbourPolicy, ScenarioKind};

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "edf-planner", version, about = "Any-angle planning over Euclidean distance fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario map or voxelize a point cloud into a .vxm file.
    Gen(GenArgs),
    /// Compute the distance field of a .vxm map.
    Edf(EdfArgs),
    /// Plan a path on a .vxm map.
    Plan(PlanArgs),
    /// Run the seeded benchmark suite.
    Bench(BenchArgs),
    /// Run a verification suite and print a JSON summary.
    Verify(VerifyArgs),
    /// Write mean planning time against the clearance weight as CSV.
    Plotdata(PlotArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Scenario template.
    #[arg(long, value_parser = parse_kind, required_unless_present = "xyz", conflicts_with = "xyz")]
    kind: Option<ScenarioKind>,
    /// Voxels per axis, either `N` or `NXxNYxNZ`.
    #[arg(long, value_parser = parse_dims, default_value = "64")]
    dims: [usize; 3],
    /// Voxel edge length (m).
    #[arg(long, default_value_t = 0.2)]
    res: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// ASCII point cloud, one `x y z` per line.
    #[arg(long)]
    xyz: Option<PathBuf>,
    /// Free voxels added around the point cloud's bounding box.
    #[arg(long, default_value_t = 2)]
    padding: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EdfArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct PlannerArgs {
    /// Clearance weight (m³).
    #[arg(long, default_value_t = 500.0)]
    cw: f64,
    /// Longest line-of-sight link (m).
    #[arg(long, default_value_t = 1.0)]
    los: f64,
    /// Policy for the rerun after the reduced search fails: `17` or `full`.
    #[arg(long, value_parser = parse_policy, default_value = "17")]
    fallback: NeighbourPolicy,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    map: PathBuf,
    /// Start voxel `i,j,k`.
    #[arg(long, value_parser = parse_coord)]
    start: GridCoord,
    /// Goal voxel `i,j,k`.
    #[arg(long, value_parser = parse_coord)]
    goal: GridCoord,
    /// `astar`, `lt_full`, `fs` (uses --neighbours) or `fs_<policy>`.
    #[arg(long, default_value = "fs")]
    algo: String,
    /// Neighbour policy for `fs`: 9, 10, 11, 13, 15, 17, a range such as `9-11`, or `full`.
    #[arg(long, value_parser = parse_policy, default_value = "9-11")]
    neighbours: NeighbourPolicy,
    #[command(flatten)]
    planner: PlannerArgs,
    /// Precomputed distance field; otherwise the cache is used.
    #[arg(long)]
    edf: Option<PathBuf>,
    /// Path JSON destination; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Scenario templates, comma separated.
    #[arg(long, value_parser = parse_kind, value_delimiter = ',', default_value = "h,inverted_u,near_closed_u,maze")]
    scenarios: Vec<ScenarioKind>,
    #[arg(long, value_parser = parse_dims, default_value = "48x48x24")]
    dims: [usize; 3],
    #[arg(long, default_value_t = 0.2)]
    res: f64,
    /// Seed for map generation.
    #[arg(long, default_value_t = 0)]
    map_seed: u64,
    /// Seed for start/goal sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    /// Minimum start/goal separation (m).
    #[arg(long, default_value_t = 2.0)]
    min_separation: f64,
    /// Planning calls per cell; the median time is kept.
    #[arg(long, default_value_t = 3)]
    timing_repeats: usize,
    /// Run cells one at a time.
    #[arg(long)]
    serial_timing: bool,
    #[command(flatten)]
    planner: PlannerArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    suite: SuiteArgs,
    #[arg(long, value_parser = parse_algo, value_delimiter = ',', default_value = "astar,lt_full,fs_9,fs_9-11,fs_17")]
    algos: Vec<Algorithm>,
    /// Algorithm the ratio columns are relative to.
    #[arg(long, value_parser = parse_algo, default_value = "astar")]
    baseline: Algorithm,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Edf,
    Lipschitz,
    Hh,
    Triangle,
    TriangleAdversarial,
    Quality,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Grids, segments or samples, depending on the suite.
    #[arg(long)]
    cases: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid edge for `edf` (maximum) and `lipschitz` (exact).
    #[arg(long)]
    dim: Option<usize>,
    /// Neighbours kept out of 8 in the quality study.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Clearance weight for the quality study (voxel units).
    #[arg(long, default_value_t = edf_planner::verify::QUALITY_DEFAULT_CW)]
    cw: f64,
    /// Quality rows scoring below this percentage count as failures.
    #[arg(long, default_value_t = 0.0)]
    min_score: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    suite: SuiteArgs,
    #[arg(long, value_parser = parse_algo, value_delimiter = ',', default_value = "lt_full,fs_9,fs_9-11")]
    algos: Vec<Algorithm>,
    /// Clearance weights to sweep, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,100,250,500,1000")]
    weights: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<ScenarioKind, String> {
    s.parse()
}

fn parse_policy(s: &str) -> Result<NeighbourPolicy, String> {
    s.parse().map_err(|e: edf_planner::Error| e.to_string())
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: edf_planner::Error| e.to_string())
}

fn parse_dims(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    match nums[..] {
        [n] => Ok([n; 3]),
        [x, y, z] => Ok([x, y, z]),
        _ => Err("expected N or NXxNYxNZ".into()),
    }
}

fn parse_coord(s: &str) -> Result<GridCoord, String> {
    let nums = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    match nums[..] {
        [i, j, k] => Ok(GridCoord::new(i, j, k)),
        _ => Err("expected i,j,k".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Edf(a) => commands::edf(a),
        Command::Plan(a) => commands::plan(a),
        Command::Bench(a) => commands::bench(a),
        Command::Verify(a) => commands::verify(a),
        Command::Plotdata(a) => commands::plotdata(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn report(e: &CliError) {
    let no_path = match e {
        CliError::Core(edf_planner::Error::NoPath { explored_nodes, fallback_used }) => {
            Some((*explored_nodes, *fallback_used))
        }
        _ => None,
    };
    match no_path {
        Some((explored_nodes, fallback_used)) => println!(
            "{}",
            serde_json::json!({ "error": "no_path", "explored_nodes": explored_nodes, "fallback_used": fallback_used })
        ),
        None => eprintln!("error: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_forms() {
        assert_eq!(parse_dims("64"), Ok([64; 3]));
        assert_eq!(parse_dims("48x48X24"), Ok([48, 48, 24]));
        assert!(parse_dims("4x5").is_err());
        assert!(parse_dims("ax4x4").is_err());
    }

    #[test]
    fn coords() {
        assert_eq!(parse_coord("1, 2,3"), Ok(GridCoord::new(1, 2, 3)));
        assert!(parse_coord("1,2").is_err());
        assert!(parse_coord("-1,2,3").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
