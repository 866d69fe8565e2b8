//! Browser bindings for the planner demo in `www/`.
//!
//! A [`Demo`] holds one generated scenario and its distance field. The page
//! draws a horizontal slice, lets the user place start and goal, and plans
//! with any of the three planners. [`quality_study`] runs the 2D neighbour
//! selection sweep.

use edf_planner::metrics::{path_length, world_waypoints};
use edf_planner::verify::{quality_study_2d, QualityConfig};
use edf_planner::voxmap::gen_scenario;
use edf_planner::{plan, Algorithm, EdfGrid, GridCoord, PlannerConfig, Scenario, ScenarioKind};
use serde_json::json;
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct Demo {
    scenario: Scenario,
    edf: EdfGrid,
}

impl Demo {
    pub fn build(kind: &str, size: usize, seed: u64) -> Result<Demo, String> {
        let kind: ScenarioKind = kind.parse()?;
        let height = (size / 2).max(16);
        let scenario = gen_scenario(kind, [size, size, height], 0.2, seed).map_err(|e| e.to_string())?;
        let edf = scenario.edf().map_err(|e| e.to_string())?;
        Ok(Demo { scenario, edf })
    }

    fn layer(&self, z: usize) -> usize {
        z.min(self.scenario.grid.dims()[2] - 1)
    }

    /// Row-major `[j][i]` slice at height `z`.
    fn slice<T>(&self, z: usize, f: impl Fn(GridCoord) -> T) -> Vec<T> {
        let [nx, ny, _] = self.scenario.grid.dims();
        let k = self.layer(z);
        (0..ny).flat_map(|j| (0..nx).map(move |i| GridCoord::new(i, j, k))).map(f).collect()
    }

    pub fn plan_json(
        &self,
        algorithm: &str,
        c_w: f64,
        start: [usize; 3],
        goal: [usize; 3],
    ) -> Result<String, String> {
        let algorithm: Algorithm = algorithm.parse().map_err(|e: edf_planner::Error| e.to_string())?;
        let cfg = PlannerConfig { c_w, ..PlannerConfig::default() };
        let s = GridCoord::new(start[0], start[1], start[2]);
        let g = GridCoord::new(goal[0], goal[1], goal[2]);
        let grid = &self.scenario.grid;
        match plan(algorithm, grid, &self.edf, &cfg, s, g) {
            Ok(r) => Ok(json!({
                "algorithm": algorithm,
                "waypoints": r.waypoints.iter().map(|c| c.as_array()).collect::<Vec<_>>(),
                "length": path_length(&world_waypoints(grid.lattice(), &r.waypoints)),
                "total_cost": r.total_cost,
                "explored_nodes": r.explored_nodes,
                "wall_time_ms": r.wall_time * 1e3,
                "fallback_used": r.fallback_used,
            })
            .to_string()),
            Err(edf_planner::Error::NoPath { explored_nodes, fallback_used }) => Ok(json!({
                "algorithm": algorithm,
                "error": "no_path",
                "explored_nodes": explored_nodes,
                "fallback_used": fallback_used,
            })
            .to_string()),
            Err(e) => Err(e.to_string()),
        }
    }
}

#[wasm_bindgen]
impl Demo {
    /// Generates a scenario of `size × size × max(size/2, 16)` voxels at 0.2 m.
    #[wasm_bindgen(constructor)]
    pub fn new(kind: &str, size: usize, seed: u32) -> Result<Demo, JsValue> {
        Demo::build(kind, size, seed as u64).map_err(|e| JsValue::from_str(&e))
    }

    pub fn dims(&self) -> Vec<usize> {
        self.scenario.grid.dims().to_vec()
    }

    pub fn start(&self) -> Vec<usize> {
        self.scenario.start.as_array().to_vec()
    }

    pub fn goal(&self) -> Vec<usize> {
        self.scenario.goal.as_array().to_vec()
    }

    pub fn max_distance(&self) -> f64 {
        self.edf.max_value()
    }

    /// 1 for occupied voxels in layer `z`.
    pub fn occupancy_slice(&self, z: usize) -> Vec<u8> {
        self.slice(z, |c| self.scenario.grid.is_occupied(c) as u8)
    }

    /// Distance to the nearest obstacle (m) for every voxel in layer `z`.
    pub fn edf_slice(&self, z: usize) -> Vec<f32> {
        self.slice(z, |c| self.edf.edf_at(c).unwrap_or(0.0) as f32)
    }

    /// Plans from `start` to `goal` (voxel indices, `[i, j, k]`) and returns JSON.
    pub fn plan(&self, algorithm: &str, c_w: f64, start: Vec<usize>, goal: Vec<usize>) -> Result<String, JsValue> {
        let arr = |v: &[usize]| -> Result<[usize; 3], JsValue> {
            v.try_into().map_err(|_| JsValue::from_str("expected three voxel indices"))
        };
        self.plan_json(algorithm, c_w, arr(&start)?, arr(&goal)?).map_err(|e| JsValue::from_str(&e))
    }
}

pub fn quality_json(k: usize, c_w: f64) -> Result<String, String> {
    let cfg = QualityConfig { k_selected: k, c_w, ..QualityConfig::default() };
    let rows = quality_study_2d(&cfg).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&rows).expect("rows serialize"))
}

/// Score per line-of-sight value when keeping `k` of the 8 neighbours, as JSON.
#[wasm_bindgen]
pub fn quality_study(k: usize, c_w: f64) -> Result<String, JsValue> {
    quality_json(k, c_w).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn slices_match_the_grid() {
        let d = Demo::build("h", 24, 1).unwrap();
        assert_eq!(d.dims(), vec![24, 24, 16]);
        let z = d.start()[2];
        let occ = d.occupancy_slice(z);
        let edf = d.edf_slice(z);
        assert_eq!(occ.len(), 24 * 24);
        for (o, e) in occ.iter().zip(&edf) {
            assert_eq!(*o == 1, *e == 0.0);
        }
        assert_eq!(d.occupancy_slice(999), d.occupancy_slice(15));
    }

    #[test]
    fn plans_between_scenario_endpoints() {
        let d = Demo::build("inverted_u", 24, 0).unwrap();
        let (s, g) = (d.scenario.start.as_array(), d.scenario.goal.as_array());
        for algo in ["astar", "lt_full", "fs_9-11"] {
            let v: Value = serde_json::from_str(&d.plan_json(algo, 500.0, s, g).unwrap()).unwrap();
            assert_eq!(v["algorithm"], algo);
            let w = v["waypoints"].as_array().unwrap();
            assert_eq!(w.first().unwrap(), &json!(s));
            assert_eq!(w.last().unwrap(), &json!(g));
        }
        assert!(d.plan_json("fs_12", 500.0, s, g).is_err());
        assert!(d.plan_json("astar", 500.0, [99, 0, 0], g).is_err());
    }

    #[test]
    fn sealed_goal_reports_no_path() {
        let d = Demo::build("sealed", 16, 0).unwrap();
        let (s, g) = (d.scenario.start.as_array(), d.scenario.goal.as_array());
        let v: Value = serde_json::from_str(&d.plan_json("fs_9", 500.0, s, g).unwrap()).unwrap();
        assert_eq!(v["error"], "no_path");
        assert_eq!(v["fallback_used"], true);
    }

    #[test]
    fn quality_rows() {
        let rows: Value = serde_json::from_str(&quality_json(8, 100.0).unwrap()).unwrap();
        let rows = rows.as_array().unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows.iter().all(|r| r["score"] == 100.0));
        assert!(quality_json(0, 100.0).is_err());
    }

    #[test]
    fn unknown_scenario_is_rejected() {
        assert!(Demo::build("spiral", 24, 0).is_err());
        assert!(Demo::build("h", 8, 0).is_err());
    }
}
