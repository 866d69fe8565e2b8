use super::cost::{edge_cost_unchecked, heuristic};
use super::neighbours::OFFSETS;
use super::open_list::OpenList;
use super::{check_query, reconstruct_path, Instant, PathResult, PlannerConfig, NO_PARENT};
use crate::edf::EdfGrid;
use crate::error::{Error, Result};
use crate::voxmap::{GridCoord, OccupancyGrid};

/// A* over the 26-connected voxel graph.
pub fn plan_astar(
    occ: &OccupancyGrid,
    edf: &EdfGrid,
    cfg: &PlannerConfig,
    start: GridCoord,
    goal: GridCoord,
) -> Result<PathResult> {
    check_query(occ, edf, cfg, start, goal)?;
    let timer = Instant::now();
    let lattice = occ.lattice();
    let n = lattice.len();
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![NO_PARENT; n];
    let mut closed = vec![false; n];
    let mut open = OpenList::default();
    let h = |c: GridCoord| heuristic(lattice, c, goal, cfg.heuristic_weight);

    let start_idx = lattice.index(start);
    let goal_idx = lattice.index(goal);
    g[start_idx] = 0.0;
    parent[start_idx] = start_idx as u32;
    open.push(h(start), 0.0, start_idx);

    let mut explored = 0;
    while let Some(e) = open.pop() {
        let idx = e.idx as usize;
        if closed[idx] || e.g > g[idx] {
            continue;
        }
        explored += 1;
        if idx == goal_idx {
            return Ok(PathResult {
                waypoints: reconstruct_path(&parent, lattice, start, goal)?,
                total_cost: g[idx],
                explored_nodes: explored,
                wall_time: timer.elapsed().as_secs_f64(),
                fallback_used: false,
            });
        }
        closed[idx] = true;
        let s = lattice.coord(idx);
        for o in OFFSETS {
            let Some(nb) = s.offset(o).filter(|c| occ.is_free(*c)) else {
                continue;
            };
            let ni = lattice.index(nb);
            if closed[ni] {
                continue;
            }
            let cand = g[idx] + edge_cost_unchecked(edf, s, nb, cfg.c_w);
            if cand < g[ni] {
                g[ni] = cand;
                parent[ni] = idx as u32;
                open.push(cand + h(nb), cand, ni);
            }
        }
    }
    Err(Error::NoPath { explored_nodes: explored, fallback_used: false })
}
