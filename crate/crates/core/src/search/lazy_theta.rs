//! Lazy Theta* with a bounded line of sight and optional reduced expansion.

use super::cost::{edge_cost_unchecked, heuristic};
use super::los::{line_of_sight, Visibility};
use super::neighbours::{select_into, OFFSETS};
use super::open_list::OpenList;
use super::{check_query, reconstruct_path, Instant, NeighbourPolicy, PathResult, PlannerConfig, NO_PARENT};
use crate::edf::EdfGrid;
use crate::error::{Error, Result};
use crate::voxmap::{GridCoord, OccupancyGrid};

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    New,
    Open,
    Closed,
}

struct Search<'a> {
    occ: &'a OccupancyGrid,
    edf: &'a EdfGrid,
    cfg: &'a PlannerConfig,
    goal: GridCoord,
    g: Vec<f64>,
    parent: Vec<u32>,
    state: Vec<State>,
    open: OpenList,
    explored: usize,
}

enum Outcome {
    Found(Vec<GridCoord>, f64),
    Exhausted,
}

impl<'a> Search<'a> {
    fn new(occ: &'a OccupancyGrid, edf: &'a EdfGrid, cfg: &'a PlannerConfig, goal: GridCoord) -> Self {
        let n = occ.lattice().len();
        Self {
            occ,
            edf,
            cfg,
            goal,
            g: vec![f64::INFINITY; n],
            parent: vec![NO_PARENT; n],
            state: vec![State::New; n],
            open: OpenList::default(),
            explored: 0,
        }
    }

    fn h(&self, c: GridCoord) -> f64 {
        heuristic(self.occ.lattice(), c, self.goal, self.cfg.heuristic_weight)
    }

    fn cost(&self, a: GridCoord, b: GridCoord) -> f64 {
        edge_cost_unchecked(self.edf, a, b, self.cfg.c_w)
    }

    fn run(&mut self, start: GridCoord, policy: NeighbourPolicy) -> Result<Outcome> {
        let lattice = *self.occ.lattice();
        let start_idx = lattice.index(start);
        let goal_idx = lattice.index(self.goal);
        self.g[start_idx] = 0.0;
        self.parent[start_idx] = start_idx as u32;
        self.state[start_idx] = State::Open;
        self.open.push(self.h(start), 0.0, start_idx);
        let mut selected = Vec::with_capacity(26);

        while let Some(e) = self.open.pop() {
            let idx = e.idx as usize;
            if self.state[idx] == State::Closed || e.g > self.g[idx] {
                continue;
            }
            self.explored += 1;
            let s = lattice.coord(idx);
            self.set_vertex(s, idx);
            if idx == goal_idx {
                let path = reconstruct_path(&self.parent, &lattice, start, self.goal)?;
                return Ok(Outcome::Found(path, self.g[idx]));
            }
            self.state[idx] = State::Closed;

            select_into(self.edf, s, self.goal, policy, &mut selected);
            let p = lattice.coord(self.parent[idx] as usize);
            let gp = self.g[self.parent[idx] as usize];
            for &n in &selected {
                let Some(nb) = s.offset(OFFSETS[n as usize]).filter(|c| self.occ.is_free(*c)) else {
                    continue;
                };
                let ni = lattice.index(nb);
                match self.state[ni] {
                    State::Closed => continue,
                    State::New => {
                        self.g[ni] = f64::INFINITY;
                        self.parent[ni] = NO_PARENT;
                    }
                    State::Open => {}
                }
                // Path 2: link straight from the parent, visibility assumed.
                let cand = gp + self.cost(p, nb);
                if cand < self.g[ni] {
                    self.g[ni] = cand;
                    self.parent[ni] = self.parent[idx];
                    self.state[ni] = State::Open;
                    self.open.push(cand + self.h(nb), cand, ni);
                }
            }
        }
        Ok(Outcome::Exhausted)
    }

    /// Deferred visibility check; on failure, Path 1 reparents to the best
    /// closed 26-neighbour.
    fn set_vertex(&mut self, s: GridCoord, idx: usize) {
        let lattice = self.occ.lattice();
        let p = self.parent[idx] as usize;
        if p == idx {
            return;
        }
        let pc = lattice.coord(p);
        if line_of_sight(self.occ, pc, s, self.cfg.max_los) == Visibility::Visible {
            return;
        }
        let mut best: Option<(usize, f64)> = None;
        for o in OFFSETS {
            let Some(nb) = s.offset(o).filter(|c| lattice.contains(*c)) else {
                continue;
            };
            let ni = lattice.index(nb);
            if self.state[ni] != State::Closed {
                continue;
            }
            let cand = self.g[ni] + self.cost(nb, s);
            if best.is_none_or(|(_, b)| cand < b) {
                best = Some((ni, cand));
            }
        }
        // A popped node always has the closed node that opened it next to it.
        let (bi, bg) = best.expect("popped node without a closed neighbour");
        self.parent[idx] = bi as u32;
        self.g[idx] = bg;
    }
}

fn finish(path: Vec<GridCoord>, cost: f64, explored: usize, timer: Instant, fallback_used: bool) -> PathResult {
    PathResult {
        waypoints: path,
        total_cost: cost,
        explored_nodes: explored,
        wall_time: timer.elapsed().as_secs_f64(),
        fallback_used,
    }
}

/// Lazy Theta* expanding all 26 neighbours; no fallback.
pub fn plan_lt_full(
    occ: &OccupancyGrid,
    edf: &EdfGrid,
    cfg: &PlannerConfig,
    start: GridCoord,
    goal: GridCoord,
) -> Result<PathResult> {
    check_query(occ, edf, cfg, start, goal)?;
    let timer = Instant::now();
    let mut search = Search::new(occ, edf, cfg, goal);
    match search.run(start, NeighbourPolicy::Full26)? {
        Outcome::Found(path, cost) => Ok(finish(path, cost, search.explored, timer, false)),
        Outcome::Exhausted => Err(Error::NoPath { explored_nodes: search.explored, fallback_used: false }),
    }
}

/// Lazy Theta* expanding the gradient-selected neighbours of `cfg.neighbours`.
/// If the open list runs dry the search restarts once with `cfg.fallback`.
pub fn plan_fs(
    occ: &OccupancyGrid,
    edf: &EdfGrid,
    cfg: &PlannerConfig,
    start: GridCoord,
    goal: GridCoord,
) -> Result<PathResult> {
    check_query(occ, edf, cfg, start, goal)?;
    let timer = Instant::now();
    let mut first = Search::new(occ, edf, cfg, goal);
    if let Outcome::Found(path, cost) = first.run(start, cfg.neighbours)? {
        return Ok(finish(path, cost, first.explored, timer, false));
    }
    let mut second = Search::new(occ, edf, cfg, goal);
    let outcome = second.run(start, cfg.fallback)?;
    let explored = first.explored + second.explored;
    match outcome {
        Outcome::Found(path, cost) => Ok(finish(path, cost, explored, timer, true)),
        Outcome::Exhausted => Err(Error::NoPath { explored_nodes: explored, fallback_used: true }),
    }
}
