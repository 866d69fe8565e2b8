//! Gradient-guided selection of the neighbours to expand.
//!
//! The retreat direction is the neighbour with the most negative directional
//! derivative of the field. It is blended with the goal direction into a unit
//! vector `u`, and offsets are ranked by the cosine between their direction
//! and `u`. A fixed count `k` keeps the top `k` of that ranking, which forms
//! a cap of cells around the best candidate.

use crate::edf::EdfGrid;
use crate::search::NeighbourPolicy;
use crate::voxmap::GridCoord;

/// The 26 neighbour offsets in lexicographic `(di, dj, dk)` order.
pub const OFFSETS: [[i32; 3]; 26] = {
    let mut out = [[0i32; 3]; 26];
    let mut n = 0;
    let mut i = -1;
    while i <= 1 {
        let mut j = -1;
        while j <= 1 {
            let mut k = -1;
            while k <= 1 {
                if !(i == 0 && j == 0 && k == 0) {
                    out[n] = [i, j, k];
                    n += 1;
                }
                k += 1;
            }
            j += 1;
        }
        i += 1;
    }
    out
};

/// Index of `-OFFSETS[i]`; the table is symmetric about its middle.
#[inline]
pub(crate) const fn opposite(i: usize) -> usize {
    25 - i
}

pub(crate) fn offset_norm(o: [i32; 3]) -> f64 {
    ((o[0] * o[0] + o[1] * o[1] + o[2] * o[2]) as f64).sqrt()
}

fn unit_offsets() -> &'static [[f64; 3]; 26] {
    static UNITS: std::sync::OnceLock<[[f64; 3]; 26]> = std::sync::OnceLock::new();
    UNITS.get_or_init(|| {
        let mut u = [[0.0; 3]; 26];
        for (slot, o) in u.iter_mut().zip(OFFSETS) {
            let n = offset_norm(o);
            *slot = [o[0] as f64 / n, o[1] as f64 / n, o[2] as f64 / n];
        }
        u
    })
}

fn inv_norms() -> &'static [f64; 26] {
    static INV: std::sync::OnceLock<[f64; 26]> = std::sync::OnceLock::new();
    INV.get_or_init(|| std::array::from_fn(|n| 1.0 / offset_norm(OFFSETS[n])))
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalize(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = dot(v, v).sqrt();
    (n > 1e-12).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

/// Outcome of one selection, exposing the intermediate directions.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighbourChoice {
    /// Offset of the fastest retreat from obstacles, if any neighbour is in bounds.
    pub retreat: Option<[i32; 3]>,
    /// Blended unit direction.
    pub direction: [f64; 3],
    /// Selected offsets, best candidate first.
    pub offsets: Vec<[i32; 3]>,
}

/// Picks the neighbours of `s` to expand toward `goal` under `policy`.
pub fn choose_neighbours(edf: &EdfGrid, s: GridCoord, goal: GridCoord, policy: NeighbourPolicy) -> NeighbourChoice {
    let mut idx = Vec::with_capacity(26);
    let (retreat, direction) = select_into(edf, s, goal, policy, &mut idx);
    NeighbourChoice {
        retreat: retreat.map(|r| OFFSETS[r]),
        direction,
        offsets: idx.into_iter().map(|i| OFFSETS[i as usize]).collect(),
    }
}

/// Writes selected offset indices into `out`. Returns the retreat offset
/// index and the blended direction.
pub(crate) fn select_into(
    edf: &EdfGrid,
    s: GridCoord,
    goal: GridCoord,
    policy: NeighbourPolicy,
    out: &mut Vec<u8>,
) -> (Option<usize>, [f64; 3]) {
    out.clear();
    if policy == NeighbourPolicy::Full26 {
        out.extend(0..26u8);
        return (None, [0.0; 3]);
    }
    let lattice = edf.lattice();
    let [nx, ny, nz] = lattice.dims;
    let dist = edf.values();
    let idx = lattice.index(s);
    let here = dist[idx];
    let inv = inv_norms();
    // Scaled by the resolution, which does not change the argmin.
    let mut retreat: Option<(usize, f64)> = None;
    let interior = (1..nx.saturating_sub(1)).contains(&s.i)
        && (1..ny.saturating_sub(1)).contains(&s.j)
        && (1..nz.saturating_sub(1)).contains(&s.k);
    if interior {
        let (sj, si) = (nz as isize, (ny * nz) as isize);
        for (n, o) in OFFSETS.iter().enumerate() {
            let ni = (idx as isize + o[0] as isize * si + o[1] as isize * sj + o[2] as isize) as usize;
            let deriv = (here - dist[ni]) * inv[n];
            if retreat.is_none_or(|(_, best)| deriv < best) {
                retreat = Some((n, deriv));
            }
        }
    } else {
        for (n, o) in OFFSETS.iter().enumerate() {
            // Out-of-map neighbours count as +inf and are never the retreat.
            let Some(c) = s.offset(*o).filter(|c| lattice.contains(*c)) else {
                continue;
            };
            let deriv = (here - edf.at(c)) * inv[n];
            if retreat.is_none_or(|(_, best)| deriv < best) {
                retreat = Some((n, deriv));
            }
        }
    }
    let units = unit_offsets();
    let retreat_dir = retreat.map(|(n, _)| units[n]);
    let d = s.delta(goal);
    let goal_dir = normalize([d[0] as f64, d[1] as f64, d[2] as f64]);
    let direction = match (retreat_dir, goal_dir) {
        (Some(r), Some(g)) => normalize([r[0] + g[0], r[1] + g[1], r[2] + g[2]]).unwrap_or(g),
        (None, Some(g)) => g,
        (Some(r), None) => r,
        (None, None) => [0.0; 3],
    };

    let k = match policy {
        NeighbourPolicy::Full26 => unreachable!(),
        NeighbourPolicy::Fixed(k) => k,
        NeighbourPolicy::Adaptive { near, far } => match (retreat_dir, goal_dir) {
            (Some(r), Some(g)) if dot(r, g) > 0.0 => near,
            _ => far,
        },
    } as usize;

    // Descending score, then ascending index, packed into one integer key.
    // Scores that differ only in the lowest five mantissa bits tie.
    let mut keys: [u64; 26] = std::array::from_fn(|i| {
        let bits = (-dot(units[i], direction)).to_bits();
        let ordered = if bits >> 63 == 1 { !bits } else { bits | (1 << 63) };
        (ordered & !0x1f) | i as u64
    });
    let take = if k == 10 { 9 } else { k.min(26) };
    if take < 26 {
        keys.select_nth_unstable(take);
    }
    keys[..take].sort_unstable();
    out.extend(keys[..take].iter().map(|key| (key & 0x1f) as u8));
    if k == 10 {
        out.push(opposite(out[0] as usize) as u8);
    }
    (retreat.map(|(n, _)| n), direction)
}
