use edf_planner::edf::segment_cost;
use edf_planner::search::{edge_cost, OFFSETS};
use edf_planner::verify::brute_force_edf;
use edf_planner::voxmap::Lattice;
use edf_planner::*;
use proptest::prelude::*;

fn grid_from(dims: [usize; 3], res: f64, cells: Vec<bool>) -> OccupancyGrid {
    let l = Lattice::new(dims, res, WorldPoint::default()).unwrap();
    OccupancyGrid::from_cells(l, cells).unwrap()
}

fn arb_grid() -> impl Strategy<Value = OccupancyGrid> {
    (1usize..12, 1usize..12, 1usize..12, prop::sample::select(vec![0.1, 0.2, 0.5, 1.0]), 0.01f64..0.4)
        .prop_flat_map(|(x, y, z, res, p)| {
            prop::collection::vec(prop::bool::weighted(p), x * y * z).prop_map(move |mut cells| {
                cells[0] |= !cells.iter().any(|&c| c);
                grid_from([x, y, z], res, cells)
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_equals_brute_force(g in arb_grid()) {
        let fast = compute_edf(&g).unwrap();
        let slow = brute_force_edf(&g).unwrap();
        prop_assert_eq!(fast.values(), slow.values());
    }

    #[test]
    fn field_is_one_lipschitz(g in arb_grid()) {
        let edf = compute_edf(&g).unwrap();
        let l = *edf.lattice();
        for idx in 0..l.len() {
            let c = l.coord(idx);
            for o in OFFSETS {
                let Some(n) = c.offset(o).filter(|n| l.contains(*n)) else { continue };
                let diff = (edf.edf_at(c).unwrap() - edf.edf_at(n).unwrap()).abs();
                prop_assert!(diff <= l.distance(c, n) + 1e-9);
            }
        }
    }

    #[test]
    fn zero_exactly_on_obstacles(g in arb_grid()) {
        let edf = compute_edf(&g).unwrap();
        for (occ, d) in g.cells().iter().zip(edf.values()) {
            prop_assert_eq!(*occ, *d == 0.0);
        }
    }

    #[test]
    fn bounds_sandwich_the_estimate(da in 0.01f64..10.0, db in 0.01f64..10.0, len in 0.01f64..5.0) {
        let s = segment_cost(da, db, len);
        prop_assert!(s.lower <= s.value && s.value <= s.upper);
        prop_assert!(s.lower >= 0.0);
        if s.lower > 0.0 {
            prop_assert!((s.upper - s.lower - len * len / 2.0).abs() <= 1e-12 * s.upper.max(1.0));
        }
    }

    #[test]
    fn penalty_scales_inversely_with_length(da in 0.1f64..5.0, db in 0.1f64..5.0, len in 0.1f64..3.0, c_w in 1.0f64..1000.0) {
        let p1 = c_w / segment_cost(da, db, len).value;
        let p2 = c_w / segment_cost(da, db, 2.0 * len).value;
        prop_assert!((p1 - 2.0 * p2).abs() <= 1e-9 * p1);
    }
}

#[test]
fn edge_cost_arithmetic() {
    let l = Lattice::new([4, 1, 1], 1.0, WorldPoint::default()).unwrap();
    let edf = EdfGrid::from_values(l, vec![2.0, 1.0, 3.0, 3.0]).unwrap();
    let (a, b) = (GridCoord::new(0, 0, 0), GridCoord::new(1, 0, 0));
    assert!((edge_cost(&edf, a, b, 500.0).unwrap() - (1.0 + 500.0 / 1.5)).abs() < 1e-12);
    assert_eq!(edge_cost(&edf, a, b, 0.0).unwrap(), 1.0);
}

#[test]
fn distances_across_many_seeded_grids() {
    use rand::{Rng, SeedableRng};
    for seed in 0..10u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dims = [rng.gen_range(8..24), rng.gen_range(8..24), rng.gen_range(8..24)];
        let n = dims[0] * dims[1] * dims[2];
        let density = rng.gen_range(0.001..0.1);
        let mut cells: Vec<bool> = (0..n).map(|_| rng.gen_bool(density)).collect();
        cells[n / 2] = true;
        let g = grid_from(dims, 0.2, cells);
        assert_eq!(compute_edf(&g).unwrap(), brute_force_edf(&g).unwrap());
    }
}
