//! Seeded random occupancy grids and risk fields.

use hoiplan_core::dynaplan::RiskMap;
use hoiplan_core::scene_grid::{Cell, OccupancyGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random grid with roughly `density` blocked cells. The four corner cells
/// stay walkable so tests can use them as endpoints.
pub fn random_occupancy(seed: u64, width: usize, height: usize, density: f64) -> OccupancyGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut walkable = vec![true; width * height];
    for cell in walkable.iter_mut() {
        if rng.gen::<f64>() < density {
            *cell = false;
        }
    }
    for (x, y) in [(0, 0), (width - 1, 0), (0, height - 1), (width - 1, height - 1)] {
        walkable[y * width + x] = true;
    }
    OccupancyGrid::from_walkable(width, height, 1.0, (0.5, 0.5), walkable).unwrap()
}

/// Uniform risk values in [0, 2) on every cell.
pub fn random_risk(seed: u64, grid: &OccupancyGrid) -> RiskMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.width() * grid.height()).map(|_| rng.gen::<f64>() * 2.0).collect();
    RiskMap::from_values(grid.width(), grid.height(), values).unwrap()
}

/// Corner-to-corner endpoints for a grid.
pub fn corner_endpoints(grid: &OccupancyGrid) -> (Cell, Cell) {
    (Cell::new(0, 0), Cell::new(grid.width() - 1, grid.height() - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_grid() {
        let a = random_occupancy(7, 12, 9, 0.3);
        let b = random_occupancy(7, 12, 9, 0.3);
        for y in 0..9 {
            for x in 0..12 {
                assert_eq!(a.is_walkable(Cell::new(x, y)), b.is_walkable(Cell::new(x, y)));
            }
        }
    }

    #[test]
    fn corners_are_open() {
        let g = random_occupancy(3, 8, 6, 0.9);
        let (s, e) = corner_endpoints(&g);
        assert!(g.is_walkable(s));
        assert!(g.is_walkable(e));
    }

    #[test]
    fn risk_values_in_range() {
        let g = random_occupancy(11, 6, 6, 0.2);
        let r = random_risk(11, &g);
        for y in 0..6 {
            for x in 0..6 {
                let v = r.value(Cell::new(x, y));
                assert!((0.0..2.0).contains(&v));
            }
        }
    }
}
