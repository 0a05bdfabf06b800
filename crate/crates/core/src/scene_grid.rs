//! Occupancy grids for desk-scale scenes.
//!
//! A scene is a set of world-space obstacle footprints. Rasterization samples
//! footprint membership at cell centers; inflation pushes obstacle boundaries
//! outward by a safety margin using an exact Euclidean distance transform, so
//! the planner can treat the agent as a point.

use crate::edt;
use crate::error::{Error, Result};

/// Grid cell address; `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub fn new(x: usize, y: usize) -> Self {
        Cell { x, y }
    }

    /// Euclidean distance to another cell, in cell units.
    pub fn distance(&self, other: Cell) -> f64 {
        let dx = self.x as f64 - other.x as f64;
        let dy = self.y as f64 - other.y as f64;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Axis-aligned world rectangle covered by a scene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: (f64, f64),
    pub max: (f64, f64),
}

impl Bounds {
    pub fn new(min: (f64, f64), max: (f64, f64)) -> Self {
        Bounds { min, max }
    }
}

/// World-space obstacle footprint. A point on the boundary counts as inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Footprint {
    Rect { min: (f64, f64), max: (f64, f64) },
    Circle { center: (f64, f64), radius: f64 },
}

impl Footprint {
    pub fn contains(&self, p: (f64, f64)) -> bool {
        match *self {
            Footprint::Rect { min, max } => {
                p.0 >= min.0 && p.0 <= max.0 && p.1 >= min.1 && p.1 <= max.1
            }
            Footprint::Circle { center, radius } => {
                let dx = p.0 - center.0;
                let dy = p.1 - center.1;
                dx * dx + dy * dy <= radius * radius
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Footprint::Rect { min, max } => {
                if !(min.0.is_finite() && min.1.is_finite() && max.0.is_finite() && max.1.is_finite()) {
                    return Err(Error::invalid("rect footprint has non-finite corners"));
                }
                if min.0 > max.0 || min.1 > max.1 {
                    return Err(Error::invalid("rect footprint has min corner beyond max corner"));
                }
            }
            Footprint::Circle { center, radius } => {
                if !(center.0.is_finite() && center.1.is_finite() && radius.is_finite()) {
                    return Err(Error::invalid("circle footprint has non-finite parameters"));
                }
                if radius < 0.0 {
                    return Err(Error::invalid("circle footprint has negative radius"));
                }
            }
        }
        Ok(())
    }
}

/// Row-major boolean occupancy raster. `origin` is the world position of the
/// center of cell (0, 0); cell centers are spaced `resolution` meters apart.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    origin: (f64, f64),
    walkable: Vec<bool>,
}

impl OccupancyGrid {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.x < self.width && cell.y < self.height
    }

    pub fn is_walkable(&self, cell: Cell) -> bool {
        self.contains(cell) && self.walkable[cell.y * self.width + cell.x]
    }

    /// Builds a grid directly from a walkability mask (row-major).
    pub fn from_walkable(
        width: usize,
        height: usize,
        resolution: f64,
        origin: (f64, f64),
        walkable: Vec<bool>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("grid dimensions must be positive"));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Error::invalid("grid resolution must be positive and finite"));
        }
        if walkable.len() != width * height {
            return Err(Error::invalid(format!(
                "walkable mask has {} entries, expected {}",
                walkable.len(),
                width * height
            )));
        }
        Ok(OccupancyGrid { width, height, resolution, origin, walkable })
    }

    /// World position of a cell center.
    pub fn cell_to_world(&self, cell: Cell) -> (f64, f64) {
        (
            self.origin.0 + cell.x as f64 * self.resolution,
            self.origin.1 + cell.y as f64 * self.resolution,
        )
    }

    /// Nearest-center lookup. The covered area spans half a cell beyond the
    /// outermost centers; points outside it are rejected.
    pub fn world_to_cell(&self, point: (f64, f64)) -> Result<Cell> {
        let rx = (point.0 - self.origin.0) / self.resolution;
        let ry = (point.1 - self.origin.1) / self.resolution;
        if !(rx.is_finite() && ry.is_finite()) {
            return Err(Error::invalid("non-finite world point"));
        }
        if rx < -0.5 || ry < -0.5 || rx > self.width as f64 - 0.5 || ry > self.height as f64 - 0.5 {
            return Err(Error::OutOfRange(format!(
                "point ({}, {}) lies outside the rasterized area",
                point.0, point.1
            )));
        }
        let cx = (rx.round().max(0.0) as usize).min(self.width - 1);
        let cy = (ry.round().max(0.0) as usize).min(self.height - 1);
        Ok(Cell::new(cx, cy))
    }

    /// Text raster for debugging: PGM header, then one row per line with
    /// 1 = walkable, 0 = blocked. Row 0 is printed first.
    pub fn dump_pgm(&self) -> String {
        let mut s = String::with_capacity(self.width * self.height * 2 + 32);
        s.push_str(&format!("P2\n{} {}\n1\n", self.width, self.height));
        for y in 0..self.height {
            for x in 0..self.width {
                if x > 0 {
                    s.push(' ');
                }
                s.push(if self.walkable[y * self.width + x] { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    /// Count of walkable cells.
    pub fn walkable_count(&self) -> usize {
        self.walkable.iter().filter(|&&w| w).count()
    }
}

/// Samples footprint membership at every cell center. A cell is blocked iff
/// its center lies inside (or on the boundary of) any footprint.
pub fn rasterize_scene(
    bounds: Bounds,
    resolution: f64,
    footprints: &[Footprint],
) -> Result<OccupancyGrid> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::invalid("resolution must be positive and finite"));
    }
    let (w, h) = (bounds.max.0 - bounds.min.0, bounds.max.1 - bounds.min.1);
    if !(w.is_finite() && h.is_finite()) || w <= 0.0 || h <= 0.0 {
        return Err(Error::invalid("bounds must span a non-degenerate rectangle"));
    }
    for f in footprints {
        f.validate()?;
    }
    let width = (w / resolution).ceil() as usize;
    let height = (h / resolution).ceil() as usize;
    let origin = (bounds.min.0 + resolution / 2.0, bounds.min.1 + resolution / 2.0);
    let mut walkable = vec![true; width * height];
    for y in 0..height {
        for x in 0..width {
            let p = (
                origin.0 + x as f64 * resolution,
                origin.1 + y as f64 * resolution,
            );
            if footprints.iter().any(|f| f.contains(p)) {
                walkable[y * width + x] = false;
            }
        }
    }
    Ok(OccupancyGrid { width, height, resolution, origin, walkable })
}

/// Blocks every cell whose center lies within `margin` meters of a blocked
/// cell center. Distances come from an exact Euclidean distance transform,
/// compared in squared form so boundary ties are reproducible.
pub fn inflate_obstacles(grid: &OccupancyGrid, margin: f64) -> Result<OccupancyGrid> {
    if !(margin.is_finite() && margin >= 0.0) {
        return Err(Error::invalid("inflation margin must be non-negative and finite"));
    }
    let seed: Vec<bool> = grid.walkable.iter().map(|&w| !w).collect();
    let sq = edt::squared_edt_2d(&seed, grid.width, grid.height);
    let res_sq = grid.resolution * grid.resolution;
    let margin_sq = margin * margin;
    let walkable = sq.iter().map(|&d2| d2 * res_sq > margin_sq).collect();
    Ok(OccupancyGrid { walkable, ..grid.clone() })
}

/// A path over grid cells. Consecutive cells are 8-neighbors; `length` is the
/// Euclidean step-length sum in cell units, accumulated start to end.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    cells: Vec<Cell>,
    length: f64,
}

impl GridPath {
    /// Validates adjacency and walkability, then freezes the length.
    pub fn from_cells(cells: Vec<Cell>, grid: &OccupancyGrid) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::invalid("a path needs at least one cell"));
        }
        for pair in cells.windows(2) {
            let dx = pair[0].x.abs_diff(pair[1].x);
            let dy = pair[0].y.abs_diff(pair[1].y);
            if dx > 1 || dy > 1 || (dx == 0 && dy == 0) {
                return Err(Error::invalid(format!(
                    "cells ({},{}) and ({},{}) are not distinct 8-neighbors",
                    pair[0].x, pair[0].y, pair[1].x, pair[1].y
                )));
            }
        }
        for c in &cells {
            if !grid.is_walkable(*c) {
                return Err(Error::invalid(format!("path cell ({},{}) is not walkable", c.x, c.y)));
            }
        }
        let mut length = 0.0;
        for pair in cells.windows(2) {
            length += pair[0].distance(pair[1]);
        }
        Ok(GridPath { cells, length })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn start(&self) -> Cell {
        self.cells[0]
    }

    pub fn end(&self) -> Cell {
        *self.cells.last().unwrap()
    }
}

/// Resamples a polyline to `t` points spaced uniformly in arc length. The
/// first and last input points are reproduced exactly.
pub fn resample_polyline(points: &[(f64, f64)], t: usize) -> Result<Vec<(f64, f64)>> {
    if points.len() < 2 {
        return Err(Error::invalid("polyline needs at least two points"));
    }
    if t < 2 {
        return Err(Error::invalid("resampling needs at least two output points"));
    }
    if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(Error::invalid("polyline contains non-finite points"));
    }
    let mut cum = Vec::with_capacity(points.len());
    cum.push(0.0);
    for pair in points.windows(2) {
        let dx = pair[1].0 - pair[0].0;
        let dy = pair[1].1 - pair[0].1;
        cum.push(cum.last().unwrap() + (dx * dx + dy * dy).sqrt());
    }
    let total = *cum.last().unwrap();
    let mut out = Vec::with_capacity(t);
    if total == 0.0 {
        out.resize(t, points[0]);
        return Ok(out);
    }
    out.push(points[0]);
    let mut seg = 0usize;
    for i in 1..t - 1 {
        let target = total * i as f64 / (t - 1) as f64;
        while seg + 2 < cum.len() && cum[seg + 1] < target {
            seg += 1;
        }
        // Skip zero-length segments so the interpolation weight stays finite.
        while cum[seg + 1] - cum[seg] == 0.0 && seg + 2 < cum.len() {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let w = if len > 0.0 { (target - cum[seg]) / len } else { 0.0 };
        let (a, b) = (points[seg], points[seg + 1]);
        out.push((a.0 + w * (b.0 - a.0), a.1 + w * (b.1 - a.1)));
    }
    out.push(*points.last().unwrap());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bounds(x0: f64, y0: f64, x1: f64, y1: f64) -> Bounds {
        Bounds::new((x0, y0), (x1, y1))
    }

    #[test]
    fn empty_scene_is_all_walkable() {
        let g = rasterize_scene(bounds(0.0, 0.0, 10.0, 10.0), 1.0, &[]).unwrap();
        assert_eq!((g.width(), g.height()), (10, 10));
        assert_eq!(g.walkable_count(), 100);
    }

    #[test]
    fn covering_rect_blocks_everything() {
        let fp = Footprint::Rect { min: (0.0, 0.0), max: (10.0, 10.0) };
        let g = rasterize_scene(bounds(0.0, 0.0, 10.0, 10.0), 1.0, &[fp]).unwrap();
        assert_eq!(g.walkable_count(), 0);
    }

    #[test]
    fn small_circle_blocks_exactly_one_cell() {
        // Radius 0.5 around the center of cell (5, 5); neighbor centers are
        // a full meter away.
        let fp = Footprint::Circle { center: (5.5, 5.5), radius: 0.5 };
        let g = rasterize_scene(bounds(0.0, 0.0, 11.0, 11.0), 1.0, &[fp]).unwrap();
        assert_eq!(g.walkable_count(), 11 * 11 - 1);
        assert!(!g.is_walkable(Cell::new(5, 5)));
    }

    #[test]
    fn rasterize_rejects_bad_inputs() {
        assert!(rasterize_scene(bounds(0.0, 0.0, 0.0, 5.0), 1.0, &[]).is_err());
        assert!(rasterize_scene(bounds(0.0, 0.0, 5.0, 5.0), 0.0, &[]).is_err());
        assert!(rasterize_scene(bounds(0.0, 0.0, 5.0, 5.0), -1.0, &[]).is_err());
        let bad = Footprint::Circle { center: (0.0, 0.0), radius: -1.0 };
        assert!(rasterize_scene(bounds(0.0, 0.0, 5.0, 5.0), 1.0, &[bad]).is_err());
    }

    fn single_block_grid() -> OccupancyGrid {
        let fp = Footprint::Circle { center: (3.5, 3.5), radius: 0.1 };
        rasterize_scene(bounds(0.0, 0.0, 7.0, 7.0), 1.0, &[fp]).unwrap()
    }

    #[test]
    fn zero_margin_inflation_is_identity() {
        let g = single_block_grid();
        assert_eq!(inflate_obstacles(&g, 0.0).unwrap(), g);
    }

    #[test]
    fn one_cell_margin_blocks_axis_neighbors_only() {
        let g = inflate_obstacles(&single_block_grid(), 1.0).unwrap();
        assert!(!g.is_walkable(Cell::new(3, 3)));
        assert!(!g.is_walkable(Cell::new(2, 3)));
        assert!(!g.is_walkable(Cell::new(4, 3)));
        assert!(!g.is_walkable(Cell::new(3, 2)));
        assert!(!g.is_walkable(Cell::new(3, 4)));
        // Diagonal centers sit sqrt(2) meters away.
        assert!(g.is_walkable(Cell::new(2, 2)));
        assert!(g.is_walkable(Cell::new(4, 4)));
        assert_eq!(g.walkable_count(), 49 - 5);
    }

    #[test]
    fn huge_margin_blocks_everything() {
        let g = inflate_obstacles(&single_block_grid(), 20.0).unwrap();
        assert_eq!(g.walkable_count(), 0);
    }

    #[test]
    fn inflation_on_all_free_grid_changes_nothing() {
        let g = rasterize_scene(bounds(0.0, 0.0, 5.0, 5.0), 1.0, &[]).unwrap();
        assert_eq!(inflate_obstacles(&g, 3.0).unwrap(), g);
    }

    #[test]
    fn negative_margin_is_rejected() {
        assert!(inflate_obstacles(&single_block_grid(), -0.1).is_err());
    }

    #[test]
    fn cell_world_round_trip_examples() {
        let g = OccupancyGrid::from_walkable(8, 8, 0.5, (10.0, -5.0), vec![true; 64]).unwrap();
        assert_eq!(g.cell_to_world(Cell::new(0, 0)), (10.0, -5.0));
        assert_eq!(g.cell_to_world(Cell::new(3, 1)), (11.5, -4.5));
        assert_eq!(g.world_to_cell((10.26, -4.74)).unwrap(), Cell::new(1, 1));
        assert!(g.world_to_cell((100.0, 0.0)).is_err());
    }

    #[test]
    fn world_to_cell_accepts_the_outer_half_cell() {
        let g = OccupancyGrid::from_walkable(4, 4, 1.0, (0.5, 0.5), vec![true; 16]).unwrap();
        // Exactly on the coverage edge: nearest center is the boundary cell.
        assert_eq!(g.world_to_cell((0.0, 0.0)).unwrap(), Cell::new(0, 0));
        assert_eq!(g.world_to_cell((4.0, 4.0)).unwrap(), Cell::new(3, 3));
        assert!(g.world_to_cell((4.001, 2.0)).is_err());
    }

    #[test]
    fn resample_two_points_returns_endpoints() {
        let pts = [(0.0, 0.0), (2.0, 0.0)];
        let out = resample_polyline(&pts, 2).unwrap();
        assert_eq!(out, vec![(0.0, 0.0), (2.0, 0.0)]);
    }

    #[test]
    fn resample_straight_segment_midpoint() {
        let out = resample_polyline(&[(0.0, 0.0), (2.0, 0.0)], 3).unwrap();
        assert_eq!(out[1], (1.0, 0.0));
    }

    #[test]
    fn resample_l_shape_uniform_arc_length() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)];
        let out = resample_polyline(&pts, 5).unwrap();
        let expect = [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (1.0, 0.5), (1.0, 1.0)];
        for (o, e) in out.iter().zip(expect.iter()) {
            assert_abs_diff_eq!(o.0, e.0, epsilon = 1e-12);
            assert_abs_diff_eq!(o.1, e.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn resample_degenerate_polyline_repeats_point() {
        let out = resample_polyline(&[(3.0, 4.0), (3.0, 4.0)], 4).unwrap();
        assert_eq!(out, vec![(3.0, 4.0); 4]);
    }

    #[test]
    fn resample_rejects_bad_inputs() {
        assert!(resample_polyline(&[(0.0, 0.0)], 4).is_err());
        assert!(resample_polyline(&[(0.0, 0.0), (1.0, 0.0)], 1).is_err());
        assert!(resample_polyline(&[(0.0, 0.0), (f64::NAN, 0.0)], 3).is_err());
    }

    #[test]
    fn pgm_dump_is_stable() {
        let fp = Footprint::Rect { min: (0.0, 0.0), max: (3.0, 1.0) };
        let g = rasterize_scene(bounds(0.0, 0.0, 3.0, 2.0), 1.0, &[fp]).unwrap();
        assert_eq!(g.dump_pgm(), "P2\n3 2\n1\n0 0 0\n1 1 1\n");
    }
}
