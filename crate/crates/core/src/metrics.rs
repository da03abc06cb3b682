//! Coverage of the learned model and random task targets.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)]
use num_traits::Float;

use crate::explore::{CellLabel, PassageGrid, CELL_SIZE};
use crate::geometry::{Cell, Point};
use crate::skeleton::Skeleton;
use crate::world::World;

pub const MAX_CONSECUTIVE_REJECTIONS: usize = 10_000;

/// 1m cells whose centre is free at `clearance`.
pub fn free_cells(world: &World, clearance: f64) -> Vec<Cell> {
    let b = world.bounds();
    let cols = (b.width / CELL_SIZE).ceil() as i32;
    let rows = (b.height / CELL_SIZE).ceil() as i32;
    let mut out = Vec::new();
    for i in 0..cols {
        for j in 0..rows {
            let c = Cell::new(i, j);
            let p = c.center(CELL_SIZE);
            if b.contains(p) && world.is_free(p, clearance) {
                out.push(c);
            }
        }
    }
    out
}

/// Fraction of free cells that are Passage-labeled or whose centre lies in
/// some region.
pub fn coverage(grid: &PassageGrid, skeleton: &Skeleton, world: &World, clearance: f64) -> f64 {
    let free = free_cells(world, clearance);
    coverage_of(&free, grid, skeleton)
}

pub fn coverage_of(free: &[Cell], grid: &PassageGrid, skeleton: &Skeleton) -> f64 {
    if free.is_empty() {
        return 0.0;
    }
    let covered = free
        .iter()
        .filter(|c| {
            matches!(grid.label(**c), Some(CellLabel::Passage(_)))
                || skeleton.region_at(c.center(CELL_SIZE)).is_some()
        })
        .count();
    covered as f64 / free.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TooCluttered;

impl fmt::Display for TooCluttered {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{MAX_CONSECUTIVE_REJECTIONS} consecutive target samples were rejected"
        )
    }
}

impl core::error::Error for TooCluttered {}

/// `n` points drawn uniformly from free space at `clearance`.
pub fn generate_targets(
    world: &World,
    n: usize,
    seed: u64,
    clearance: f64,
) -> Result<Vec<Point>, TooCluttered> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = world.bounds();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut rejected = 0;
        loop {
            let p = Point::new(rng.gen_range(0.0..b.width), rng.gen_range(0.0..b.height));
            if world.is_free(p, clearance) {
                out.push(p);
                break;
            }
            rejected += 1;
            if rejected >= MAX_CONSECUTIVE_REJECTIONS {
                return Err(TooCluttered);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Segment;
    use crate::world::Bounds;

    fn open_box(w: f64, h: f64) -> World {
        let c = [
            Point::new(0.0, 0.0),
            Point::new(w, 0.0),
            Point::new(w, h),
            Point::new(0.0, h),
        ];
        let walls = (0..4).map(|k| Segment::new(c[k], c[(k + 1) % 4])).collect();
        World::new(
            "box",
            Bounds {
                width: w,
                height: h,
            },
            walls,
        )
        .unwrap()
    }

    #[test]
    fn empty_model_has_no_coverage() {
        let w = open_box(10.0, 10.0);
        assert_eq!(
            coverage(&PassageGrid::new(w.bounds()), &Skeleton::default(), &w, 0.4),
            0.0
        );
        assert_eq!(free_cells(&w, 0.4).len(), 100);
    }

    #[test]
    fn full_grid_has_full_coverage() {
        let w = open_box(4.0, 4.0);
        let mut g = PassageGrid::new(w.bounds());
        for c in free_cells(&w, 0.4) {
            g.set(c, CellLabel::Passage(0));
        }
        assert_eq!(coverage(&g, &Skeleton::default(), &w, 0.4), 1.0);
    }

    #[test]
    fn targets_are_seeded_and_clear() {
        let w = open_box(10.0, 10.0);
        assert!(generate_targets(&w, 0, 1, 0.4).unwrap().is_empty());
        let a = generate_targets(&w, 20, 9, 0.4).unwrap();
        assert_eq!(a, generate_targets(&w, 20, 9, 0.4).unwrap());
        assert!(a.iter().all(|p| w.clearance(*p) >= 0.4));
        assert_eq!(generate_targets(&w, 1, 9, 6.0), Err(TooCluttered));
    }
}
