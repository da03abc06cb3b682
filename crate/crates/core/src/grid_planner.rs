//! Fine occupancy-grid A*, the baseline that skeleton planning is compared to.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::SQRT_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::Point;
use crate::world::World;

#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyRaster {
    pub cell: f64,
    pub cols: usize,
    pub rows: usize,
    free: Vec<bool>,
}

impl OccupancyRaster {
    /// Cells are free when their centre has at least `clearance` to every wall.
    pub fn build(world: &World, cell: f64, clearance: f64) -> Self {
        let b = world.bounds();
        let cols = (b.width / cell).ceil() as usize;
        let rows = (b.height / cell).ceil() as usize;
        let mut free = alloc::vec![false; cols * rows];
        for j in 0..rows {
            for i in 0..cols {
                let p = Point::new((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell);
                free[j * cols + i] = world.is_free(p, clearance);
            }
        }
        Self {
            cell,
            cols,
            rows,
            free,
        }
    }

    pub fn is_free(&self, i: usize, j: usize) -> bool {
        i < self.cols && j < self.rows && self.free[j * self.cols + i]
    }

    pub fn free_count(&self) -> usize {
        self.free.iter().filter(|f| **f).count()
    }

    /// Undirected 8-connected edges between free cells, corner cutting excluded.
    pub fn edge_count(&self) -> usize {
        let mut n = 0;
        for j in 0..self.rows {
            for i in 0..self.cols {
                if !self.is_free(i, j) {
                    continue;
                }
                for (di, dj) in [(1i64, 0i64), (0, 1), (1, 1), (1, -1)] {
                    if self.step(i, j, di, dj).is_some() {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new((i as f64 + 0.5) * self.cell, (j as f64 + 0.5) * self.cell)
    }

    fn index(&self, i: usize, j: usize) -> usize {
        j * self.cols + i
    }

    /// Neighbour reached by `(di, dj)` if the move is allowed.
    fn step(&self, i: usize, j: usize, di: i64, dj: i64) -> Option<(usize, usize)> {
        let ni = i as i64 + di;
        let nj = j as i64 + dj;
        if ni < 0 || nj < 0 {
            return None;
        }
        let (ni, nj) = (ni as usize, nj as usize);
        if !self.is_free(ni, nj) {
            return None;
        }
        if di != 0 && dj != 0 && !(self.is_free(ni, j) && self.is_free(i, nj)) {
            return None;
        }
        Some((ni, nj))
    }

    /// Free cell containing `p`, or the nearest free cell within two cells.
    pub fn locate(&self, p: Point) -> Option<(usize, usize)> {
        let ci = (p.x / self.cell).floor() as i64;
        let cj = (p.y / self.cell).floor() as i64;
        let mut best: Option<(f64, (usize, usize))> = None;
        for dj in -2..=2 {
            for di in -2..=2 {
                let (i, j) = (ci + di, cj + dj);
                if i < 0 || j < 0 || !self.is_free(i as usize, j as usize) {
                    continue;
                }
                let d = self.center(i as usize, j as usize).distance_sq(p);
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, (i as usize, j as usize)));
                }
            }
        }
        best.map(|(_, c)| c)
    }

    pub fn neighbors(
        &self,
        i: usize,
        j: usize,
    ) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        const DIRS: [(i64, i64); 8] = [
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ];
        DIRS.iter().filter_map(move |&(di, dj)| {
            let w = if di != 0 && dj != 0 { SQRT_2 } else { 1.0 } * self.cell;
            self.step(i, j, di, dj).map(|c| (c, w))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridPlanError {
    StartBlocked,
    GoalBlocked,
    Unreachable,
}

impl core::fmt::Display for GridPlanError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            GridPlanError::StartBlocked => "start is not in free space",
            GridPlanError::GoalBlocked => "goal is not in free space",
            GridPlanError::Unreachable => "goal is unreachable on the grid",
        })
    }
}

impl core::error::Error for GridPlanError {}

#[derive(Clone, Copy, PartialEq)]
struct Open {
    f: f64,
    g: f64,
    idx: usize,
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, o: &Self) -> Ordering {
        o.f.total_cmp(&self.f).then(o.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn octile(a: (usize, usize), b: (usize, usize), cell: f64) -> f64 {
    let dx = (a.0 as f64 - b.0 as f64).abs();
    let dy = (a.1 as f64 - b.1 as f64).abs();
    (dx.max(dy) + (SQRT_2 - 1.0) * dx.min(dy)) * cell
}

/// Grid path length from `start` to `goal`, plus the number of expanded cells.
pub fn grid_astar(
    raster: &OccupancyRaster,
    start: Point,
    goal: Point,
) -> Result<(f64, usize), GridPlanError> {
    let s = raster.locate(start).ok_or(GridPlanError::StartBlocked)?;
    let t = raster.locate(goal).ok_or(GridPlanError::GoalBlocked)?;
    let n = raster.cols * raster.rows;
    let mut g = alloc::vec![f64::INFINITY; n];
    let mut closed = alloc::vec![false; n];
    let mut open = BinaryHeap::new();
    let si = raster.index(s.0, s.1);
    let ti = raster.index(t.0, t.1);
    g[si] = 0.0;
    open.push(Open {
        f: octile(s, t, raster.cell),
        g: 0.0,
        idx: si,
    });
    let mut expanded = 0;
    while let Some(Open { g: gc, idx, .. }) = open.pop() {
        if closed[idx] {
            continue;
        }
        closed[idx] = true;
        expanded += 1;
        if idx == ti {
            return Ok((gc, expanded));
        }
        let (i, j) = (idx % raster.cols, idx / raster.cols);
        for ((ni, nj), w) in raster.neighbors(i, j) {
            let nidx = raster.index(ni, nj);
            let cand = gc + w;
            if !closed[nidx] && cand < g[nidx] {
                g[nidx] = cand;
                open.push(Open {
                    f: cand + octile((ni, nj), t, raster.cell),
                    g: cand,
                    idx: nidx,
                });
            }
        }
    }
    Err(GridPlanError::Unreachable)
}

/// Builds the raster and plans in one call.
pub fn grid_reference_planner(
    world: &World,
    start: Point,
    goal: Point,
    cell: f64,
    clearance: f64,
) -> Result<f64, GridPlanError> {
    let raster = OccupancyRaster::build(world, cell, clearance);
    grid_astar(&raster, start, goal).map(|(len, _)| len)
}
