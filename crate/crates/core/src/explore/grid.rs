use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{Cell, GridWalk, Point};
use crate::perception::SectorConfig;
use crate::world::{Bounds, Pose, View};

pub const CELL_SIZE: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellLabel {
    Passage(u32),
    Obstructed,
}

/// The 1m label raster. Labels are write-once.
#[derive(Clone, Debug, PartialEq)]
pub struct PassageGrid {
    bounds: Bounds,
    cells: BTreeMap<Cell, CellLabel>,
}

impl PassageGrid {
    pub fn new(bounds: Bounds) -> Self {
        Self {
            bounds,
            cells: BTreeMap::new(),
        }
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn cols(&self) -> i32 {
        (self.bounds.width / CELL_SIZE).ceil() as i32
    }

    pub fn rows(&self) -> i32 {
        (self.bounds.height / CELL_SIZE).ceil() as i32
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.i >= 0 && c.j >= 0 && c.i < self.cols() && c.j < self.rows()
    }

    pub fn cell_of(&self, p: Point) -> Cell {
        Cell::of(p, CELL_SIZE)
    }

    pub fn label(&self, c: Cell) -> Option<CellLabel> {
        self.cells.get(&c).copied()
    }

    pub fn label_at(&self, p: Point) -> Option<CellLabel> {
        self.label(self.cell_of(p))
    }

    pub fn is_passage(&self, c: Cell) -> bool {
        matches!(self.label(c), Some(CellLabel::Passage(_)))
    }

    /// Labels an unlabeled in-bounds cell. Returns true if the label was written.
    pub fn set(&mut self, c: Cell, label: CellLabel) -> bool {
        if !self.in_bounds(c) || self.cells.contains_key(&c) {
            return false;
        }
        self.cells.insert(c, label);
        true
    }

    pub fn cells(&self) -> impl Iterator<Item = (Cell, CellLabel)> + '_ {
        self.cells.iter().map(|(c, l)| (*c, *l))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn passage_count(&self) -> usize {
        self.cells
            .values()
            .filter(|l| matches!(l, CellLabel::Passage(_)))
            .count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Unreachable;

impl fmt::Display for Unreachable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("no path in the passage network")
    }
}

impl core::error::Error for Unreachable {}

/// Undirected graph over Passage-labeled cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PassageNetwork {
    adjacency: BTreeMap<Cell, BTreeSet<Cell>>,
    passage: BTreeMap<Cell, u32>,
}

impl PassageNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, c: Cell, passage_id: u32) {
        self.adjacency.entry(c).or_default();
        self.passage.entry(c).or_insert(passage_id);
    }

    /// Adds an edge between two existing, distinct vertices.
    pub fn add_edge(&mut self, a: Cell, b: Cell) -> bool {
        if a == b || !self.adjacency.contains_key(&a) || !self.adjacency.contains_key(&b) {
            return false;
        }
        let fresh = self.adjacency.get_mut(&a).map_or(false, |s| s.insert(b));
        if let Some(s) = self.adjacency.get_mut(&b) {
            s.insert(a);
        }
        fresh
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.adjacency.contains_key(&c)
    }

    pub fn passage_of(&self, c: Cell) -> Option<u32> {
        self.passage.get(&c).copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Cell> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        self.adjacency
            .get(&c)
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }

    /// Each undirected edge once, lower cell first.
    pub fn edges(&self) -> impl Iterator<Item = (Cell, Cell)> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(a, s)| s.iter().filter(move |b| *a < **b).map(move |b| (*a, *b)))
    }

    /// Vertex whose cell centre is nearest `p`; ties go to the smaller cell.
    pub fn nearest_vertex(&self, p: Point) -> Option<Cell> {
        let mut best: Option<(f64, Cell)> = None;
        for c in self.adjacency.keys() {
            let d = c.center(CELL_SIZE).distance_sq(p);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, *c));
            }
        }
        best.map(|(_, c)| c)
    }

    /// Minimum hop counts from `from` to every reachable vertex.
    pub fn hop_distances(&self, from: Cell) -> BTreeMap<Cell, usize> {
        let mut dist = BTreeMap::new();
        if !self.contains(from) {
            return dist;
        }
        let mut queue = VecDeque::new();
        dist.insert(from, 0usize);
        queue.push_back(from);
        while let Some(c) = queue.pop_front() {
            let d = dist[&c];
            for n in self.neighbors(c) {
                if !dist.contains_key(&n) {
                    dist.insert(n, d + 1);
                    queue.push_back(n);
                }
            }
        }
        dist
    }
}

/// Shortest path by edge count; neighbours are expanded in lexicographic order.
pub fn bfs_cell_path(
    network: &PassageNetwork,
    from: Cell,
    to: Cell,
) -> Result<Vec<Cell>, Unreachable> {
    if !network.contains(from) || !network.contains(to) {
        return Err(Unreachable);
    }
    let mut parent: BTreeMap<Cell, Cell> = BTreeMap::new();
    let mut queue = VecDeque::new();
    parent.insert(from, from);
    queue.push_back(from);
    while let Some(c) = queue.pop_front() {
        if c == to {
            let mut path = alloc::vec![to];
            let mut cur = to;
            while cur != from {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return Ok(path);
        }
        for n in network.neighbors(c) {
            if !parent.contains_key(&n) {
                parent.insert(n, c);
                queue.push_back(n);
            }
        }
    }
    Err(Unreachable)
}

/// Replaces each cell with the decision points nearest its centre and the
/// next cell's centre, collapsing consecutive duplicates.
pub fn cells_to_waypoints(path: &[Cell], decisions: &[Point]) -> Vec<Point> {
    let nearest = |c: Cell| -> Option<Point> {
        let target = c.center(CELL_SIZE);
        let mut best: Option<(f64, Point)> = None;
        for &p in decisions {
            let d = p.distance_sq(target);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, p));
            }
        }
        best.map(|(_, p)| p)
    };
    let mut out: Vec<Point> = Vec::new();
    let mut push = |p: Option<Point>| {
        if let Some(p) = p {
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
    };
    match path {
        [] => {}
        [only] => push(nearest(*only)),
        _ => {
            for w in path.windows(2) {
                push(nearest(w[0]));
                push(nearest(w[1]));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OccupancyConfig {
    /// Unobstructed cells this close to the robot, to its side, become Passage.
    pub passage_radius: f64,
    /// Obstructed cells this close to the robot are labeled as such.
    pub obstructed_radius: f64,
    pub sectors: SectorConfig,
}

impl Default for OccupancyConfig {
    fn default() -> Self {
        Self {
            passage_radius: 2.0,
            obstructed_radius: 4.0,
            sectors: SectorConfig::default(),
        }
    }
}

/// Hit and pass tallies for one cell in one view.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RayCounts {
    pub hits: u32,
    pub passes: u32,
}

impl RayCounts {
    /// `h / (h + p) <= 0.5`, evaluated without division.
    pub fn is_unobstructed(&self) -> bool {
        self.hits + self.passes > 0 && 2 * self.hits <= self.hits + self.passes
    }
}

/// Tallies hits and passes per cell for every ray of `view`, out to `reach`.
pub fn count_rays(view: &View, reach: f64) -> BTreeMap<Cell, RayCounts> {
    let origin = view.pose.position();
    let mut counts: BTreeMap<Cell, RayCounts> = BTreeMap::new();
    for i in 0..view.len() {
        let dir = Point::from_angle(view.ray_angle(i));
        let range = view.ranges[i];
        let hit = view.is_hit(i) && range <= reach;
        let length = if hit { range + 1e-6 } else { range.min(reach) };
        let hit_cell = hit.then(|| Cell::of(origin + dir * (range + 1e-6), CELL_SIZE));
        for visit in GridWalk::new(origin, dir, length, CELL_SIZE) {
            if visit.t_out - visit.t_in <= 1e-12 && visit.t_in > 0.0 {
                continue;
            }
            let entry = counts.entry(visit.cell).or_default();
            if Some(visit.cell) == hit_cell && visit.t_out >= length - 1e-9 {
                entry.hits += 1;
            } else {
                entry.passes += 1;
            }
        }
    }
    counts
}

/// Occupancy mapping for one view taken while traversing `passage_id`.
/// Returns the cells newly labeled Passage.
pub fn update_occupancy(
    grid: &mut PassageGrid,
    network: &mut PassageNetwork,
    view: &View,
    passage_id: u32,
    cfg: &OccupancyConfig,
) -> Vec<Cell> {
    let reach = cfg.obstructed_radius + CELL_SIZE;
    let counts = count_rays(view, reach);
    let pose = view.pose;
    let mut fresh = Vec::new();
    for (&cell, c) in &counts {
        let center = cell.center(CELL_SIZE);
        let dist = center.distance(pose.position());
        if c.is_unobstructed() {
            if dist <= cfg.passage_radius
                && beside(pose, center, &cfg.sectors)
                && grid.set(cell, CellLabel::Passage(passage_id))
            {
                network.add_vertex(cell, passage_id);
                fresh.push(cell);
            }
        } else if dist <= cfg.obstructed_radius {
            grid.set(cell, CellLabel::Obstructed);
        }
    }
    for &cell in &fresh {
        for n in cell.neighbors8() {
            if grid.is_passage(n) && counts.get(&n).map_or(false, RayCounts::is_unobstructed) {
                network.add_edge(cell, n);
            }
        }
    }
    fresh
}

fn beside(pose: Pose, p: Point, sectors: &SectorConfig) -> bool {
    let rel = pose.bearing_to(p);
    sectors.is_left(rel) || sectors.is_right(rel)
}

/// Labels the cells entered by the move `from -> to` and chains them in the
/// network, starting from `prev`, the last cell of the previous move.
/// Returns the labeled cells in order of entry.
pub fn record_travel_edge(
    grid: &mut PassageGrid,
    network: &mut PassageNetwork,
    from: Pose,
    to: Pose,
    passage_id: u32,
    prev: Option<Cell>,
) -> Vec<Cell> {
    let a = from.position();
    let b = to.position();
    let mut entered = Vec::new();
    for visit in GridWalk::segment(a, b, CELL_SIZE) {
        if visit.t_out - visit.t_in <= 1e-12 && visit.t_in > 0.0 {
            continue;
        }
        entered.push(visit.cell);
    }
    let mut labeled: Vec<Cell> = Vec::new();
    for cell in entered {
        grid.set(cell, CellLabel::Passage(passage_id));
        if !grid.is_passage(cell) {
            continue;
        }
        if !network.contains(cell) {
            network.add_vertex(cell, passage_id);
        }
        if let Some(last) = labeled.last().copied().or(prev) {
            network.add_edge(last, cell);
        }
        labeled.push(cell);
    }
    labeled
}
