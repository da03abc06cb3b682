//! Benchmark worlds built from a half-metre tile map.
//!
//! A layout is a list of corridor rectangles and partition rectangles.
//! Tiles touching a corridor become walls, and whatever is left over
//! becomes rooms; each room gets one 1.5m door onto space that is already
//! connected. Wall segments are the merged boundaries between free and
//! solid tiles.

use std::collections::VecDeque;

use hlc_core::geometry::{Cell, GridWalk};
use hlc_core::world::WorldError;
use hlc_core::{Bounds, Point, Pose, Segment, World};

pub const TILE: f64 = 0.5;
const DOOR_TILES: usize = 3;
const MIN_ROOM_AREA: f64 = 4.0;
/// Position of a door along its wall, for walls facing up/right and
/// down/left, so that doors of facing rooms do not line up.
const DOOR_OFFSETS: [f64; 2] = [0.25, 0.75];

/// Axis-aligned rectangle in metres, `[x0, x1) x [y0, y1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

pub const fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Rect {
    Rect { x0, y0, x1, y1 }
}

/// Centre line of a designed corridor.
#[derive(Clone, Debug, PartialEq)]
pub struct CorridorAxis {
    pub name: String,
    pub a: Point,
    pub b: Point,
}

impl CorridorAxis {
    /// 1m cells the axis passes through.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out: Vec<Cell> = Vec::new();
        for v in GridWalk::segment(self.a, self.b, 1.0) {
            if v.t_out - v.t_in > 1e-9 && out.last() != Some(&v.cell) {
                out.push(v.cell);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Benchmark {
    pub world: World,
    pub axes: Vec<CorridorAxis>,
    pub rooms: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Layout {
    pub width: f64,
    pub height: f64,
    pub corridors: Vec<Rect>,
    pub partitions: Vec<Rect>,
    pub posts: Vec<Point>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tile {
    Solid,
    Corridor,
    Room(usize),
    Door,
}

/// Solid/free raster with `TILE` resolution.
#[derive(Clone, Debug)]
pub struct TileMap {
    pub cols: usize,
    pub rows: usize,
    free: Vec<bool>,
}

impl TileMap {
    pub fn new(width: f64, height: f64) -> Self {
        let cols = (width / TILE).round() as usize;
        let rows = (height / TILE).round() as usize;
        Self {
            cols,
            rows,
            free: vec![false; cols * rows],
        }
    }

    pub fn is_free(&self, i: i64, j: i64) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.cols
            && (j as usize) < self.rows
            && self.free[j as usize * self.cols + i as usize]
    }

    pub fn set(&mut self, i: usize, j: usize, free: bool) {
        self.free[j * self.cols + i] = free;
    }

    pub fn carve(&mut self, r: Rect) {
        for (i, j) in tiles_of(r, self.cols, self.rows) {
            self.set(i, j, true);
        }
    }

    /// Maximal straight boundary runs between free and solid tiles.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        for k in 0..=self.rows as i64 {
            let mut run: Option<(i64, bool)> = None;
            for i in 0..=self.cols as i64 {
                let edge =
                    (i < self.cols as i64).then(|| (self.is_free(i, k - 1), self.is_free(i, k)));
                let side = edge.filter(|(a, b)| a != b).map(|(a, _)| a);
                if let Some((start, s)) = run {
                    if side != Some(s) {
                        let y = k as f64 * TILE;
                        out.push(Segment::new(
                            Point::new(start as f64 * TILE, y),
                            Point::new(i as f64 * TILE, y),
                        ));
                        run = None;
                    }
                }
                if run.is_none() {
                    run = side.map(|s| (i, s));
                }
            }
        }
        for k in 0..=self.cols as i64 {
            let mut run: Option<(i64, bool)> = None;
            for j in 0..=self.rows as i64 {
                let edge =
                    (j < self.rows as i64).then(|| (self.is_free(k - 1, j), self.is_free(k, j)));
                let side = edge.filter(|(a, b)| a != b).map(|(a, _)| a);
                if let Some((start, s)) = run {
                    if side != Some(s) {
                        let x = k as f64 * TILE;
                        out.push(Segment::new(
                            Point::new(x, start as f64 * TILE),
                            Point::new(x, j as f64 * TILE),
                        ));
                        run = None;
                    }
                }
                if run.is_none() {
                    run = side.map(|s| (j, s));
                }
            }
        }
        out
    }
}

fn tiles_of(r: Rect, cols: usize, rows: usize) -> impl Iterator<Item = (usize, usize)> {
    let i0 = ((r.x0 / TILE).round().max(0.0) as usize).min(cols);
    let i1 = ((r.x1 / TILE).round().max(0.0) as usize).min(cols);
    let j0 = ((r.y0 / TILE).round().max(0.0) as usize).min(rows);
    let j1 = ((r.y1 / TILE).round().max(0.0) as usize).min(rows);
    (j0..j1).flat_map(move |j| (i0..i1).map(move |i| (i, j)))
}

impl Layout {
    /// Tile map plus the number of rooms that were kept.
    pub fn rasterize(&self) -> (TileMap, usize) {
        let mut map = TileMap::new(self.width, self.height);
        let (cols, rows) = (map.cols, map.rows);
        let idx = |i: usize, j: usize| j * cols + i;
        let mut tiles = vec![Tile::Solid; cols * rows];
        for r in &self.corridors {
            for (i, j) in tiles_of(*r, cols, rows) {
                tiles[idx(i, j)] = Tile::Corridor;
            }
        }
        let mut blocked = vec![false; cols * rows];
        for r in &self.partitions {
            for (i, j) in tiles_of(*r, cols, rows) {
                blocked[idx(i, j)] = true;
            }
        }
        let near_corridor = |i: usize, j: usize, tiles: &[Tile]| {
            (-1i64..=1).any(|dj| {
                (-1i64..=1).any(|di| {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    ni >= 0
                        && nj >= 0
                        && (ni as usize) < cols
                        && (nj as usize) < rows
                        && tiles[idx(ni as usize, nj as usize)] == Tile::Corridor
                })
            })
        };
        let mut open = vec![false; cols * rows];
        for j in 0..rows {
            for i in 0..cols {
                open[idx(i, j)] = tiles[idx(i, j)] == Tile::Solid
                    && !blocked[idx(i, j)]
                    && !near_corridor(i, j, &tiles);
            }
        }

        // Rooms are 4-connected components of open tiles, in scan order.
        let mut rooms: Vec<Vec<(usize, usize)>> = Vec::new();
        for j in 0..rows {
            for i in 0..cols {
                if !open[idx(i, j)] || tiles[idx(i, j)] != Tile::Solid {
                    continue;
                }
                let id = rooms.len();
                let mut comp = Vec::new();
                let mut queue = VecDeque::from([(i, j)]);
                tiles[idx(i, j)] = Tile::Room(id);
                while let Some((ci, cj)) = queue.pop_front() {
                    comp.push((ci, cj));
                    for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                        let (ni, nj) = (ci as i64 + di, cj as i64 + dj);
                        if ni < 0 || nj < 0 || ni as usize >= cols || nj as usize >= rows {
                            continue;
                        }
                        let n = idx(ni as usize, nj as usize);
                        if open[n] && tiles[n] == Tile::Solid {
                            tiles[n] = Tile::Room(id);
                            queue.push_back((ni as usize, nj as usize));
                        }
                    }
                }
                rooms.push(comp);
            }
        }
        let mut kept = vec![true; rooms.len()];
        for (id, comp) in rooms.iter().enumerate() {
            if comp.len() as f64 * TILE * TILE < MIN_ROOM_AREA {
                kept[id] = false;
                for &(i, j) in comp {
                    tiles[idx(i, j)] = Tile::Solid;
                }
            }
        }

        // Corridor doors first; rooms with no corridor wall open onto a
        // neighbour that is already connected.
        let mut connected = vec![false; rooms.len()];
        let mut via_rooms = false;
        loop {
            let mut progress = false;
            for id in 0..rooms.len() {
                if !kept[id] || connected[id] {
                    continue;
                }
                let reachable = |t: Tile| match t {
                    Tile::Corridor => true,
                    Tile::Room(r) => via_rooms && connected[r],
                    Tile::Solid | Tile::Door => false,
                };
                if let Some(door) = find_door(&tiles, cols, rows, &rooms[id], reachable) {
                    for (i, j) in door {
                        tiles[idx(i, j)] = Tile::Door;
                    }
                    connected[id] = true;
                    progress = true;
                }
            }
            if !progress {
                if via_rooms {
                    break;
                }
                via_rooms = true;
            }
        }

        for p in &self.posts {
            let (i, j) = ((p.x / TILE).floor() as usize, (p.y / TILE).floor() as usize);
            if i < cols && j < rows {
                tiles[idx(i, j)] = Tile::Solid;
            }
        }
        for j in 0..rows {
            for i in 0..cols {
                map.set(i, j, tiles[idx(i, j)] != Tile::Solid);
            }
        }
        let n = (0..rooms.len())
            .filter(|&id| kept[id] && connected[id])
            .count();
        (map, n)
    }

    pub fn build(&self, name: &str, start: Pose) -> Result<(World, usize), WorldError> {
        let (map, rooms) = self.rasterize();
        let world = World::new(
            name,
            Bounds {
                width: self.width,
                height: self.height,
            },
            map.segments(),
        )?;
        Ok((world.with_start(start), rooms))
    }
}

/// `DOOR_TILES` tiles of the longest straight wall run between a room and
/// reachable space.
fn find_door(
    tiles: &[Tile],
    cols: usize,
    rows: usize,
    comp: &[(usize, usize)],
    reachable: impl Fn(Tile) -> bool,
) -> Option<Vec<(usize, usize)>> {
    let at = |i: i64, j: i64| {
        (i >= 0 && j >= 0 && (i as usize) < cols && (j as usize) < rows)
            .then(|| tiles[j as usize * cols + i as usize])
    };
    let mut best: Option<(usize, Vec<(usize, usize)>)> = None;
    for (side, (di, dj)) in [(0i64, 1i64), (0, -1), (1, 0), (-1, 0)]
        .into_iter()
        .enumerate()
    {
        let frac = DOOR_OFFSETS[side % 2];
        let mut walls: Vec<(usize, usize)> = comp
            .iter()
            .filter_map(|&(i, j)| {
                let (wi, wj) = (i as i64 + di, j as i64 + dj);
                let wall = at(wi, wj)? == Tile::Solid;
                let beyond = at(wi + di, wj + dj).is_some_and(&reachable);
                (wall && beyond).then_some((wi as usize, wj as usize))
            })
            .collect();
        walls.sort_by_key(|&(i, j)| if di == 0 { (j, i) } else { (i, j) });
        let mut start = 0;
        for k in 1..=walls.len() {
            let contiguous = k < walls.len() && {
                let (a, b) = (walls[k - 1], walls[k]);
                if di == 0 {
                    a.1 == b.1 && b.0 == a.0 + 1
                } else {
                    a.0 == b.0 && b.1 == a.1 + 1
                }
            };
            if !contiguous {
                let len = k - start;
                if len >= DOOR_TILES && best.as_ref().is_none_or(|(l, _)| len > *l) {
                    let mid = start + ((len - DOOR_TILES) as f64 * frac).round() as usize;
                    best = Some((len, walls[mid..mid + DOOR_TILES].to_vec()));
                }
                start = k;
            }
        }
    }
    best.map(|(_, d)| d)
}

pub const NAMES: [&str; 4] = ["box", "corridor", "corridor-H", "office-block"];

pub fn by_name(name: &str) -> Option<Benchmark> {
    let d = design(name)?;
    Some(finish(d.layout, name, d.start, d.axes))
}

fn axis(name: &str, a: (f64, f64), b: (f64, f64)) -> CorridorAxis {
    CorridorAxis {
        name: name.into(),
        a: Point::new(a.0, a.1),
        b: Point::new(b.0, b.1),
    }
}

/// Layout, start pose and corridor axes of a named benchmark.
#[derive(Clone, Debug)]
pub struct Design {
    pub layout: Layout,
    pub start: Pose,
    pub axes: Vec<CorridorAxis>,
}

fn finish(layout: Layout, name: &str, start: Pose, axes: Vec<CorridorAxis>) -> Benchmark {
    let (world, rooms) = layout
        .build(name, start)
        .expect("benchmark layouts are valid");
    Benchmark { world, axes, rooms }
}

pub fn design(name: &str) -> Option<Design> {
    let (layout, start, axes) = match name {
        "box" => box_design(),
        "corridor" => corridor_design(),
        "corridor-H" => corridor_h_design(),
        "office-block" => office_design(),
        _ => return None,
    };
    Some(Design {
        layout,
        start,
        axes,
    })
}

/// 10m x 10m empty room.
pub fn open_box() -> Benchmark {
    by_name("box").unwrap()
}

fn box_design() -> (Layout, Pose, Vec<CorridorAxis>) {
    let layout = Layout {
        width: 10.0,
        height: 10.0,
        corridors: vec![rect(0.0, 0.0, 10.0, 10.0)],
        ..Layout::default()
    };
    (layout, Pose::new(5.0, 5.0, 0.0), Vec::new())
}

/// Single 20m x 2m hall.
pub fn corridor() -> Benchmark {
    by_name("corridor").unwrap()
}

fn corridor_design() -> (Layout, Pose, Vec<CorridorAxis>) {
    let layout = Layout {
        width: 20.0,
        height: 2.0,
        corridors: vec![rect(0.0, 0.0, 20.0, 2.0)],
        ..Layout::default()
    };
    (
        layout,
        Pose::new(1.0, 1.0, 0.0),
        vec![axis("hall", (0.0, 1.0), (20.0, 1.0))],
    )
}

/// Two 30m halls joined by a 15m cross hall, with four rooms in each
/// pocket between them.
pub fn corridor_h() -> Benchmark {
    by_name("corridor-H").unwrap()
}

fn corridor_h_design() -> (Layout, Pose, Vec<CorridorAxis>) {
    let layout = Layout {
        width: 20.0,
        height: 30.0,
        corridors: vec![
            rect(0.0, 0.0, 2.5, 30.0),
            rect(17.5, 0.0, 20.0, 30.0),
            rect(2.5, 13.5, 17.5, 16.0),
        ],
        partitions: vec![
            rect(9.5, 0.0, 10.0, 30.0),
            rect(3.0, 6.0, 17.0, 6.5),
            rect(3.0, 23.0, 17.0, 23.5),
        ],
        posts: Vec::new(),
    };
    let axes = vec![
        axis("west", (1.25, 0.0), (1.25, 30.0)),
        axis("east", (18.75, 0.0), (18.75, 30.0)),
        axis("cross", (2.5, 14.75), (17.5, 14.75)),
    ];
    (
        layout,
        Pose::new(1.25, 1.5, std::f64::consts::FRAC_PI_2),
        axes,
    )
}

/// 60m x 40m office floor: two long halls with jogs, two connecting halls,
/// two dead-end spurs, some thirty rooms and a few free-standing posts.
pub fn office_block() -> Benchmark {
    by_name("office-block").unwrap()
}

fn office_design() -> (Layout, Pose, Vec<CorridorAxis>) {
    let corridors = vec![
        rect(0.0, 10.0, 36.0, 12.5),
        rect(36.0, 10.5, 60.0, 13.0),
        rect(0.0, 27.0, 24.0, 29.5),
        rect(24.0, 27.5, 60.0, 30.0),
        rect(14.0, 12.5, 16.5, 27.0),
        rect(44.0, 13.0, 46.5, 27.5),
        rect(20.0, 0.0, 22.5, 10.0),
        rect(38.0, 30.0, 40.5, 40.0),
    ];
    let mut partitions = Vec::new();
    for x in [6.5, 13.0, 29.0, 35.5, 42.5, 51.0] {
        partitions.push(rect(x, 0.0, x + 0.5, 10.5));
    }
    for x in [6.5, 23.5, 30.0, 35.5, 53.0] {
        partitions.push(rect(x, 12.5, x + 0.5, 27.5));
    }
    partitions.push(rect(0.0, 19.5, 60.0, 20.0));
    for x in [6.5, 13.5, 20.0, 26.5, 32.5, 47.5, 54.0] {
        partitions.push(rect(x, 29.5, x + 0.5, 40.0));
    }
    let posts = vec![
        Point::new(3.25, 5.25),
        Point::new(26.25, 5.25),
        Point::new(55.75, 5.25),
        Point::new(29.75, 34.75),
        Point::new(51.25, 34.75),
        Point::new(40.25, 16.25),
    ];
    let layout = Layout {
        width: 60.0,
        height: 40.0,
        corridors,
        partitions,
        posts,
    };
    let axes = vec![
        axis("A-west", (0.0, 11.25), (36.0, 11.25)),
        axis("A-east", (36.0, 11.75), (60.0, 11.75)),
        axis("B-west", (0.0, 28.25), (24.0, 28.25)),
        axis("B-east", (24.0, 28.75), (60.0, 28.75)),
        axis("C", (15.25, 12.5), (15.25, 27.0)),
        axis("D", (45.25, 13.0), (45.25, 27.5)),
        axis("E", (21.25, 0.0), (21.25, 10.0)),
        axis("F", (39.25, 30.0), (39.25, 40.0)),
    ];
    (layout, Pose::new(1.5, 11.25, 0.0), axes)
}
