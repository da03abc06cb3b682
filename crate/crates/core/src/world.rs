//! Ground-truth world: wall geometry, the simulated range finder and the
//! discrete robot kinematics.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{normalize_angle, GridWalk, Point, Segment};

/// Distances closer than this to a wall count as touching it.
pub const CONTACT_EPS: f64 = 1e-9;

/// Axis-aligned footprint `[0, width] x [0, height]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub width: f64,
    pub height: f64,
}

impl Bounds {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x <= self.width && p.y <= self.height
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WorldError {
    NonPositiveBounds {
        width: f64,
        height: f64,
    },
    NoWalls,
    WallOutOfBounds {
        index: usize,
    },
    /// Ray origin on or inside a wall, or outside the world.
    DegenerateOrigin {
        x: f64,
        y: f64,
    },
}

impl fmt::Display for WorldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorldError::NonPositiveBounds { width, height } => {
                write!(f, "bounds must be positive, got {width} x {height}")
            }
            WorldError::NoWalls => f.write_str("world has no walls"),
            WorldError::WallOutOfBounds { index } => {
                write!(f, "wall {index} has an endpoint outside the bounds")
            }
            WorldError::DegenerateOrigin { x, y } => {
                write!(f, "ray origin ({x}, {y}) is on a wall or outside the world")
            }
        }
    }
}

impl core::error::Error for WorldError {}

/// Robot pose; `theta` is kept in (-pi, pi].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn heading(&self) -> Point {
        Point::from_angle(self.theta)
    }

    /// Bearing of `p` relative to the heading, in (-pi, pi].
    pub fn bearing_to(&self, p: Point) -> f64 {
        normalize_angle((p - self.position()).angle() - self.theta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Action {
    Forward(f64),
    /// Signed radians, positive counterclockwise.
    Rotate(f64),
}

impl Action {
    pub fn is_rotation(&self) -> bool {
        matches!(self, Action::Rotate(_))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Forward(m) => write!(f, "F{m:.6}"),
            Action::Rotate(a) => write!(f, "R{a:.6}"),
        }
    }
}

/// The discrete moves available to the robot.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionSet {
    /// Forward lengths, ascending.
    pub moves: Vec<f64>,
    /// Rotation magnitudes, ascending; each is usable in both directions.
    pub rotations: Vec<f64>,
}

impl Default for ActionSet {
    fn default() -> Self {
        Self {
            moves: alloc::vec![0.1, 0.2, 0.4, 0.8, 1.6, 3.2],
            rotations: alloc::vec![0.25, 0.5, 1.0, 1.57],
        }
    }
}

impl ActionSet {
    pub fn new(mut moves: Vec<f64>, mut rotations: Vec<f64>) -> Self {
        moves.sort_by(|a, b| a.total_cmp(b));
        rotations.sort_by(|a, b| a.total_cmp(b));
        Self { moves, rotations }
    }

    /// Every action in canonical order: forwards ascending, then rotations by
    /// magnitude with the counterclockwise one first.
    pub fn all(&self) -> Vec<Action> {
        let mut out: Vec<Action> = self.moves.iter().map(|&m| Action::Forward(m)).collect();
        for &r in &self.rotations {
            out.push(Action::Rotate(r));
            out.push(Action::Rotate(-r));
        }
        out
    }

    pub fn smallest_move(&self) -> f64 {
        self.moves[0]
    }

    pub fn smallest_rotation(&self) -> f64 {
        self.rotations[0]
    }

    /// Rotation whose magnitude is closest to `|angle|`, signed like `angle`.
    pub fn rotation_toward(&self, angle: f64) -> f64 {
        let mag = angle.abs();
        let best = self
            .rotations
            .iter()
            .copied()
            .min_by(|a, b| (a - mag).abs().total_cmp(&(b - mag).abs()))
            .unwrap_or(0.0);
        if angle < 0.0 {
            -best
        } else {
            best
        }
    }

    pub fn contains(&self, action: Action) -> bool {
        match action {
            Action::Forward(m) => self.moves.iter().any(|&x| (x - m).abs() < 1e-12),
            Action::Rotate(a) => self.rotations.iter().any(|&x| (x - a.abs()).abs() < 1e-12),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub new_pose: Pose,
    pub truncated: bool,
    pub distance_traveled: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorConfig {
    pub ray_count: usize,
    /// Full arc in radians, centred on the heading.
    pub fov: f64,
    pub max_range: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            ray_count: 660,
            fov: 220f64.to_radians(),
            max_range: 25.0,
        }
    }
}

impl SensorConfig {
    pub fn step(&self) -> f64 {
        if self.ray_count > 1 {
            self.fov / (self.ray_count - 1) as f64
        } else {
            0.0
        }
    }

    /// Angle of ray `i` relative to the heading. Ray 0 is the leftmost
    /// (most counterclockwise) ray.
    pub fn relative_angle(&self, i: usize) -> f64 {
        self.fov / 2.0 - i as f64 * self.step()
    }
}

/// One range scan taken at `pose`.
#[derive(Clone, Debug, PartialEq)]
pub struct View {
    pub pose: Pose,
    pub ranges: Vec<f64>,
    pub sensor: SensorConfig,
}

impl View {
    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn relative_angle(&self, i: usize) -> f64 {
        self.sensor.relative_angle(i)
    }

    pub fn ray_angle(&self, i: usize) -> f64 {
        normalize_angle(self.pose.theta + self.relative_angle(i))
    }

    pub fn max_range(&self) -> f64 {
        self.sensor.max_range
    }

    /// True if ray `i` stopped on an obstacle rather than at maximum range.
    pub fn is_hit(&self, i: usize) -> bool {
        self.ranges[i] < self.sensor.max_range - CONTACT_EPS
    }

    pub fn endpoint(&self, i: usize) -> Point {
        self.pose.position() + Point::from_angle(self.ray_angle(i)) * self.ranges[i]
    }

    /// Index of the ray nearest the relative angle, if it lies inside the arc.
    pub fn ray_index(&self, relative: f64) -> Option<usize> {
        let half = self.sensor.fov / 2.0;
        let step = self.sensor.step();
        if relative.abs() > half + step / 2.0 || step <= 0.0 {
            return None;
        }
        let idx = ((half - relative) / step).round();
        Some((idx.max(0.0) as usize).min(self.ranges.len() - 1))
    }

    pub fn min_range(&self) -> f64 {
        self.ranges.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// How far a disc of `radius` can travel along the relative direction
    /// `relative` before touching any obstacle point seen in this view.
    pub fn free_travel(&self, relative: f64, radius: f64) -> f64 {
        let mut best = f64::INFINITY;
        for (i, &r) in self.ranges.iter().enumerate() {
            if !self.is_hit(i) {
                continue;
            }
            let a = self.relative_angle(i) - relative;
            let along = r * a.cos();
            let lateral = r * a.sin();
            if along <= 0.0 || lateral.abs() >= radius {
                continue;
            }
            let t = along - (radius * radius - lateral * lateral).sqrt();
            best = best.min(t.max(0.0));
        }
        best.min(self.sensor.max_range - radius)
    }
}

/// Uniform bucket grid over the walls, used to accelerate ray casting.
#[derive(Clone, Debug)]
struct SegmentIndex {
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<u32>>,
}

impl SegmentIndex {
    fn build(bounds: Bounds, walls: &[Segment], cell: f64) -> Self {
        let cols = ((bounds.width / cell).ceil() as usize).max(1);
        let rows = ((bounds.height / cell).ceil() as usize).max(1);
        let mut buckets = alloc::vec![Vec::new(); cols * rows];
        let pad = 1e-6;
        for (k, w) in walls.iter().enumerate() {
            let lo_x = w.a.x.min(w.b.x) - pad;
            let hi_x = w.a.x.max(w.b.x) + pad;
            let lo_y = w.a.y.min(w.b.y) - pad;
            let hi_y = w.a.y.max(w.b.y) + pad;
            let i0 = ((lo_x / cell).floor().max(0.0) as usize).min(cols - 1);
            let i1 = ((hi_x / cell).floor().max(0.0) as usize).min(cols - 1);
            let j0 = ((lo_y / cell).floor().max(0.0) as usize).min(rows - 1);
            let j1 = ((hi_y / cell).floor().max(0.0) as usize).min(rows - 1);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let bx0 = i as f64 * cell - pad;
                    let by0 = j as f64 * cell - pad;
                    if segment_touches_box(
                        w,
                        bx0,
                        by0,
                        bx0 + cell + 2.0 * pad,
                        by0 + cell + 2.0 * pad,
                    ) {
                        buckets[j * cols + i].push(k as u32);
                    }
                }
            }
        }
        Self {
            cell,
            cols,
            rows,
            buckets,
        }
    }

    fn bucket(&self, i: i32, j: i32) -> Option<&[u32]> {
        if i < 0 || j < 0 || i as usize >= self.cols || j as usize >= self.rows {
            return None;
        }
        Some(&self.buckets[j as usize * self.cols + i as usize])
    }
}

/// Liang-Barsky clip test of a segment against an axis-aligned box.
fn segment_touches_box(s: &Segment, x0: f64, y0: f64, x1: f64, y1: f64) -> bool {
    let d = s.b - s.a;
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (p, q) in [
        (-d.x, s.a.x - x0),
        (d.x, x1 - s.a.x),
        (-d.y, s.a.y - y0),
        (d.y, y1 - s.a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Immutable world geometry.
#[derive(Clone, Debug)]
pub struct World {
    name: String,
    bounds: Bounds,
    walls: Vec<Segment>,
    start: Option<Pose>,
    index: SegmentIndex,
}

impl PartialEq for World {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.bounds == other.bounds
            && self.walls == other.walls
            && self.start == other.start
    }
}

impl World {
    pub fn new(
        name: impl Into<String>,
        bounds: Bounds,
        walls: Vec<Segment>,
    ) -> Result<Self, WorldError> {
        if !(bounds.width > 0.0 && bounds.height > 0.0) {
            return Err(WorldError::NonPositiveBounds {
                width: bounds.width,
                height: bounds.height,
            });
        }
        if walls.is_empty() {
            return Err(WorldError::NoWalls);
        }
        if let Some(index) = walls
            .iter()
            .position(|w| !bounds.contains(w.a) || !bounds.contains(w.b))
        {
            return Err(WorldError::WallOutOfBounds { index });
        }
        let index = SegmentIndex::build(bounds, &walls, 1.0);
        Ok(Self {
            name: name.into(),
            bounds,
            walls,
            start: None,
            index,
        })
    }

    /// Attaches a default start pose.
    pub fn with_start(mut self, start: Pose) -> Self {
        self.start = Some(start);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn walls(&self) -> &[Segment] {
        &self.walls
    }

    pub fn start(&self) -> Option<Pose> {
        self.start
    }

    /// Distance from `p` to the nearest wall.
    pub fn clearance(&self, p: Point) -> f64 {
        self.walls
            .iter()
            .map(|w| w.distance_to_point(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// True if a disc of `radius` at `p` is inside the bounds and off every wall.
    pub fn is_free(&self, p: Point, radius: f64) -> bool {
        self.bounds.contains(p) && self.clearance(p) >= radius
    }

    /// Distance to the nearest wall along `angle`, clamped to `max_range`.
    pub fn cast_ray(&self, origin: Point, angle: f64, max_range: f64) -> Result<f64, WorldError> {
        if !self.bounds.contains(origin) {
            return Err(WorldError::DegenerateOrigin {
                x: origin.x,
                y: origin.y,
            });
        }
        let dir = Point::from_angle(angle);
        let mut best = f64::INFINITY;
        for visit in GridWalk::new(origin, dir, max_range, self.index.cell) {
            let Some(bucket) = self.index.bucket(visit.cell.i, visit.cell.j) else {
                break;
            };
            for &k in bucket {
                let w = &self.walls[k as usize];
                if w.distance_to_point(origin) < CONTACT_EPS {
                    return Err(WorldError::DegenerateOrigin {
                        x: origin.x,
                        y: origin.y,
                    });
                }
                if let Some(t) = w.ray_hit(origin, dir) {
                    best = best.min(t);
                }
            }
            if best <= visit.t_out {
                break;
            }
        }
        Ok(best.min(max_range))
    }

    pub fn scan(&self, pose: Pose, sensor: &SensorConfig) -> Result<View, WorldError> {
        let origin = pose.position();
        let ranges = (0..sensor.ray_count)
            .map(|i| {
                self.cast_ray(
                    origin,
                    pose.theta + sensor.relative_angle(i),
                    sensor.max_range,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(View {
            pose,
            ranges,
            sensor: *sensor,
        })
    }

    /// Largest `s >= 0` such that a disc of `radius` moved from `p` by
    /// `s * dir` (unit `dir`) stays off every wall.
    pub fn free_travel(&self, p: Point, dir: Point, radius: f64) -> f64 {
        self.walls
            .iter()
            .map(|w| sweep_to_contact(p, dir, radius, w))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn apply_action(&self, pose: Pose, action: Action, radius: f64) -> StepOutcome {
        match action {
            Action::Rotate(a) => StepOutcome {
                new_pose: Pose::new(pose.x, pose.y, pose.theta + a),
                truncated: false,
                distance_traveled: 0.0,
            },
            Action::Forward(m) => {
                let dir = pose.heading();
                let limit = self.free_travel(pose.position(), dir, radius);
                let (dist, truncated) = if limit >= m {
                    (m, false)
                } else {
                    ((limit - 1e-7).max(0.0), true)
                };
                let p = pose.position() + dir * dist;
                StepOutcome {
                    new_pose: Pose {
                        x: p.x,
                        y: p.y,
                        theta: pose.theta,
                    },
                    truncated,
                    distance_traveled: dist,
                }
            }
        }
    }
}

/// Distance a disc can sweep along `dir` before its boundary touches `wall`.
fn sweep_to_contact(p: Point, dir: Point, radius: f64, wall: &Segment) -> f64 {
    let q = wall.closest_point(p);
    let gap = p - q;
    let dist = gap.norm();
    if dist < radius {
        // Already overlapping: allow only motion that increases the distance.
        return if dist > 0.0 && dir.dot(gap) >= 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
    }
    let mut best = f64::INFINITY;
    let e = wall.b - wall.a;
    let len = e.norm();
    if len > 0.0 {
        let u = e * (1.0 / len);
        let n = Point::new(-u.y, u.x);
        let h0 = n.dot(p - wall.a);
        let rate = n.dot(dir);
        if rate.abs() > 1e-15 {
            for side in [radius, -radius] {
                let s = (side - h0) / rate;
                if s >= 0.0 {
                    let along = u.dot(p + dir * s - wall.a);
                    if (0.0..=len).contains(&along) {
                        best = best.min(s);
                    }
                }
            }
        }
    }
    for c in [wall.a, wall.b] {
        let f = p - c;
        let b = dir.dot(f);
        let cc = f.dot(f) - radius * radius;
        let disc = b * b - cc;
        if disc >= 0.0 {
            let s = -b - disc.sqrt();
            if s >= 0.0 {
                best = best.min(s);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn boxed(w: f64, h: f64) -> World {
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
    fn perpendicular_hit_from_center() {
        let w = boxed(10.0, 10.0);
        let r = w.cast_ray(Point::new(5.0, 5.0), 0.0, 25.0).unwrap();
        assert!((r - 5.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_hit_in_box() {
        let w = boxed(10.0, 10.0);
        let r = w.cast_ray(Point::new(1.0, 1.0), FRAC_PI_4, 25.0).unwrap();
        assert!((r - 9.0 * 2f64.sqrt()).abs() < 1e-9, "{r}");
    }

    #[test]
    fn clamps_to_max_range() {
        let walls = vec![
            Segment::new(Point::new(0.0, 0.0), Point::new(100.0, 0.0)),
            Segment::new(Point::new(0.0, 2.0), Point::new(100.0, 2.0)),
        ];
        let w = World::new(
            "hall",
            Bounds {
                width: 100.0,
                height: 2.0,
            },
            walls,
        )
        .unwrap();
        let r = w.cast_ray(Point::new(1.0, 1.0), 0.0, 25.0).unwrap();
        assert_eq!(r, 25.0);
    }

    #[test]
    fn origin_on_wall_is_degenerate() {
        let w = boxed(10.0, 10.0);
        assert!(matches!(
            w.cast_ray(Point::new(0.0, 5.0), 0.0, 25.0),
            Err(WorldError::DegenerateOrigin { .. })
        ));
        assert!(w.cast_ray(Point::new(-1.0, 5.0), 0.0, 25.0).is_err());
    }

    #[test]
    fn rejects_bad_worlds() {
        let b = Bounds {
            width: 10.0,
            height: 10.0,
        };
        assert_eq!(World::new("e", b, vec![]).unwrap_err(), WorldError::NoWalls);
        let out = vec![Segment::new(Point::new(-1.0, 5.0), Point::new(5.0, 5.0))];
        assert_eq!(
            World::new("o", b, out).unwrap_err(),
            WorldError::WallOutOfBounds { index: 0 }
        );
    }

    #[test]
    fn rotate_changes_heading_only() {
        let w = boxed(10.0, 10.0);
        let out = w.apply_action(Pose::new(5.0, 5.0, 0.0), Action::Rotate(FRAC_PI_2), 0.4);
        assert_eq!(out.new_pose.position(), Point::new(5.0, 5.0));
        assert!((out.new_pose.theta - FRAC_PI_2).abs() < 1e-12);
        assert!(!out.truncated);
    }

    #[test]
    fn forward_in_open_space_and_truncated() {
        let w = boxed(20.0, 20.0);
        let out = w.apply_action(Pose::new(5.0, 10.0, 0.0), Action::Forward(0.8), 0.4);
        assert!(!out.truncated);
        assert_eq!(out.distance_traveled, 0.8);
        let out = w.apply_action(Pose::new(19.0, 10.0, 0.0), Action::Forward(3.2), 0.4);
        assert!(out.truncated);
        assert!((out.distance_traveled - 0.6).abs() < 1e-6);
        assert!(w.clearance(out.new_pose.position()) >= 0.4 - 1e-9);
    }

    #[test]
    fn sweep_catches_wall_corner() {
        // A short wall whose end sits 0.3 to the side of the path.
        let walls = vec![
            Segment::new(Point::new(5.0, 1.3), Point::new(5.0, 3.0)),
            Segment::new(Point::new(0.0, 0.0), Point::new(10.0, 0.0)),
        ];
        let w = World::new(
            "corner",
            Bounds {
                width: 10.0,
                height: 10.0,
            },
            walls,
        )
        .unwrap();
        let out = w.apply_action(Pose::new(1.0, 1.0, 0.0), Action::Forward(6.4), 0.4);
        assert!(out.truncated);
        let expected = 4.0 - (0.4f64 * 0.4 - 0.3 * 0.3).sqrt();
        assert!((out.distance_traveled - expected).abs() < 1e-6);
    }

    #[test]
    fn scan_is_deterministic_and_ordered_left_to_right() {
        let w = boxed(10.0, 10.0);
        let sensor = SensorConfig::default();
        let pose = Pose::new(2.0, 5.0, 0.0);
        let v1 = w.scan(pose, &sensor).unwrap();
        let v2 = w.scan(pose, &sensor).unwrap();
        assert_eq!(v1, v2);
        assert_eq!(v1.len(), 660);
        // Leftmost ray points at +110 degrees: up and slightly back.
        assert!(v1.endpoint(0).y > 9.99);
        assert!(v1.endpoint(659).y < 0.01);
    }

    #[test]
    fn view_free_travel_matches_world() {
        let w = boxed(10.0, 10.0);
        let view = w
            .scan(Pose::new(2.0, 5.0, 0.0), &SensorConfig::default())
            .unwrap();
        let est = view.free_travel(0.0, 0.4);
        // No ray points exactly ahead; the nearest is 1/6 degree off.
        assert!((est - 7.6).abs() < 1e-3, "{est}");
    }

    #[test]
    fn rotation_toward_picks_closest_magnitude() {
        let set = ActionSet::default();
        assert_eq!(set.rotation_toward(FRAC_PI_2), 1.57);
        assert_eq!(set.rotation_toward(-0.3), -0.25);
        assert_eq!(set.all().len(), 14);
    }
}
