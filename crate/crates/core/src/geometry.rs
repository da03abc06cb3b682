//! Planar geometry primitives shared by every other module.

use core::cmp::Ordering;
use core::f64::consts::{PI, TAU};
use core::ops::{Add, Mul, Neg, Sub};

#[allow(unused_imports)]
use num_traits::Float;

/// Tolerance for parametric tests on segment endpoints.
pub const EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector pointing along `angle`.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let d = self - other;
        d.dot(d)
    }

    /// Direction of the vector, in (-pi, pi].
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn midpoint(&self) -> Point {
        self.a.lerp(self.b, 0.5)
    }

    /// Parameter in [0, 1] of the point on the segment closest to `p`.
    pub fn project_param(&self, p: Point) -> f64 {
        let e = self.b - self.a;
        let len_sq = e.dot(e);
        if len_sq <= 0.0 {
            return 0.0;
        }
        ((p - self.a).dot(e) / len_sq).clamp(0.0, 1.0)
    }

    pub fn closest_point(&self, p: Point) -> Point {
        self.a.lerp(self.b, self.project_param(p))
    }

    pub fn distance_to_point(&self, p: Point) -> f64 {
        self.closest_point(p).distance(p)
    }

    /// Distance along the ray `origin + t * dir` (unit `dir`) to this segment,
    /// or `None` when the ray misses or runs parallel to it.
    pub fn ray_hit(&self, origin: Point, dir: Point) -> Option<f64> {
        let e = self.b - self.a;
        let denom = dir.cross(e);
        if denom.abs() < 1e-15 {
            return None;
        }
        let w = self.a - origin;
        let t = w.cross(e) / denom;
        let s = w.cross(dir) / denom;
        if t > EPS && (-EPS..=1.0 + EPS).contains(&s) {
            Some(t)
        } else {
            None
        }
    }

    pub fn intersects(&self, other: &Segment) -> bool {
        let d1 = (self.b - self.a).cross(other.a - self.a);
        let d2 = (self.b - self.a).cross(other.b - self.a);
        let d3 = (other.b - other.a).cross(self.a - other.a);
        let d4 = (other.b - other.a).cross(self.b - other.a);
        if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
            && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
        {
            return true;
        }
        self.distance_to_point(other.a) <= EPS
            || self.distance_to_point(other.b) <= EPS
            || other.distance_to_point(self.a) <= EPS
            || other.distance_to_point(self.b) <= EPS
    }

    /// Minimum distance between two segments.
    pub fn distance_to_segment(&self, other: &Segment) -> f64 {
        if self.intersects(other) {
            return 0.0;
        }
        self.distance_to_point(other.a)
            .min(self.distance_to_point(other.b))
            .min(other.distance_to_point(self.a))
            .min(other.distance_to_point(self.b))
    }

    /// Parameters `(t0, t1)` with `t0 <= t1` where the segment is inside a
    /// closed disc, clipped to [0, 1]. `None` if the segment misses the disc.
    pub fn disc_interval(&self, center: Point, radius: f64) -> Option<(f64, f64)> {
        let d = self.b - self.a;
        let f = self.a - center;
        let a = d.dot(d);
        let c = f.dot(f) - radius * radius;
        if a <= 0.0 {
            return (c <= 0.0).then_some((0.0, 1.0));
        }
        let b = f.dot(d);
        let disc = b * b - a * c;
        if disc < 0.0 {
            return None;
        }
        let root = disc.sqrt();
        let t0 = (-b - root) / a;
        let t1 = (-b + root) / a;
        if t1 < 0.0 || t0 > 1.0 {
            return None;
        }
        Some((t0.max(0.0), t1.min(1.0)))
    }
}

/// Wraps an angle into (-pi, pi].
pub fn normalize_angle(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let mut a = angle % TAU;
    if a <= -PI {
        a += TAU;
    } else if a > PI {
        a -= TAU;
    }
    a
}

/// Signed smallest rotation taking `from` onto `to`.
pub fn angle_diff(to: f64, from: f64) -> f64 {
    normalize_angle(to - from)
}

/// Circular mean of a set of headings; `None` when empty or fully balanced.
pub fn circular_mean<I: IntoIterator<Item = f64>>(angles: I) -> Option<f64> {
    let (mut s, mut c, mut n) = (0.0, 0.0, 0usize);
    for a in angles {
        let (sa, ca) = a.sin_cos();
        s += sa;
        c += ca;
        n += 1;
    }
    if n == 0 || s.hypot(c) < 1e-12 {
        None
    } else {
        Some(s.atan2(c))
    }
}

/// Circular mean of `(angle, weight)` pairs.
pub fn weighted_circular_mean<I: IntoIterator<Item = (f64, f64)>>(items: I) -> Option<f64> {
    let (mut s, mut c) = (0.0, 0.0);
    for (a, w) in items {
        let (sa, ca) = a.sin_cos();
        s += w * sa;
        c += w * ca;
    }
    if s.hypot(c) < 1e-12 {
        None
    } else {
        Some(s.atan2(c))
    }
}

/// Integer cell index on a square grid. Ordered lexicographically by `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub i: i32,
    pub j: i32,
}

impl Cell {
    pub const fn new(i: i32, j: i32) -> Self {
        Self { i, j }
    }

    pub fn of(p: Point, size: f64) -> Self {
        Self {
            i: (p.x / size).floor() as i32,
            j: (p.y / size).floor() as i32,
        }
    }

    pub fn center(self, size: f64) -> Point {
        Point::new((self.i as f64 + 0.5) * size, (self.j as f64 + 0.5) * size)
    }

    pub fn is_neighbor8(self, other: Cell) -> bool {
        self != other && (self.i - other.i).abs() <= 1 && (self.j - other.j).abs() <= 1
    }

    /// The 8-neighbourhood in lexicographic order.
    pub fn neighbors8(self) -> impl Iterator<Item = Cell> {
        (-1..=1).flat_map(move |di| {
            (-1..=1).filter_map(move |dj| {
                (di != 0 || dj != 0).then_some(Cell::new(self.i + di, self.j + dj))
            })
        })
    }
}

/// One cell visited by a [`GridWalk`], with the distances along the walk at
/// which it was entered and left.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellVisit {
    pub cell: Cell,
    pub t_in: f64,
    pub t_out: f64,
}

/// Amanatides-Woo traversal of the cells crossed by `origin + t * dir`,
/// `t` in [0, length]. `dir` must be a unit vector.
#[derive(Clone, Debug)]
pub struct GridWalk {
    cell: Cell,
    step_i: i32,
    step_j: i32,
    next_x: f64,
    next_y: f64,
    delta_x: f64,
    delta_y: f64,
    t: f64,
    length: f64,
    done: bool,
}

impl GridWalk {
    pub fn new(origin: Point, dir: Point, length: f64, size: f64) -> Self {
        let cell = Cell::of(origin, size);
        let axis = |o: f64, d: f64, idx: i32| -> (i32, f64, f64) {
            if d > 0.0 {
                let boundary = (idx as f64 + 1.0) * size;
                (1, (boundary - o) / d, size / d)
            } else if d < 0.0 {
                let boundary = idx as f64 * size;
                (-1, (boundary - o) / d, -size / d)
            } else {
                (0, f64::INFINITY, f64::INFINITY)
            }
        };
        let (step_i, next_x, delta_x) = axis(origin.x, dir.x, cell.i);
        let (step_j, next_y, delta_y) = axis(origin.y, dir.y, cell.j);
        Self {
            cell,
            step_i,
            step_j,
            next_x,
            next_y,
            delta_x,
            delta_y,
            t: 0.0,
            length: length.max(0.0),
            done: false,
        }
    }

    /// Walk covering the segment from `a` to `b`.
    pub fn segment(a: Point, b: Point, size: f64) -> Self {
        let len = a.distance(b);
        let dir = if len > 0.0 {
            (b - a) * (1.0 / len)
        } else {
            Point::new(1.0, 0.0)
        };
        Self::new(a, dir, len, size)
    }
}

impl Iterator for GridWalk {
    type Item = CellVisit;

    fn next(&mut self) -> Option<CellVisit> {
        if self.done {
            return None;
        }
        let boundary = self.next_x.min(self.next_y);
        let visit = CellVisit {
            cell: self.cell,
            t_in: self.t,
            t_out: boundary.min(self.length),
        };
        if boundary >= self.length {
            self.done = true;
        } else {
            self.t = boundary;
            if self.next_x < self.next_y {
                self.cell.i += self.step_i;
                self.next_x += self.delta_x;
            } else {
                self.cell.j += self.step_j;
                self.next_y += self.delta_y;
            }
        }
        Some(visit)
    }
}

/// Total order over `f64` for use in sorting and heaps.
pub fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.total_cmp(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn normalize_wraps_into_half_open_interval() {
        assert_eq!(normalize_angle(PI), PI);
        assert!((normalize_angle(-PI) - PI).abs() < 1e-15);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((normalize_angle(TAU + 0.5) - 0.5).abs() < 1e-12);
        assert!((normalize_angle(-TAU - 0.5) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn ray_hits_perpendicular_wall() {
        let wall = Segment::new(Point::new(5.0, -1.0), Point::new(5.0, 1.0));
        let t = wall
            .ray_hit(Point::new(0.0, 0.0), Point::new(1.0, 0.0))
            .unwrap();
        assert!((t - 5.0).abs() < 1e-12);
        assert!(wall
            .ray_hit(Point::new(0.0, 0.0), Point::new(-1.0, 0.0))
            .is_none());
        assert!(wall
            .ray_hit(Point::new(0.0, 0.0), Point::new(0.0, 1.0))
            .is_none());
    }

    #[test]
    fn segment_distance_parallel() {
        let a = Segment::new(Point::new(0.0, 0.0), Point::new(10.0, 0.0));
        let b = Segment::new(Point::new(2.0, 3.0), Point::new(8.0, 3.0));
        assert!((a.distance_to_segment(&b) - 3.0).abs() < 1e-12);
        let c = Segment::new(Point::new(5.0, -1.0), Point::new(5.0, 1.0));
        assert_eq!(a.distance_to_segment(&c), 0.0);
    }

    #[test]
    fn grid_walk_matches_dense_sampling() {
        let a = Point::new(0.02, 0.4);
        let b = a + Point::from_angle(22f64.to_radians()) * 3.2;
        let walked: Vec<Cell> = GridWalk::segment(a, b, 1.0)
            .filter(|v| v.t_out - v.t_in > 1e-12)
            .map(|v| v.cell)
            .collect();
        let mut sampled: Vec<Cell> = Vec::new();
        for k in 0..=100_000 {
            let c = Cell::of(a.lerp(b, k as f64 / 100_000.0), 1.0);
            if sampled.last() != Some(&c) {
                sampled.push(c);
            }
        }
        assert_eq!(walked, sampled);
    }

    #[test]
    fn disc_interval_clips() {
        let s = Segment::new(Point::new(-5.0, 0.0), Point::new(5.0, 0.0));
        let (t0, t1) = s.disc_interval(Point::new(0.0, 0.0), 1.0).unwrap();
        assert!((t0 - 0.4).abs() < 1e-12 && (t1 - 0.6).abs() < 1e-12);
        assert!(s.disc_interval(Point::new(0.0, 2.0), 1.0).is_none());
    }

    #[test]
    fn circular_mean_handles_wraparound() {
        let m = circular_mean([PI - 0.1, -PI + 0.1]).unwrap();
        assert!((m.abs() - PI).abs() < 1e-9);
    }
}
