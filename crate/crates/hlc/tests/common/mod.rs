#![allow(dead_code)]

use hlc_core::{Point, Segment};

/// Ray/segment distance by Cramer's rule.
pub fn ray_segment(o: Point, angle: f64, s: &Segment) -> Option<f64> {
    let (dx, dy) = (angle.cos(), angle.sin());
    let (ex, ey) = (s.b.x - s.a.x, s.b.y - s.a.y);
    let det = ex * dy - dx * ey;
    if det.abs() < 1e-15 {
        return None;
    }
    let (wx, wy) = (s.a.x - o.x, s.a.y - o.y);
    let t = (ex * wy - ey * wx) / det;
    let u = (dx * wy - dy * wx) / det;
    (t >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u)).then_some(t)
}

pub fn brute_ray(walls: &[Segment], o: Point, angle: f64, max_range: f64) -> f64 {
    walls
        .iter()
        .filter_map(|s| ray_segment(o, angle, s))
        .fold(max_range, f64::min)
}

pub fn point_segment(q: Point, s: &Segment) -> f64 {
    let (ex, ey) = (s.b.x - s.a.x, s.b.y - s.a.y);
    let len2 = ex * ex + ey * ey;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((q.x - s.a.x) * ex + (q.y - s.a.y) * ey) / len2).clamp(0.0, 1.0)
    };
    ((q.x - s.a.x - t * ex).powi(2) + (q.y - s.a.y - t * ey).powi(2)).sqrt()
}

pub fn clearance(walls: &[Segment], q: Point) -> f64 {
    walls
        .iter()
        .map(|s| point_segment(q, s))
        .fold(f64::INFINITY, f64::min)
}
