#![allow(dead_code)]

use hlc_core::{Bounds, Point, Segment, World};

pub fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

/// Closed polygon through `pts`.
pub fn ring(pts: &[(f64, f64)]) -> Vec<Segment> {
    (0..pts.len())
        .map(|k| {
            let (a, b) = (pts[k], pts[(k + 1) % pts.len()]);
            Segment::new(p(a.0, a.1), p(b.0, b.1))
        })
        .collect()
}

pub fn rect_walls(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Segment> {
    ring(&[(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
}

pub fn world(w: f64, h: f64, walls: Vec<Segment>) -> World {
    World::new(
        "fixture",
        Bounds {
            width: w,
            height: h,
        },
        walls,
    )
    .unwrap()
}

pub fn boxed(w: f64, h: f64) -> World {
    world(w, h, rect_walls(0.0, 0.0, w, h))
}

/// Ray/segment distance by Cramer's rule, independent of the crate's own.
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
    let (cx, cy) = (s.a.x + t * ex, s.a.y + t * ey);
    ((q.x - cx).powi(2) + (q.y - cy).powi(2)).sqrt()
}

/// Hand-drawn H: two 30m halls 2m wide joined at mid-height by a 15m cross
/// hall. Every hall wall runs from a junction to an end, 14 walls in all.
pub fn h_fixture() -> World {
    let (w, xl, xr) = (2.0, 1.0, 18.0);
    let (y0, ym0, ym1, y1) = (1.0, 15.0, 17.0, 31.0);
    let s = |a: (f64, f64), b: (f64, f64)| Segment::new(p(a.0, a.1), p(b.0, b.1));
    let (l0, l1) = (xl, xl + w);
    let (r0, r1) = (xr, xr + w);
    let walls = vec![
        // west hall
        s((l0, y0), (l0, ym0)),
        s((l0, ym0), (l0, y1)),
        s((l1, y0), (l1, ym0)),
        s((l1, ym1), (l1, y1)),
        s((l0, y0), (l1, y0)),
        s((l0, y1), (l1, y1)),
        // east hall
        s((r1, y0), (r1, ym0)),
        s((r1, ym0), (r1, y1)),
        s((r0, y0), (r0, ym0)),
        s((r0, ym1), (r0, y1)),
        s((r0, y0), (r1, y0)),
        s((r0, y1), (r1, y1)),
        // cross hall
        s((l1, ym0), (r0, ym0)),
        s((l1, ym1), (r0, ym1)),
    ];
    world(21.0, 32.0, walls)
}
