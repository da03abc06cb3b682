use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{normalize_angle, Point, Segment};
use crate::world::{Pose, View};

/// A long, thin, unobstructed extent seen in a single view.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stretch {
    pub origin: Point,
    /// Absolute heading of the stretch axis.
    pub direction: f64,
    pub length: f64,
    pub width: f64,
    /// Mean range over the rays that make up the stretch.
    pub avg_length: f64,
    pub detected_at: Pose,
}

impl Stretch {
    pub fn end(&self) -> Point {
        self.origin + Point::from_angle(self.direction) * self.length
    }

    pub fn midpoint(&self) -> Point {
        self.origin + Point::from_angle(self.direction) * (self.length * 0.5)
    }

    pub fn segment(&self) -> Segment {
        Segment::new(self.origin, self.end())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StretchConfig {
    /// Smallest angular extent of a run of long rays.
    pub min_cone: f64,
    /// Half-width of the cone around the central ray used for `length`.
    pub center_half: f64,
}

impl Default for StretchConfig {
    fn default() -> Self {
        Self {
            min_cone: 4f64.to_radians(),
            center_half: 5f64.to_radians(),
        }
    }
}

/// Finds every maximal run of rays at least `d` long that spans the minimum
/// cone, longest first.
pub fn detect_stretches(view: &View, d: f64, cfg: &StretchConfig) -> Vec<Stretch> {
    let n = view.len();
    let step = view.sensor.step();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if view.ranges[i] < d {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && view.ranges[i] >= d {
            i += 1;
        }
        let end = i - 1;
        let count = end - start + 1;
        if (count as f64) * step + 1e-9 < cfg.min_cone {
            continue;
        }
        out.push(build(view, start, end, d, cfg));
    }
    out.sort_by(|a, b| b.length.total_cmp(&a.length));
    out
}

fn build(view: &View, start: usize, end: usize, d: f64, cfg: &StretchConfig) -> Stretch {
    let central = 0.5 * (view.relative_angle(start) + view.relative_angle(end));
    let run = &view.ranges[start..=end];
    let mut length = f64::INFINITY;
    for (k, &r) in run.iter().enumerate() {
        if (view.relative_angle(start + k) - central).abs() <= cfg.center_half + 1e-12 {
            length = length.min(r);
        }
    }
    if !length.is_finite() {
        length = run.iter().copied().fold(f64::INFINITY, f64::min);
    }
    let avg_length = run.iter().sum::<f64>() / run.len() as f64;
    // Lower indices lie counterclockwise of the run, higher ones clockwise.
    let left = flank_lateral(view, (0..start).rev(), central, d)
        .unwrap_or_else(|| open_lateral(view, start..=end, central, d, 1.0));
    let right = flank_lateral(view, end + 1..view.len(), central, d)
        .unwrap_or_else(|| open_lateral(view, start..=end, central, d, -1.0));
    Stretch {
        origin: view.pose.position(),
        direction: normalize_angle(view.pose.theta + central),
        length,
        width: left + right,
        avg_length,
        detected_at: view.pose,
    }
}

/// Lateral offset of the flanking obstacle nearest to `d / 2` along the axis,
/// walking outward from the run over short rays. Capped at `d`.
fn flank_lateral(
    view: &View,
    indices: impl Iterator<Item = usize>,
    central: f64,
    d: f64,
) -> Option<f64> {
    let target = 0.5 * d;
    let mut best: Option<(f64, f64)> = None;
    for k in indices {
        let r = view.ranges[k];
        if r >= d {
            break;
        }
        let off = (view.relative_angle(k) - central).abs();
        if off > FRAC_PI_2 {
            break;
        }
        let axial = r * off.cos();
        let lateral = r * off.sin();
        let err = (axial - target).abs();
        if best.map_or(true, |(e, _)| err < e) {
            best = Some((err, lateral));
        }
    }
    best.map(|(_, l)| l.min(d))
}

/// Lateral free distance on one side (`sign` +1 left, -1 right) when the run
/// reaches the edge of the arc with no short flanking ray. Capped at `2 d`.
fn open_lateral(
    view: &View,
    run: core::ops::RangeInclusive<usize>,
    central: f64,
    d: f64,
    sign: f64,
) -> f64 {
    let mut widest: f64 = 0.0;
    for k in run {
        let off = (view.relative_angle(k) - central) * sign;
        if off <= 0.0 {
            continue;
        }
        let r = view.ranges[k];
        widest = widest.max(if off >= FRAC_PI_2 { r } else { r * off.sin() });
    }
    widest.min(2.0 * d)
}
