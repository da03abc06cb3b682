//! SVG drawings of worlds and learned models.

use std::fmt::Write as _;

use hlc_core::explore::{CellLabel, PassageGrid, CELL_SIZE};
use hlc_core::planner::Plan;
use hlc_core::skeleton::Skeleton;
use hlc_core::{Point, World};

/// Pixels per metre.
pub const SCALE: f64 = 20.0;

const STYLE: &str = ".wall{stroke:#000;stroke-width:2;fill:none;stroke-linecap:round}\
.passage{fill:#4a7bd0;fill-opacity:0.45}\
.obstructed{fill:#f2a7c3;fill-opacity:0.6}\
.region{fill:#5fae6b;fill-opacity:0.18;stroke:#2e7d3a;stroke-width:1}\
.edge{stroke:#2e7d3a;stroke-width:1.5}\
.waypoint{fill:#d9480f}\
.label{font:10px sans-serif;fill:#222}\
.trace{stroke:#7048e8;stroke-width:1.5;fill:none}";

/// Layers to draw over a world; all optional.
#[derive(Clone, Copy, Debug, Default)]
pub struct Layers<'a> {
    pub grid: Option<&'a PassageGrid>,
    pub skeleton: Option<&'a Skeleton>,
    pub plan: Option<&'a Plan>,
    pub trace: &'a [Point],
}

struct Frame {
    height: f64,
}

impl Frame {
    fn x(&self, x: f64) -> f64 {
        x * SCALE
    }

    fn y(&self, y: f64) -> f64 {
        (self.height - y) * SCALE
    }
}

/// Standalone SVG document, world origin at the bottom left.
pub fn render_svg(world: &World, layers: &Layers<'_>) -> String {
    let b = world.bounds();
    let f = Frame { height: b.height };
    let (w, h) = (b.width * SCALE, b.height * SCALE);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w:.2} {h:.2}" width="{w:.0}" height="{h:.0}">"#
    );
    let _ = writeln!(out, "<style>{STYLE}</style>");
    if let Some(grid) = layers.grid {
        out.push_str("<g id=\"grid\">\n");
        for (cell, label) in grid.cells() {
            let class = match label {
                CellLabel::Passage(_) => "passage",
                CellLabel::Obstructed => "obstructed",
            };
            let (x0, y1) = (cell.i as f64 * CELL_SIZE, (cell.j + 1) as f64 * CELL_SIZE);
            let s = CELL_SIZE * SCALE;
            let _ = writeln!(
                out,
                r#"<rect class="{class}" x="{:.2}" y="{:.2}" width="{s:.2}" height="{s:.2}"/>"#,
                f.x(x0),
                f.y(y1)
            );
        }
        out.push_str("</g>\n");
    }
    if let Some(sk) = layers.skeleton {
        out.push_str("<g id=\"skeleton\">\n");
        for r in sk.regions() {
            let _ = writeln!(
                out,
                r#"<circle class="region" cx="{:.2}" cy="{:.2}" r="{:.2}"/>"#,
                f.x(r.center.x),
                f.y(r.center.y),
                r.radius * SCALE
            );
        }
        for e in sk.edges() {
            let (Some(a), Some(b)) = (sk.region(e.a), sk.region(e.b)) else {
                continue;
            };
            let pts = [a.center, e.exit_a, e.midpoint, e.entry_b, b.center];
            let _ = writeln!(
                out,
                r#"<polyline class="edge" fill="none" points="{}"/>"#,
                points(&f, &pts)
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("<g id=\"walls\">\n");
    for s in world.walls() {
        let _ = writeln!(
            out,
            r#"<path class="wall" d="M{:.2} {:.2}L{:.2} {:.2}"/>"#,
            f.x(s.a.x),
            f.y(s.a.y),
            f.x(s.b.x),
            f.y(s.b.y)
        );
    }
    out.push_str("</g>\n");
    if layers.trace.len() > 1 {
        let _ = writeln!(
            out,
            r#"<polyline class="trace" points="{}"/>"#,
            points(&f, layers.trace)
        );
    }
    if let Some(plan) = layers.plan {
        out.push_str("<g id=\"plan\">\n");
        for (k, p) in plan.waypoints.iter().enumerate() {
            let (x, y) = (f.x(p.x), f.y(p.y));
            let _ = writeln!(
                out,
                r#"<circle class="waypoint" cx="{x:.2}" cy="{y:.2}" r="3"/>"#
            );
            let _ = writeln!(
                out,
                r#"<text class="label" x="{:.2}" y="{:.2}">{k}</text>"#,
                x + 4.0,
                y - 4.0
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

fn points(f: &Frame, pts: &[Point]) -> String {
    let mut s = String::new();
    for (k, p) in pts.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.2},{:.2}", f.x(p.x), f.y(p.y));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use hlc_core::{Bounds, Cell, Segment};

    fn square() -> World {
        let c = [
            Point::new(0.0, 0.0),
            Point::new(5.0, 0.0),
            Point::new(5.0, 4.0),
            Point::new(0.0, 4.0),
        ];
        World::new(
            "sq",
            Bounds {
                width: 5.0,
                height: 4.0,
            },
            (0..4).map(|k| Segment::new(c[k], c[(k + 1) % 4])).collect(),
        )
        .unwrap()
    }

    #[test]
    fn one_path_per_wall() {
        let svg = render_svg(&square(), &Layers::default());
        assert_eq!(svg.matches("<path ").count(), 4);
        assert!(svg.contains(r#"d="M0.00 80.00L100.00 80.00""#), "{svg}");
    }

    #[test]
    fn labeled_cells_become_rects() {
        let w = square();
        let mut g = PassageGrid::new(w.bounds());
        for i in 0..3 {
            g.set(Cell::new(i, 1), CellLabel::Passage(0));
        }
        g.set(Cell::new(4, 3), CellLabel::Obstructed);
        let svg = render_svg(
            &w,
            &Layers {
                grid: Some(&g),
                ..Default::default()
            },
        );
        assert_eq!(svg.matches(r#"class="passage""#).count(), 3);
        assert_eq!(svg.matches(r#"class="obstructed""#).count(), 1);
        assert!(
            svg.contains(r#"<rect class="passage" x="0.00" y="40.00""#),
            "{svg}"
        );
    }
}
