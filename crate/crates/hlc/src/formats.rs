//! Plain-text artifact formats.
//!
//! Every writer emits one record per line with six decimals, and every
//! parser accepts `#` comments and blank lines and reports the 1-based
//! line of the first bad record.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hlc_core::explore::{CellLabel, Decision, PassageGrid, PassageNetwork};
use hlc_core::perception::{Comparison, Feature, Label, RoomPassageClassifier, Rule};
use hlc_core::planner::{Plan, WaypointStatus};
use hlc_core::skeleton::{Skeleton, SkeletonConfig, SkeletonEdge, SkeletonError};
use hlc_core::world::WorldError;
use hlc_core::{Action, Bounds, Cell, Point, Pose, Segment, StepOutcome, World};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid world: {0}")]
    World(#[from] WorldError),
    #[error("invalid skeleton: {0}")]
    Skeleton(#[from] SkeletonError),
    #[error("{0}")]
    Invalid(String),
}

fn bad(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, split on whitespace.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        (!fields.is_empty()).then_some((k + 1, fields))
    })
}

fn num(line: usize, s: &str) -> Result<f64, FormatError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(bad(line, format!("expected a number, got `{s}`"))),
    }
}

fn int<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, FormatError> {
    s.parse()
        .map_err(|_| bad(line, format!("expected an integer, got `{s}`")))
}

fn arity(line: usize, fields: &[&str], n: usize) -> Result<(), FormatError> {
    if fields.len() == n {
        Ok(())
    } else {
        Err(bad(
            line,
            format!(
                "`{}` takes {} values, got {}",
                fields[0],
                n - 1,
                fields.len() - 1
            ),
        ))
    }
}

// World

pub fn write_world(world: &World) -> String {
    let mut out = String::new();
    let b = world.bounds();
    if !world.name().is_empty() {
        let _ = writeln!(out, "name {}", world.name());
    }
    let _ = writeln!(out, "bounds {:.6} {:.6}", b.width, b.height);
    if let Some(s) = world.start() {
        let _ = writeln!(out, "start {:.6} {:.6} {:.6}", s.x, s.y, s.theta);
    }
    for w in world.walls() {
        let _ = writeln!(
            out,
            "wall {:.6} {:.6} {:.6} {:.6}",
            w.a.x, w.a.y, w.b.x, w.b.y
        );
    }
    out
}

pub fn parse_world(text: &str) -> Result<World, FormatError> {
    let mut name = String::new();
    let mut bounds = None;
    let mut start = None;
    let mut walls = Vec::new();
    for (line, f) in records(text) {
        match f[0] {
            "name" => {
                arity(line, &f, 2)?;
                name = f[1].to_string();
            }
            "bounds" => {
                arity(line, &f, 3)?;
                if bounds.is_some() {
                    return Err(bad(line, "duplicate bounds"));
                }
                bounds = Some(Bounds {
                    width: num(line, f[1])?,
                    height: num(line, f[2])?,
                });
            }
            "start" => {
                arity(line, &f, 4)?;
                start = Some(Pose::new(
                    num(line, f[1])?,
                    num(line, f[2])?,
                    num(line, f[3])?,
                ));
            }
            "wall" => {
                arity(line, &f, 5)?;
                if bounds.is_none() {
                    return Err(bad(line, "wall before bounds"));
                }
                let a = Point::new(num(line, f[1])?, num(line, f[2])?);
                let b = Point::new(num(line, f[3])?, num(line, f[4])?);
                walls.push(Segment::new(a, b));
            }
            other => return Err(bad(line, format!("unknown record `{other}`"))),
        }
    }
    let bounds = bounds.ok_or_else(|| bad(1, "missing bounds"))?;
    let world = World::new(name, bounds, walls)?;
    Ok(match start {
        Some(s) => world.with_start(s),
        None => world,
    })
}

// Classifier

pub fn write_classifier(c: &RoomPassageClassifier) -> String {
    let mut out = String::new();
    for r in c.rules() {
        let _ = writeln!(
            out,
            "rule {} {} {:.6} {}",
            r.feature.name(),
            r.op.name(),
            r.threshold,
            r.label.name()
        );
    }
    let _ = writeln!(out, "default {}", c.default_label().name());
    out
}

fn label(line: usize, s: &str) -> Result<Label, FormatError> {
    Label::from_name(s).ok_or_else(|| bad(line, format!("unknown label `{s}`")))
}

pub fn parse_classifier(text: &str) -> Result<RoomPassageClassifier, FormatError> {
    let mut rules = Vec::new();
    let mut default = None;
    for (line, f) in records(text) {
        if default.is_some() {
            return Err(bad(line, "records after `default`"));
        }
        match f[0] {
            "rule" => {
                arity(line, &f, 5)?;
                let feature = Feature::from_name(f[1])
                    .ok_or_else(|| bad(line, format!("unknown feature `{}`", f[1])))?;
                let op = Comparison::from_name(f[2])
                    .ok_or_else(|| bad(line, format!("unknown comparison `{}`", f[2])))?;
                rules.push(Rule {
                    feature,
                    op,
                    threshold: num(line, f[3])?,
                    label: label(line, f[4])?,
                });
            }
            "default" => {
                arity(line, &f, 2)?;
                default = Some(label(line, f[1])?);
            }
            other => return Err(bad(line, format!("unknown record `{other}`"))),
        }
    }
    let default =
        default.ok_or_else(|| FormatError::Invalid("classifier has no `default` line".into()))?;
    RoomPassageClassifier::new(rules, default).map_err(|e| FormatError::Invalid(e.to_string()))
}

// Passage grid and network

fn grid_char(label: Option<CellLabel>) -> char {
    match label {
        None => '.',
        Some(CellLabel::Obstructed) => '#',
        Some(CellLabel::Passage(p)) => std::char::from_digit(p % 36, 36).unwrap_or('?'),
    }
}

/// One text row per grid row, top row first.
pub fn write_grid(grid: &PassageGrid) -> String {
    let mut out = String::new();
    for j in (0..grid.rows()).rev() {
        out.extend((0..grid.cols()).map(|i| grid_char(grid.label(Cell::new(i, j)))));
        out.push('\n');
    }
    out
}

/// Inverse of [`write_grid`]. Passage ids come back modulo 36.
pub fn parse_grid(text: &str, bounds: Bounds) -> Result<PassageGrid, FormatError> {
    let mut grid = PassageGrid::new(bounds);
    let rows: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
    if rows.len() != grid.rows() as usize {
        return Err(FormatError::Invalid(format!(
            "expected {} rows, got {}",
            grid.rows(),
            rows.len()
        )));
    }
    for (k, row) in rows.iter().enumerate() {
        let line = k + 1;
        let j = grid.rows() - 1 - k as i32;
        if row.chars().count() != grid.cols() as usize {
            return Err(bad(line, format!("expected {} columns", grid.cols())));
        }
        for (i, ch) in row.chars().enumerate() {
            let label = match ch {
                '.' => continue,
                '#' => CellLabel::Obstructed,
                c => CellLabel::Passage(
                    c.to_digit(36)
                        .ok_or_else(|| bad(line, format!("bad cell `{c}`")))?,
                ),
            };
            grid.set(Cell::new(i as i32, j), label);
        }
    }
    Ok(grid)
}

/// `edge i1 j1 i2 j2`, each undirected edge once.
pub fn write_network(network: &PassageNetwork) -> String {
    let mut out = String::new();
    for (a, b) in network.edges() {
        let _ = writeln!(out, "edge {} {} {} {}", a.i, a.j, b.i, b.j);
    }
    out
}

/// Rebuilds the network: every Passage cell of `grid` is a vertex.
pub fn parse_network(text: &str, grid: &PassageGrid) -> Result<PassageNetwork, FormatError> {
    let mut net = PassageNetwork::new();
    for (cell, label) in grid.cells() {
        if let CellLabel::Passage(p) = label {
            net.add_vertex(cell, p);
        }
    }
    for (line, f) in records(text) {
        if f[0] != "edge" {
            return Err(bad(line, format!("unknown record `{}`", f[0])));
        }
        arity(line, &f, 5)?;
        let a = Cell::new(int(line, f[1])?, int(line, f[2])?);
        let b = Cell::new(int(line, f[3])?, int(line, f[4])?);
        if !net.contains(a) || !net.contains(b) {
            return Err(bad(line, "edge endpoint is not a passage cell"));
        }
        net.add_edge(a, b);
    }
    Ok(net)
}

// Decision log

fn parse_action(line: usize, s: &str) -> Result<Action, FormatError> {
    let (kind, value) = s.split_at(s.len().min(1));
    let v = num(line, value)?;
    match kind {
        "F" => Ok(Action::Forward(v)),
        "R" => Ok(Action::Rotate(v)),
        _ => Err(bad(line, format!("bad action `{s}`"))),
    }
}

/// `pose_x pose_y theta action outcome`
pub fn write_decisions(decisions: &[Decision]) -> String {
    let mut out = String::new();
    for d in decisions {
        let _ = writeln!(
            out,
            "{:.6} {:.6} {:.6} {} {}",
            d.pose.x,
            d.pose.y,
            d.pose.theta,
            d.action,
            d.outcome_name()
        );
    }
    out
}

/// Logged decisions. Outcome poses are not stored, so each entry's
/// outcome pose is the next entry's pose.
pub fn parse_decisions(text: &str) -> Result<Vec<Decision>, FormatError> {
    let mut rows = Vec::new();
    for (line, f) in records(text) {
        arity(line, &f, 5)?;
        let pose = Pose::new(num(line, f[0])?, num(line, f[1])?, num(line, f[2])?);
        let action = parse_action(line, f[3])?;
        let truncated = match f[4] {
            "ok" => false,
            "truncated" => true,
            o => return Err(bad(line, format!("bad outcome `{o}`"))),
        };
        rows.push((pose, action, truncated));
    }
    let mut out = Vec::with_capacity(rows.len());
    for k in 0..rows.len() {
        let (pose, action, truncated) = rows[k];
        let next = rows.get(k + 1).map_or(pose, |r| r.0);
        let distance_traveled = match action {
            Action::Forward(_) => pose.position().distance(next.position()),
            Action::Rotate(_) => 0.0,
        };
        out.push(Decision {
            pose,
            action,
            outcome: StepOutcome {
                new_pose: next,
                truncated,
                distance_traveled,
            },
        });
    }
    Ok(out)
}

// Skeleton

pub fn write_skeleton(s: &Skeleton) -> String {
    let mut out = String::new();
    for r in s.regions() {
        let pid = r
            .passage_id
            .map_or_else(|| "-".to_string(), |p| p.to_string());
        let _ = writeln!(
            out,
            "region {} {:.6} {:.6} {:.6} {}",
            r.id, r.center.x, r.center.y, r.radius, pid
        );
    }
    for e in s.edges() {
        let _ = writeln!(
            out,
            "edge {} {} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6}",
            e.a,
            e.b,
            e.distance,
            e.exit_a.x,
            e.exit_a.y,
            e.entry_b.x,
            e.entry_b.y,
            e.midpoint.x,
            e.midpoint.y
        );
    }
    out
}

/// Regions and edges only; stored views are not part of the format.
pub fn parse_skeleton(text: &str, config: SkeletonConfig) -> Result<Skeleton, FormatError> {
    let mut s = Skeleton::new(config);
    for (line, f) in records(text) {
        match f[0] {
            "region" => {
                arity(line, &f, 6)?;
                let passage = if f[5] == "-" {
                    None
                } else {
                    Some(int(line, f[5])?)
                };
                s.insert_region(
                    int(line, f[1])?,
                    Point::new(num(line, f[2])?, num(line, f[3])?),
                    num(line, f[4])?,
                    passage,
                )
                .map_err(|e| bad(line, e.to_string()))?;
            }
            "edge" => {
                arity(line, &f, 10)?;
                let p = |k: usize| -> Result<Point, FormatError> {
                    Ok(Point::new(num(line, f[k])?, num(line, f[k + 1])?))
                };
                let edge = SkeletonEdge {
                    a: int(line, f[1])?,
                    b: int(line, f[2])?,
                    distance: num(line, f[3])?,
                    exit_a: p(4)?,
                    entry_b: p(6)?,
                    midpoint: p(8)?,
                };
                s.insert_edge(edge).map_err(|e| bad(line, e.to_string()))?;
            }
            other => return Err(bad(line, format!("unknown record `{other}`"))),
        }
    }
    Ok(s)
}

// Plan

/// `regions <id...>` header, then `waypoint <k> <x> <y> <status>` lines.
pub fn write_plan(plan: &Plan) -> String {
    let mut out = String::from("regions");
    for id in &plan.region_path {
        let _ = write!(out, " {id}");
    }
    out.push('\n');
    let _ = writeln!(out, "target {:.6} {:.6}", plan.target.x, plan.target.y);
    for (k, (w, st)) in plan.waypoints.iter().zip(&plan.status).enumerate() {
        let _ = writeln!(out, "waypoint {k} {:.6} {:.6} {}", w.x, w.y, st.name());
    }
    out
}

pub fn parse_plan(text: &str) -> Result<Plan, FormatError> {
    let mut region_path = None;
    let mut target = None;
    let mut waypoints = Vec::new();
    let mut status = Vec::new();
    for (line, f) in records(text) {
        match f[0] {
            "regions" => {
                let ids: Result<Vec<u32>, _> = f[1..].iter().map(|s| int(line, s)).collect();
                region_path = Some(ids?);
            }
            "target" => {
                arity(line, &f, 3)?;
                target = Some(Point::new(num(line, f[1])?, num(line, f[2])?));
            }
            "waypoint" => {
                arity(line, &f, 5)?;
                let k: usize = int(line, f[1])?;
                if k != waypoints.len() {
                    return Err(bad(line, format!("waypoint {k} out of order")));
                }
                waypoints.push(Point::new(num(line, f[2])?, num(line, f[3])?));
                status.push(
                    WaypointStatus::from_name(f[4])
                        .ok_or_else(|| bad(line, format!("bad status `{}`", f[4])))?,
                );
            }
            other => return Err(bad(line, format!("unknown record `{other}`"))),
        }
    }
    let region_path =
        region_path.ok_or_else(|| FormatError::Invalid("plan has no `regions` header".into()))?;
    let target = target.or(waypoints.last().copied()).unwrap_or_default();
    Ok(Plan {
        waypoints,
        status,
        region_path,
        target,
    })
}

// Trace log

/// Poses from `step` trace lines, in order.
pub fn parse_trace(text: &str) -> Result<Vec<Pose>, FormatError> {
    let mut out = Vec::new();
    for (line, f) in records(text) {
        if f[0] != "step" || f.len() != 9 {
            return Err(bad(
                line,
                "expected `step <n> <x> <y> <theta> <source> <action> <goal_x> <goal_y>`",
            ));
        }
        out.push(Pose::new(
            num(line, f[2])?,
            num(line, f[3])?,
            num(line, f[4])?,
        ));
    }
    Ok(out)
}

// key = value config

/// Flat `key = value` pairs; later keys override earlier ones.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, FormatError> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| bad(k + 1, "expected `key = value`"))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(bad(k + 1, "empty key"));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}
