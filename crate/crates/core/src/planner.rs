//! A* over the skeleton and expansion of region paths into waypoints.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::geometry::Point;
use crate::skeleton::{RegionId, Skeleton};

pub const ATTACH_DISTANCE_WEIGHT: f64 = -5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanError {
    NoModel,
    Unreachable,
    UnknownRegion(RegionId),
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::NoModel => f.write_str("skeleton is empty"),
            PlanError::Unreachable => f.write_str("target region is unreachable"),
            PlanError::UnknownRegion(id) => write!(f, "unknown region {id}"),
        }
    }
}

impl core::error::Error for PlanError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaypointStatus {
    Pending,
    Visited,
    Skipped,
}

impl WaypointStatus {
    pub fn name(self) -> &'static str {
        match self {
            WaypointStatus::Pending => "pending",
            WaypointStatus::Visited => "visited",
            WaypointStatus::Skipped => "skipped",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "pending" => Some(WaypointStatus::Pending),
            "visited" => Some(WaypointStatus::Visited),
            "skipped" => Some(WaypointStatus::Skipped),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub waypoints: Vec<Point>,
    pub status: Vec<WaypointStatus>,
    pub region_path: Vec<RegionId>,
    pub target: Point,
}

impl Plan {
    pub fn empty(target: Point) -> Self {
        Self {
            waypoints: Vec::new(),
            status: Vec::new(),
            region_path: Vec::new(),
            target,
        }
    }

    pub fn from_waypoints(waypoints: Vec<Point>, target: Point) -> Self {
        let status = alloc::vec![WaypointStatus::Pending; waypoints.len()];
        Self {
            waypoints,
            status,
            region_path: Vec::new(),
            target,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    /// True when no waypoint is still pending.
    pub fn is_exhausted(&self) -> bool {
        self.status.iter().all(|s| *s != WaypointStatus::Pending)
    }

    /// Moves waypoint `k` out of Pending. Resolved waypoints never change.
    pub fn resolve(&mut self, k: usize, status: WaypointStatus) {
        if self.status[k] == WaypointStatus::Pending {
            self.status[k] = status;
        }
    }
}

/// Region that stands in for `p` when planning.
pub fn attach_point(skeleton: &Skeleton, p: Point) -> Result<RegionId, PlanError> {
    if skeleton.is_empty() {
        return Err(PlanError::NoModel);
    }
    if let Some(id) = skeleton.region_at(p) {
        return Ok(id);
    }
    let tol = skeleton.config().visibility_tolerance;
    let visible = skeleton
        .regions()
        .filter(|r| r.can_see(p, tol))
        .min_by(|a, b| {
            a.center
                .distance(p)
                .total_cmp(&b.center.distance(p))
                .then(a.id.cmp(&b.id))
        });
    if let Some(r) = visible {
        return Ok(r.id);
    }
    let mut best: Option<(f64, RegionId)> = None;
    for r in skeleton.regions() {
        let degree = skeleton.degree(r.id).unwrap_or(0) as f64;
        let s = attach_score(r.center.distance(p), degree);
        if best.map_or(true, |(bs, _)| s > bs) {
            best = Some((s, r.id));
        }
    }
    best.map(|(_, id)| id).ok_or(PlanError::NoModel)
}

pub fn attach_score(distance: f64, degree: f64) -> f64 {
    ATTACH_DISTANCE_WEIGHT * distance + degree
}

/// Cost of moving between adjacent regions: the edge label plus both radii.
pub fn edge_cost(skeleton: &Skeleton, a: RegionId, b: RegionId) -> Option<f64> {
    let e = skeleton.edge(a, b)?;
    let ra = skeleton.region(a)?.radius;
    let rb = skeleton.region(b)?.radius;
    Some(e.distance + ra + rb)
}

#[derive(Clone, Copy, PartialEq)]
struct Open {
    f: f64,
    id: RegionId,
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then(other.id.cmp(&self.id))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Cheapest region path from `from` to `to` and its cost.
pub fn plan_regions_with_cost(
    skeleton: &Skeleton,
    from: RegionId,
    to: RegionId,
) -> Result<(Vec<RegionId>, f64), PlanError> {
    for id in [from, to] {
        if skeleton.region(id).is_none() {
            return Err(PlanError::UnknownRegion(id));
        }
    }
    let goal = skeleton.region(to).map(|r| r.center).unwrap_or_default();
    let h = |id: RegionId| skeleton.region(id).map_or(0.0, |r| r.center.distance(goal));
    let mut g: BTreeMap<RegionId, f64> = BTreeMap::new();
    let mut parent: BTreeMap<RegionId, RegionId> = BTreeMap::new();
    let mut closed: BTreeMap<RegionId, ()> = BTreeMap::new();
    let mut open = BinaryHeap::new();
    g.insert(from, 0.0);
    open.push(Open {
        f: h(from),
        id: from,
    });
    while let Some(Open { id, .. }) = open.pop() {
        if closed.insert(id, ()).is_some() {
            continue;
        }
        if id == to {
            let mut path = alloc::vec![to];
            let mut cur = to;
            while cur != from {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return Ok((path, g[&to]));
        }
        let gid = g[&id];
        for n in skeleton.neighbors(id) {
            if closed.contains_key(&n) {
                continue;
            }
            let Some(c) = edge_cost(skeleton, id, n) else {
                continue;
            };
            let cand = gid + c;
            let better = match g.get(&n) {
                None => true,
                Some(&old) => {
                    cand < old || (cand == old && parent.get(&n).map_or(false, |p| id < *p))
                }
            };
            if better {
                g.insert(n, cand);
                parent.insert(n, id);
                open.push(Open {
                    f: cand + h(n),
                    id: n,
                });
            }
        }
    }
    Err(PlanError::Unreachable)
}

pub fn plan_regions(
    skeleton: &Skeleton,
    from: RegionId,
    to: RegionId,
) -> Result<Vec<RegionId>, PlanError> {
    plan_regions_with_cost(skeleton, from, to).map(|(p, _)| p)
}

/// Interleaves centres with edge crossings and midpoints along the path.
pub fn expand_waypoints(skeleton: &Skeleton, region_path: &[RegionId], target: Point) -> Plan {
    let mut waypoints = Vec::new();
    for (k, &id) in region_path.iter().enumerate() {
        if let Some(r) = skeleton.region(id) {
            waypoints.push(r.center);
        }
        if let Some(&next) = region_path.get(k + 1) {
            if let Some(e) = skeleton.edge(id, next) {
                waypoints.push(e.endpoint_on(id));
                waypoints.push(e.midpoint);
                waypoints.push(e.endpoint_on(next));
            }
        }
    }
    let mut plan = Plan::from_waypoints(waypoints, target);
    plan.region_path = region_path.to_vec();
    plan
}

pub fn try_plan(skeleton: &Skeleton, robot: Point, target: Point) -> Result<Plan, PlanError> {
    let from = attach_point(skeleton, robot)?;
    let to = attach_point(skeleton, target)?;
    let path = plan_regions(skeleton, from, to)?;
    Ok(expand_waypoints(skeleton, &path, target))
}

/// Plan from `robot` to `target`, or an empty plan when none exists.
pub fn make_plan(skeleton: &Skeleton, robot: Point, target: Point) -> Plan {
    try_plan(skeleton, robot, target).unwrap_or_else(|_| Plan::empty(target))
}
