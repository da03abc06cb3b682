//! The skeleton: non-overlapping circular regions built from decision
//! points, joined by edges labelled with the shortest observed transition.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{Point, Segment};
use crate::world::{Pose, View};

pub type RegionId = u32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkeletonConfig {
    pub radius_cap: f64,
    pub min_radius: f64,
    /// Minimum clearance kept between neighbouring discs.
    pub gap: f64,
    /// A shrunk disc smaller than this fraction of its unshrunk radius is not created.
    pub min_shrink_ratio: f64,
    /// Rays passing this close to a point make it visible from the region.
    pub visibility_tolerance: f64,
    /// Views retained per region for visibility queries.
    pub views_per_region: usize,
}

impl Default for SkeletonConfig {
    fn default() -> Self {
        Self {
            radius_cap: 2.0,
            min_radius: 0.2,
            gap: 0.01,
            min_shrink_ratio: 0.5,
            visibility_tolerance: 0.3,
            views_per_region: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub id: RegionId,
    pub center: Point,
    pub radius: f64,
    /// `None` for regions created outside exploration.
    pub passage_id: Option<u32>,
    /// Points of interest already known to be visible from this region.
    pub visible_targets: Vec<Point>,
    views: Vec<View>,
}

impl Region {
    pub fn contains(&self, p: Point) -> bool {
        self.center.distance(p) <= self.radius
    }

    pub fn views(&self) -> &[View] {
        &self.views
    }

    /// True if a view recorded in this region has an unobstructed ray passing
    /// within `tolerance` of `p`.
    pub fn can_see(&self, p: Point, tolerance: f64) -> bool {
        self.visible_targets.iter().any(|t| t.distance(p) < 1e-9)
            || self.views.iter().any(|v| view_sees(v, p, tolerance))
    }
}

/// True if some ray of `view` reaches past its closest approach to `p`
/// while passing within `tolerance` of it.
pub fn view_sees(view: &View, p: Point, tolerance: f64) -> bool {
    let o = view.pose.position();
    let rho = o.distance(p);
    if rho > view.max_range() {
        return false;
    }
    if rho <= tolerance {
        return true;
    }
    let bearing = view.pose.bearing_to(p);
    let spread = (tolerance / rho).min(1.0).asin();
    let step = view.sensor.step().max(1e-9);
    let half = view.sensor.fov / 2.0;
    let lo = ((half - (bearing + spread)) / step).floor().max(0.0) as usize;
    let hi = (((half - (bearing - spread)) / step).ceil().max(0.0) as usize)
        .min(view.len().saturating_sub(1));
    (lo..=hi).any(|i| {
        let delta = view.relative_angle(i) - bearing;
        let along = rho * delta.cos();
        along > 0.0 && rho * delta.sin().abs() <= tolerance && view.ranges[i] >= along
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkeletonEdge {
    /// Lower region id.
    pub a: RegionId,
    pub b: RegionId,
    /// Path length between the two circumference crossings.
    pub distance: f64,
    /// Crossing on the circumference of `a`.
    pub exit_a: Point,
    /// Crossing on the circumference of `b`.
    pub entry_b: Point,
    pub midpoint: Point,
}

impl SkeletonEdge {
    /// Crossing point on the circumference of `region`.
    pub fn endpoint_on(&self, region: RegionId) -> Point {
        if region == self.a {
            self.exit_a
        } else {
            self.entry_b
        }
    }

    pub fn other(&self, region: RegionId) -> RegionId {
        if region == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SkeletonError {
    UnknownRegion(RegionId),
    Overlap(RegionId, RegionId),
    SelfEdge(RegionId),
    NonPositiveDistance,
}

impl fmt::Display for SkeletonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkeletonError::UnknownRegion(id) => write!(f, "unknown region {id}"),
            SkeletonError::Overlap(a, b) => write!(f, "regions {a} and {b} overlap"),
            SkeletonError::SelfEdge(a) => write!(f, "self edge on region {a}"),
            SkeletonError::NonPositiveDistance => f.write_str("edge distance must be positive"),
        }
    }
}

impl core::error::Error for SkeletonError {}

/// Where the robot has been since it last left a region.
#[derive(Clone, Debug, PartialEq)]
struct Departure {
    from: RegionId,
    trail: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton {
    config: SkeletonConfig,
    regions: BTreeMap<RegionId, Region>,
    edges: BTreeMap<(RegionId, RegionId), SkeletonEdge>,
    adjacency: BTreeMap<RegionId, BTreeSet<RegionId>>,
    last_region: Option<RegionId>,
    next_id: RegionId,
    position: Option<Point>,
    departure: Option<Departure>,
    watched: Vec<Point>,
}

impl Default for Skeleton {
    fn default() -> Self {
        Self::new(SkeletonConfig::default())
    }
}

impl Skeleton {
    pub fn new(config: SkeletonConfig) -> Self {
        Self {
            config,
            regions: BTreeMap::new(),
            edges: BTreeMap::new(),
            adjacency: BTreeMap::new(),
            last_region: None,
            next_id: 0,
            position: None,
            departure: None,
            watched: Vec::new(),
        }
    }

    pub fn config(&self) -> &SkeletonConfig {
        &self.config
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn regions(&self) -> impl Iterator<Item = &Region> {
        self.regions.values()
    }

    pub fn region(&self, id: RegionId) -> Option<&Region> {
        self.regions.get(&id)
    }

    pub fn edges(&self) -> impl Iterator<Item = &SkeletonEdge> {
        self.edges.values()
    }

    pub fn edge(&self, a: RegionId, b: RegionId) -> Option<&SkeletonEdge> {
        self.edges.get(&key(a, b))
    }

    pub fn neighbors(&self, id: RegionId) -> impl Iterator<Item = RegionId> + '_ {
        self.adjacency
            .get(&id)
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }

    pub fn last_region(&self) -> Option<RegionId> {
        self.last_region
    }

    /// The region whose closed disc contains `p`.
    pub fn region_at(&self, p: Point) -> Option<RegionId> {
        self.regions.values().find(|r| r.contains(p)).map(|r| r.id)
    }

    pub fn degree(&self, id: RegionId) -> Result<usize, SkeletonError> {
        if !self.regions.contains_key(&id) {
            return Err(SkeletonError::UnknownRegion(id));
        }
        Ok(self.adjacency.get(&id).map_or(0, BTreeSet::len))
    }

    /// Inserts a region directly, e.g. when loading a saved skeleton.
    pub fn insert_region(
        &mut self,
        id: RegionId,
        center: Point,
        radius: f64,
        passage_id: Option<u32>,
    ) -> Result<(), SkeletonError> {
        if let Some(other) = self
            .regions
            .values()
            .find(|r| r.center.distance(center) < r.radius + radius)
        {
            return Err(SkeletonError::Overlap(other.id, id));
        }
        self.regions.insert(
            id,
            Region {
                id,
                center,
                radius,
                passage_id,
                visible_targets: Vec::new(),
                views: Vec::new(),
            },
        );
        self.next_id = self.next_id.max(id + 1);
        Ok(())
    }

    /// Inserts or shortens an edge directly.
    pub fn insert_edge(&mut self, edge: SkeletonEdge) -> Result<(), SkeletonError> {
        if edge.a == edge.b {
            return Err(SkeletonError::SelfEdge(edge.a));
        }
        for id in [edge.a, edge.b] {
            if !self.regions.contains_key(&id) {
                return Err(SkeletonError::UnknownRegion(id));
            }
        }
        if !(edge.distance > 0.0) {
            return Err(SkeletonError::NonPositiveDistance);
        }
        let edge = if edge.a < edge.b {
            edge
        } else {
            SkeletonEdge {
                a: edge.b,
                b: edge.a,
                exit_a: edge.entry_b,
                entry_b: edge.exit_a,
                ..edge
            }
        };
        let k = (edge.a, edge.b);
        match self.edges.get(&k) {
            Some(old) if old.distance <= edge.distance => {}
            _ => {
                self.edges.insert(k, edge);
                self.adjacency.entry(edge.a).or_default().insert(edge.b);
                self.adjacency.entry(edge.b).or_default().insert(edge.a);
            }
        }
        Ok(())
    }

    /// Forgets the tracked position, so the next decision starts a fresh
    /// trail. Call when the robot is placed somewhere new.
    pub fn relocate(&mut self) {
        self.position = None;
        self.departure = None;
        self.last_region = None;
    }

    /// Registers a point of interest whose visibility should be cached.
    pub fn watch(&mut self, p: Point) {
        if self.watched.iter().any(|q| q.distance(p) < 1e-9) {
            return;
        }
        self.watched.push(p);
        let tol = self.config.visibility_tolerance;
        for r in self.regions.values_mut() {
            if r.views.iter().any(|v| view_sees(v, p, tol)) {
                r.visible_targets.push(p);
            }
        }
    }

    /// Records a decision point: tracks region transitions along the straight
    /// move from the previous decision, then creates a region at `pose` if it
    /// lies outside every existing one. Returns the current region.
    pub fn observe_decision(
        &mut self,
        pose: Pose,
        view: &View,
        passage_id: Option<u32>,
    ) -> Option<RegionId> {
        let p = pose.position();
        let mut inside = match self.position {
            Some(prev) => self.advance(prev, p),
            None => self.region_at(p),
        };
        self.position = Some(p);

        if inside.is_none() {
            inside = self.try_create(p, view, passage_id);
        }
        if let Some(id) = inside {
            let cap = self.config.views_per_region;
            let tol = self.config.visibility_tolerance;
            let watched = &self.watched;
            if let Some(region) = self.regions.get_mut(&id) {
                if region.views.len() < cap {
                    for t in watched {
                        if !region.visible_targets.iter().any(|q| q.distance(*t) < 1e-9)
                            && view_sees(view, *t, tol)
                        {
                            region.visible_targets.push(*t);
                        }
                    }
                    region.views.push(view.clone());
                }
            }
        }
        self.last_region = inside;
        inside
    }

    /// Processes the move `from -> to` through existing regions, recording
    /// every entry into a region different from the one last left.
    fn advance(&mut self, from: Point, to: Point) -> Option<RegionId> {
        let seg = Segment::new(from, to);
        let mut current = self
            .last_region
            .filter(|id| self.regions[id].contains(from));
        let mut events: Vec<(f64, f64, RegionId)> = self
            .regions
            .values()
            .filter_map(|r| {
                seg.disc_interval(r.center, r.radius)
                    .map(|(t0, t1)| (t0, t1, r.id))
            })
            .filter(|&(t0, t1, id)| t1 > t0 || Some(id) == current)
            .collect();
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));

        for (t0, t1, id) in events {
            if Some(id) == current {
                if t1 < 1.0 {
                    self.depart(id, seg.a.lerp(seg.b, t1));
                    current = None;
                }
                continue;
            }
            if current.is_some() {
                // Overlapping intervals cannot happen for disjoint discs.
                continue;
            }
            let entry = seg.a.lerp(seg.b, t0);
            self.arrive(id, entry);
            current = Some(id);
            if t1 < 1.0 {
                self.depart(id, seg.a.lerp(seg.b, t1));
                current = None;
            }
        }
        if current.is_none() {
            if let Some(dep) = self.departure.as_mut() {
                if dep.trail.last() != Some(&to) {
                    dep.trail.push(to);
                }
            }
        }
        current
    }

    fn depart(&mut self, from: RegionId, exit: Point) {
        self.departure = Some(Departure {
            from,
            trail: alloc::vec![exit],
        });
    }

    /// Records the transition from the last departure into `id` at `entry`.
    fn arrive(&mut self, id: RegionId, entry: Point) {
        if let Some(mut dep) = self.departure.take() {
            if dep.from != id {
                if dep.trail.last() != Some(&entry) {
                    dep.trail.push(entry);
                }
                self.record_transition(dep.from, id, &dep.trail);
            }
        }
    }

    fn record_transition(&mut self, from: RegionId, to: RegionId, trail: &[Point]) {
        let distance: f64 = trail.windows(2).map(|w| w[0].distance(w[1])).sum();
        if distance <= 1e-9 {
            return;
        }
        let exit = trail[0];
        let entry = trail[trail.len() - 1];
        let mid = exit.lerp(entry, 0.5);
        let midpoint = trail
            .windows(2)
            .map(|w| Segment::new(w[0], w[1]).closest_point(mid))
            .min_by(|a, b| a.distance(mid).total_cmp(&b.distance(mid)))
            .unwrap_or(mid);
        // Both regions exist and differ, so this cannot fail.
        let _ = self.insert_edge(SkeletonEdge {
            a: from,
            b: to,
            distance,
            exit_a: exit,
            entry_b: entry,
            midpoint,
        });
    }

    fn try_create(&mut self, p: Point, view: &View, passage_id: Option<u32>) -> Option<RegionId> {
        let cfg = self.config;
        let unshrunk = view.min_range().min(cfg.radius_cap);
        let mut radius = unshrunk;
        for r in self.regions.values() {
            radius = radius.min(r.center.distance(p) - r.radius - cfg.gap);
        }
        if radius < cfg.min_radius || radius < cfg.min_shrink_ratio * unshrunk {
            return None;
        }
        let id = self.next_id;
        self.next_id += 1;
        self.regions.insert(
            id,
            Region {
                id,
                center: p,
                radius,
                passage_id,
                visible_targets: Vec::new(),
                views: Vec::new(),
            },
        );
        // The robot is now at the centre of the new disc; find where the trail entered it.
        if let Some(dep) = self.departure.take() {
            let mut trail: Vec<Point> = Vec::new();
            let mut entry = None;
            for w in dep.trail.windows(2) {
                trail.push(w[0]);
                if let Some((t0, _)) = Segment::new(w[0], w[1]).disc_interval(p, radius) {
                    entry = Some(w[0].lerp(w[1], t0));
                    break;
                }
            }
            if let (Some(e), Some(_)) = (entry, trail.first()) {
                trail.push(e);
                self.record_transition(dep.from, id, &trail);
            }
        }
        Some(id)
    }
}

fn key(a: RegionId, b: RegionId) -> (RegionId, RegionId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}
