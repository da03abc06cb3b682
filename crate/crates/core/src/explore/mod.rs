//! Deliberate exploration for high-level connectivity.
//!
//! The robot rotates in place to find its first stretches, then repeatedly
//! takes the best candidate from its list, drives to where the candidate was
//! seen and follows it until the passage ends, turns, or opens into a room.
//! Along the way it labels a 1m passage grid, grows the cell network used
//! for repositioning, and builds the skeleton used later for planning.

mod candidates;
mod grid;
mod traverse;

pub use candidates::{
    allen_relation, check_candidate, projected_overlap, qualify_candidate, similar_stretches,
    similar_with, uncovered, AllenRelation, Candidate, CandidateList, CandidateState, Disqualified,
    SimilarityConfig,
};
pub use grid::{
    bfs_cell_path, cells_to_waypoints, count_rays, record_travel_edge, update_occupancy, CellLabel,
    OccupancyConfig, PassageGrid, PassageNetwork, RayCounts, Unreachable, CELL_SIZE,
};
pub use traverse::{
    front_gap, should_terminate, view_width, TerminationConfig, TerminationReason, TraversalState,
};

use alloc::vec::Vec;
use core::fmt;
use core::ops::ControlFlow;

use crate::controller::{largest_fitting, rotations_toward, run_task_observed, ControllerConfig};
use crate::geometry::{angle_diff, Point};
use crate::perception::{
    compute_features, detect_stretches, FeatureVector, RoomPassageClassifier, SectorConfig,
    Stretch, StretchConfig,
};
use crate::planner::Plan;
use crate::skeleton::{Skeleton, SkeletonConfig};
use crate::world::{Action, ActionSet, Pose, SensorConfig, StepOutcome, View, World, WorldError};
use crate::NoClock;

#[derive(Clone, Debug, PartialEq)]
pub struct ExploreConfig {
    /// Minimum stretch length.
    pub d: f64,
    pub radius: f64,
    pub sensor: SensorConfig,
    pub actions: ActionSet,
    pub sectors: SectorConfig,
    pub stretch: StretchConfig,
    pub occupancy: OccupancyConfig,
    pub skeleton: SkeletonConfig,
    pub termination: TerminationConfig,
    pub classifier: RoomPassageClassifier,
    /// Side clearance that triggers a veer away from the wall.
    pub veer_clearance: f64,
    /// Longest forward step taken while traversing.
    pub max_forward: f64,
    pub decision_cap: usize,
    /// Simulated seconds.
    pub budget: f64,
    pub linear_speed: f64,
    pub angular_speed: f64,
    pub orientation_window: usize,
    /// Views only count toward the width history this far into a passage.
    pub width_gate: f64,
    pub stuck_limit: usize,
    /// A candidate start this close is approached directly.
    pub near_start: f64,
    pub approach: f64,
    /// Bearing to the stretch end beyond which the robot turns back to it.
    pub realign: f64,
    /// Clear path, in forward steps, wanted before heading straight at the end.
    pub lookahead: f64,
    /// Within this distance of the stretch end the robot stops realigning.
    pub end_slack: f64,
    /// Stretches this close in direction can extend the one being followed.
    pub extend_tolerance: f64,
    /// Action cap for each repositioning leg.
    pub goto_cap: usize,
    /// Fallback moves to the farthest cell when the list runs dry.
    pub fallback_moves: usize,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        let d = 7.0;
        Self {
            d,
            radius: 0.4,
            sensor: SensorConfig::default(),
            actions: ActionSet::default(),
            sectors: SectorConfig::default(),
            stretch: StretchConfig::default(),
            occupancy: OccupancyConfig::default(),
            skeleton: SkeletonConfig::default(),
            termination: TerminationConfig::default(),
            classifier: RoomPassageClassifier::default_for(d),
            veer_clearance: 0.15,
            max_forward: 0.8,
            decision_cap: 750,
            budget: 1200.0,
            linear_speed: 1.0,
            angular_speed: 1.0,
            orientation_window: 40,
            width_gate: 3.0,
            stuck_limit: 5,
            near_start: 1.0,
            approach: 0.5,
            realign: 0.125,
            end_slack: 1.0,
            lookahead: 2.0,
            extend_tolerance: 20f64.to_radians(),
            goto_cap: 750,
            fallback_moves: 1,
        }
    }
}

impl ExploreConfig {
    pub fn controller(&self) -> ControllerConfig {
        ControllerConfig {
            radius: self.radius,
            actions: self.actions.clone(),
            sensor: self.sensor,
            sectors: self.sectors,
            success_radius: self.approach,
            action_cap: self.goto_cap,
            linear_speed: self.linear_speed,
            angular_speed: self.angular_speed,
            planning: false,
            ..ControllerConfig::default()
        }
    }

    fn duration(&self, action: Action, outcome: &StepOutcome) -> f64 {
        match action {
            Action::Forward(_) => outcome.distance_traveled / self.linear_speed,
            Action::Rotate(a) => a.abs() / self.angular_speed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExploreError {
    NoInitialStretch,
    World(WorldError),
}

impl fmt::Display for ExploreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExploreError::NoInitialStretch => {
                f.write_str("no stretch found during the initial rotation")
            }
            ExploreError::World(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ExploreError {}

impl From<WorldError> for ExploreError {
    fn from(e: WorldError) -> Self {
        ExploreError::World(e)
    }
}

/// One logged exploration decision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decision {
    pub pose: Pose,
    pub action: Action,
    pub outcome: StepOutcome,
}

impl Decision {
    pub fn outcome_name(&self) -> &'static str {
        if self.outcome.truncated {
            "truncated"
        } else {
            "ok"
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Traversal {
    pub passage_id: u32,
    pub candidate_id: u32,
    pub reason: TerminationReason,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExplorationResult {
    pub grid: PassageGrid,
    pub network: PassageNetwork,
    pub skeleton: Skeleton,
    pub candidates: CandidateList,
    pub decisions: Vec<Decision>,
    pub traversals: Vec<Traversal>,
    /// Simulated seconds.
    pub elapsed: f64,
    pub distance: f64,
    pub final_pose: Pose,
}

impl ExplorationResult {
    pub fn passages(&self) -> usize {
        self.traversals.len()
    }
}

/// A single exploration run over one world.
pub struct Explorer<'w> {
    world: &'w World,
    cfg: ExploreConfig,
    pub pose: Pose,
    pub grid: PassageGrid,
    pub network: PassageNetwork,
    pub skeleton: Skeleton,
    pub candidates: CandidateList,
    pub decisions: Vec<Decision>,
    pub traversals: Vec<Traversal>,
    pub elapsed: f64,
    pub distance: f64,
}

impl<'w> Explorer<'w> {
    pub fn new(world: &'w World, start: Pose, cfg: ExploreConfig) -> Self {
        Self {
            world,
            pose: start,
            grid: PassageGrid::new(world.bounds()),
            network: PassageNetwork::new(),
            skeleton: Skeleton::new(cfg.skeleton),
            candidates: CandidateList::new(),
            decisions: Vec::new(),
            traversals: Vec::new(),
            elapsed: 0.0,
            distance: 0.0,
            cfg,
        }
    }

    pub fn config(&self) -> &ExploreConfig {
        &self.cfg
    }

    pub fn out_of_time(&self) -> bool {
        self.elapsed >= self.cfg.budget
    }

    pub fn scan(&self) -> Result<View, WorldError> {
        self.world.scan(self.pose, &self.cfg.sensor)
    }

    /// Records the decision point, applies the action and advances the clock.
    fn act(&mut self, view: &View, action: Action, passage: Option<u32>) -> StepOutcome {
        self.skeleton.observe_decision(self.pose, view, passage);
        let outcome = self.world.apply_action(self.pose, action, self.cfg.radius);
        self.decisions.push(Decision {
            pose: self.pose,
            action,
            outcome,
        });
        self.elapsed += self.cfg.duration(action, &outcome);
        self.distance += outcome.distance_traveled;
        self.pose = outcome.new_pose;
        outcome
    }

    /// Queues every qualifying stretch in the view. Returns all stretches seen.
    pub fn glimpse(&mut self, view: &View, features: &FeatureVector) -> Vec<Stretch> {
        let stretches = detect_stretches(view, self.cfg.d, &self.cfg.stretch);
        for s in &stretches {
            if qualify_candidate(
                s,
                &self.grid,
                &self.candidates,
                &self.cfg.classifier,
                features,
            ) {
                self.candidates.push_stretch(*s, self.cfg.d);
            }
        }
        stretches
    }

    /// Turns in place through a full revolution with the smallest rotation,
    /// collecting stretches from every view.
    pub fn full_rotation(&mut self) -> Result<(), WorldError> {
        let step = self.cfg.actions.smallest_rotation();
        let mut turned = 0.0;
        while turned < core::f64::consts::TAU && !self.out_of_time() {
            let view = self.scan()?;
            let features = compute_features(&view, &self.cfg.sectors);
            self.glimpse(&view, &features);
            self.act(&view, Action::Rotate(step), None);
            turned += step;
        }
        Ok(())
    }

    /// Drives along `waypoints` toward `target` with the controller.
    fn follow(&mut self, waypoints: Vec<Point>, target: Point) -> Result<(), WorldError> {
        let ccfg = self.cfg.controller();
        let plan = Plan::from_waypoints(waypoints, target);
        let budget = self.cfg.budget;
        let cfg = &self.cfg;
        let decisions = &mut self.decisions;
        let elapsed = &mut self.elapsed;
        let distance = &mut self.distance;
        let result = run_task_observed(
            self.world,
            self.pose,
            target,
            Some(plan),
            &mut self.skeleton,
            &ccfg,
            &NoClock,
            &mut |step| {
                decisions.push(Decision {
                    pose: step.pose,
                    action: step.action,
                    outcome: step.outcome,
                });
                *elapsed += cfg.duration(step.action, &step.outcome);
                *distance += step.outcome.distance_traveled;
                if *elapsed >= budget {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        )?;
        if let Some(p) = result.final_pose {
            self.pose = p;
        }
        Ok(())
    }

    /// Rotates in place until the heading is within half the smallest
    /// rotation of `theta`.
    fn face(&mut self, theta: f64) -> Result<(), WorldError> {
        for r in rotations_toward(&self.cfg.actions, self.pose.theta, theta) {
            if self.out_of_time() {
                break;
            }
            let view = self.scan()?;
            self.act(&view, Action::Rotate(r), None);
        }
        Ok(())
    }

    /// Network cell standing in for the robot's position.
    fn robot_cell(&self) -> Option<crate::geometry::Cell> {
        let c = self.grid.cell_of(self.pose.position());
        if self.network.contains(c) {
            Some(c)
        } else {
            self.network.nearest_vertex(self.pose.position())
        }
    }

    fn decision_points(&self) -> Vec<Point> {
        self.decisions.iter().map(|d| d.pose.position()).collect()
    }

    /// Repositions at the candidate's start, facing along its stretch.
    pub fn goto_candidate_start(&mut self, c: &Candidate) -> Result<Pose, GotoError> {
        let start = c.start.position();
        if self.pose.position().distance(start) > self.cfg.near_start {
            let from = self.robot_cell().ok_or(GotoError::Unreachable)?;
            let to = self
                .network
                .nearest_vertex(start)
                .ok_or(GotoError::Unreachable)?;
            let path =
                bfs_cell_path(&self.network, from, to).map_err(|_| GotoError::Unreachable)?;
            let waypoints = cells_to_waypoints(&path, &self.decision_points());
            self.follow(waypoints, start)?;
        }
        if self.pose.position().distance(start) > self.cfg.approach {
            self.follow(alloc::vec![start], start)?;
        }
        if self.pose.position().distance(start) > self.cfg.near_start {
            return Err(GotoError::Unreachable);
        }
        self.face(c.stretch.direction)?;
        Ok(self.pose)
    }

    /// Follows the candidate's stretch until a stopping condition holds.
    pub fn traverse_passage(
        &mut self,
        c: &Candidate,
        passage_id: u32,
    ) -> Result<Traversal, WorldError> {
        let mut state = TraversalState::new(passage_id, self.cfg.orientation_window);
        let mut stretch = c.stretch;
        let axis = Point::from_angle(c.stretch.direction);
        let base = c.stretch.origin;
        let mut queued: Option<Action> = None;
        let mut last: Option<Action> = None;
        let mut stuck = 0usize;
        let mut trail = record_travel_edge(
            &mut self.grid,
            &mut self.network,
            self.pose,
            self.pose,
            passage_id,
            None,
        )
        .last()
        .copied();
        let reason = loop {
            if state.decisions >= self.cfg.decision_cap {
                break TerminationReason::BudgetExhausted;
            }
            if self.out_of_time() {
                break TerminationReason::TimeExpired;
            }
            let view = self.scan()?;
            update_occupancy(
                &mut self.grid,
                &mut self.network,
                &view,
                passage_id,
                &self.cfg.occupancy,
            );
            let features = compute_features(&view, &self.cfg.sectors);
            for s in self.glimpse(&view, &features) {
                let reach = (s.end() - base).dot(axis);
                if angle_diff(s.direction, c.stretch.direction).abs() <= self.cfg.extend_tolerance
                    && reach > (stretch.end() - base).dot(axis)
                {
                    stretch = s;
                }
            }
            if state.passage_length >= self.cfg.width_gate {
                state
                    .width_history
                    .push(view_width(&view, self.cfg.termination.width_beam));
            }
            if let Some(r) =
                should_terminate(&state, &view, &features, &stretch, &self.cfg.termination)
            {
                break r;
            }
            let action = match queued.take() {
                Some(a) => a,
                None => self.traverse_action(&view, &stretch, &mut queued),
            };
            let action = match (last, action) {
                (Some(Action::Rotate(p)), Action::Rotate(a)) if (p + a).abs() <= 1e-9 => {
                    let free = view.free_travel(0.0, self.cfg.radius);
                    Action::Forward(
                        largest_fitting(&self.cfg.actions, self.cfg.max_forward, free)
                            .unwrap_or(self.cfg.actions.smallest_move()),
                    )
                }
                _ => action,
            };
            last = Some(action);
            let from = self.pose;
            let outcome = self.act(&view, action, Some(passage_id));
            state.decisions += 1;
            state.push_heading(from.theta, outcome.distance_traveled);
            if let Action::Forward(_) = action {
                let cells = record_travel_edge(
                    &mut self.grid,
                    &mut self.network,
                    from,
                    outcome.new_pose,
                    passage_id,
                    trail,
                );
                trail = cells.last().copied().or(trail);
                state.passage_length += outcome.distance_traveled;
                if outcome.distance_traveled <= 1e-9 {
                    stuck += 1;
                    if stuck >= self.cfg.stuck_limit {
                        break TerminationReason::Stuck;
                    }
                } else {
                    stuck = 0;
                }
            }
        };
        Ok(Traversal {
            passage_id,
            candidate_id: c.id,
            reason,
            length: state.passage_length,
        })
    }

    fn traverse_action(
        &self,
        view: &View,
        stretch: &Stretch,
        queued: &mut Option<Action>,
    ) -> Action {
        let cfg = &self.cfg;
        let (mut left, mut right) = (f64::INFINITY, f64::INFINITY);
        for (i, &r) in view.ranges.iter().enumerate() {
            let rel = view.relative_angle(i);
            if cfg.sectors.is_front(rel) || rel.abs() > cfg.sectors.lateral_hi {
                continue;
            }
            if rel > 0.0 {
                left = left.min(r);
            } else {
                right = right.min(r);
            }
        }
        let (left, right) = (left - cfg.radius, right - cfg.radius);
        let small = cfg.actions.smallest_rotation();
        let step = cfg.actions.smallest_move();
        let free = view.free_travel(0.0, cfg.radius);
        if left.min(right) <= cfg.veer_clearance {
            let away = if left <= right { -small } else { small };
            if free >= step {
                *queued = Some(Action::Forward(step));
            }
            return Action::Rotate(away);
        }
        let end = stretch.end();
        let dist = self.pose.position().distance(end);
        let want = cfg.max_forward.min(dist).max(step);
        let bearing = self.pose.bearing_to(end);
        let inflated = cfg.radius + cfg.veer_clearance;
        let look = (cfg.lookahead * cfg.max_forward).min(dist);
        let near_end = dist <= cfg.end_slack;
        let visible = bearing.abs() <= view.sensor.fov / 2.0;
        let direct = near_end
            || !visible
            || view.free_travel(bearing, cfg.radius) + cfg.radius + cfg.termination.end_tolerance
                >= dist
            || view.free_travel(bearing, inflated) >= look;
        let heading = if direct {
            bearing
        } else {
            steer(view, bearing, look, inflated)
        };
        if !near_end && heading.abs() > cfg.realign.max(small / 2.0) {
            return Action::Rotate(small.copysign(heading));
        }
        let m = cfg
            .actions
            .moves
            .iter()
            .copied()
            .filter(|&m| m <= want + 1e-12 && m <= free)
            .last()
            .unwrap_or(step);
        Action::Forward(m)
    }

    /// Travels to the network cell farthest, in hops, from the robot.
    fn go_farthest(&mut self) -> Result<bool, WorldError> {
        let Some(from) = self.robot_cell() else {
            return Ok(false);
        };
        let hops = self.network.hop_distances(from);
        let Some((&far, _)) = hops.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))) else {
            return Ok(false);
        };
        if far == from {
            return Ok(false);
        }
        let path = match bfs_cell_path(&self.network, from, far) {
            Ok(p) => p,
            Err(_) => return Ok(false),
        };
        let waypoints = cells_to_waypoints(&path, &self.decision_points());
        let target = *waypoints.last().unwrap_or(&far.center(CELL_SIZE));
        self.follow(waypoints, target)?;
        Ok(true)
    }

    pub fn run(mut self) -> Result<ExplorationResult, ExploreError> {
        self.full_rotation()?;
        if self.candidates.is_empty() {
            return Err(ExploreError::NoInitialStretch);
        }
        let mut fallbacks = 0usize;
        let mut next_passage = 0u32;
        while !self.out_of_time() {
            let Some(c) = self.candidates.next_candidate(&self.grid) else {
                if fallbacks >= self.cfg.fallback_moves {
                    break;
                }
                fallbacks += 1;
                if self.go_farthest()? {
                    self.full_rotation()?;
                }
                continue;
            };
            match self.goto_candidate_start(&c) {
                Ok(_) => {}
                Err(GotoError::Unreachable) => {
                    self.candidates.set_state(c.id, CandidateState::Rejected);
                    continue;
                }
                Err(GotoError::World(e)) => return Err(e.into()),
            }
            if self.out_of_time() {
                break;
            }
            let t = self.traverse_passage(&c, next_passage)?;
            next_passage += 1;
            self.candidates.set_state(c.id, CandidateState::Explored);
            self.traversals.push(t);
        }
        Ok(ExplorationResult {
            grid: self.grid,
            network: self.network,
            skeleton: self.skeleton,
            candidates: self.candidates,
            decisions: self.decisions,
            traversals: self.traversals,
            elapsed: self.elapsed,
            distance: self.distance,
            final_pose: self.pose,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GotoError {
    Unreachable,
    World(WorldError),
}

impl From<WorldError> for GotoError {
    fn from(e: WorldError) -> Self {
        GotoError::World(e)
    }
}

/// Relative heading to drive along: the one nearest `bearing` with room for
/// `want` metres at `inflated` radius, else the one with the most room.
fn steer(view: &View, bearing: f64, want: f64, inflated: f64) -> f64 {
    let mut best = (f64::INFINITY, 0.0);
    let mut consider = |rel: f64| {
        let off = angle_diff(rel, bearing).abs();
        if off > core::f64::consts::FRAC_PI_2 {
            return;
        }
        let room = view.free_travel(rel, inflated);
        let cost = if room >= want {
            off
        } else {
            core::f64::consts::PI + want - room
        };
        if cost < best.0 - 1e-12 {
            best = (cost, rel);
        }
    };
    consider(0.0);
    for i in (0..view.len()).step_by(STEER_STRIDE) {
        consider(view.relative_angle(i));
    }
    best.1
}

const STEER_STRIDE: usize = 5;

/// Explores `world` from `start` until the candidate list is exhausted or
/// the simulated budget runs out.
pub fn explore(
    world: &World,
    start: Pose,
    cfg: ExploreConfig,
) -> Result<ExplorationResult, ExploreError> {
    Explorer::new(world, start, cfg).run()
}

/// Start pose for a seeded run: `base` shifted by up to `jitter` meters and
/// given a uniformly random heading. The shifted point keeps `clearance`.
pub fn seeded_start(world: &World, base: Pose, seed: u64, jitter: f64, clearance: f64) -> Pose {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let theta = rng.gen_range(-core::f64::consts::PI..core::f64::consts::PI);
    for _ in 0..64 {
        let r = jitter * num_traits::Float::sqrt(rng.gen::<f64>());
        let a = rng.gen_range(-core::f64::consts::PI..core::f64::consts::PI);
        let p = base.position() + Point::from_angle(a) * r;
        if world.is_free(p, clearance) {
            return Pose::new(p.x, p.y, theta);
        }
    }
    Pose::new(base.x, base.y, theta)
}
