//! Plan execution: the two plan rules, heuristic voting, and whole tasks.

use alloc::vec::Vec;
use core::fmt;
use core::ops::ControlFlow;

use crate::geometry::{angle_diff, Point};
use crate::perception::{compute_features, SectorConfig};
use crate::planner::{make_plan, Plan, WaypointStatus};
use crate::skeleton::Skeleton;
use crate::world::{Action, ActionSet, Pose, SensorConfig, StepOutcome, View, World, WorldError};
use crate::Stopwatch;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdvisorWeights {
    pub greedy: f64,
    /// Weight on the remaining bearing to the goal inside Greedy.
    pub bearing: f64,
    pub dead_end: f64,
    pub oscillation: f64,
}

impl Default for AdvisorWeights {
    fn default() -> Self {
        Self {
            greedy: 1.0,
            bearing: 0.5,
            dead_end: 1.0,
            oscillation: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ControllerConfig {
    pub radius: f64,
    pub actions: ActionSet,
    pub sensor: SensorConfig,
    pub sectors: SectorConfig,
    pub success_radius: f64,
    pub action_cap: usize,
    pub waypoint_reach: f64,
    /// A later waypoint this close can displace an occluded one.
    pub skip_lookahead: f64,
    pub align_tolerance: f64,
    pub min_plan_move: f64,
    /// How far past a waypoint a plan move may carry the robot.
    pub overshoot: f64,
    pub dead_end_front: f64,
    /// Minimum actions between two plans for the same target.
    pub replan_interval: usize,
    pub linear_speed: f64,
    pub angular_speed: f64,
    pub weights: AdvisorWeights,
    /// Build and follow skeleton plans.
    pub planning: bool,
    /// Treat every rotation as vetoed.
    pub veto_rotations: bool,
    /// Decisions without translation before the escape move takes over.
    pub stall_limit: usize,
    /// Metres of free travel traded per radian away from the goal when escaping.
    pub escape_bias: f64,
    /// Escaping drives straight on once the heading allows a move this long.
    pub escape_move: f64,
    /// Escape directions stay this far inside the edge of the sensor arc.
    pub escape_margin: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            radius: 0.4,
            actions: ActionSet::default(),
            sensor: SensorConfig::default(),
            sectors: SectorConfig::default(),
            success_radius: 0.5,
            action_cap: 750,
            waypoint_reach: 0.5,
            skip_lookahead: 3.0,
            align_tolerance: 10f64.to_radians(),
            min_plan_move: 0.1,
            overshoot: 0.25,
            dead_end_front: 2.0,
            replan_interval: 25,
            linear_speed: 1.0,
            angular_speed: 1.0,
            weights: AdvisorWeights::default(),
            planning: true,
            veto_rotations: false,
            stall_limit: 8,
            escape_bias: 0.5,
            escape_move: 0.4,
            escape_margin: 30f64.to_radians(),
        }
    }
}

impl ControllerConfig {
    pub fn duration(&self, action: Action, outcome: &StepOutcome) -> f64 {
        match action {
            Action::Forward(_) => outcome.distance_traveled / self.linear_speed,
            Action::Rotate(a) => a.abs() / self.angular_speed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DecisionSource {
    PlanRule,
    Heuristic,
}

impl DecisionSource {
    pub fn name(self) -> &'static str {
        match self {
            DecisionSource::PlanRule => "plan",
            DecisionSource::Heuristic => "heuristic",
        }
    }
}

impl fmt::Display for DecisionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub struct DecisionContext<'a> {
    pub pose: Pose,
    pub view: &'a View,
    pub plan: &'a mut Plan,
    pub target: Point,
    pub skeleton: &'a Skeleton,
    pub actions_used: usize,
    /// Signed angle of the previous action if it was a rotation.
    pub last_rotation: Option<f64>,
    /// Consecutive decisions that did not move the robot.
    pub stalled: usize,
}

fn waypoint_visible(view: &View, pose: Pose, w: Point) -> bool {
    let dist = pose.position().distance(w);
    let bearing = pose.bearing_to(w);
    match view.ray_index(bearing) {
        Some(i) => view.ranges[i] >= dist,
        None => false,
    }
}

/// Index of the waypoint to pursue, updating statuses along the way.
pub fn active_waypoint(ctx: &mut DecisionContext<'_>, cfg: &ControllerConfig) -> Option<usize> {
    let here = ctx.pose.position();
    for k in 0..ctx.plan.waypoints.len() {
        if ctx.plan.status[k] == WaypointStatus::Pending
            && here.distance(ctx.plan.waypoints[k]) <= cfg.waypoint_reach
        {
            ctx.plan.resolve(k, WaypointStatus::Visited);
        }
    }
    let first =
        (0..ctx.plan.waypoints.len()).find(|&k| ctx.plan.status[k] == WaypointStatus::Pending)?;
    if waypoint_visible(ctx.view, ctx.pose, ctx.plan.waypoints[first]) {
        return Some(first);
    }
    let later = (first + 1..ctx.plan.waypoints.len()).find(|&k| {
        let w = ctx.plan.waypoints[k];
        ctx.plan.status[k] == WaypointStatus::Pending
            && here.distance(w) <= cfg.skip_lookahead
            && waypoint_visible(ctx.view, ctx.pose, w)
    })?;
    for k in first..later {
        ctx.plan.resolve(k, WaypointStatus::Skipped);
    }
    Some(later)
}

/// First pending waypoint, visible or not.
fn pending_waypoint(plan: &Plan) -> Option<Point> {
    plan.status
        .iter()
        .position(|s| *s == WaypointStatus::Pending)
        .map(|k| plan.waypoints[k])
}

fn vetoed(action: Action, free_ahead: f64, cfg: &ControllerConfig) -> bool {
    match action {
        Action::Forward(m) => m > free_ahead,
        Action::Rotate(_) => cfg.veto_rotations,
    }
}

/// Weighted vote of the advisors over every action toward `goal`.
pub fn heuristic_vote(ctx: &DecisionContext<'_>, goal: Point, cfg: &ControllerConfig) -> Action {
    let w = cfg.weights;
    let free_ahead = ctx.view.free_travel(0.0, cfg.radius);
    let front_max = compute_features(ctx.view, &cfg.sectors).front_max;
    let goal_dist = ctx.pose.position().distance(goal);
    let in_dead_end = front_max < cfg.dead_end_front && goal_dist > front_max;
    let mut best: Option<(f64, Action)> = None;
    for action in cfg.actions.all() {
        if vetoed(action, free_ahead, cfg) {
            continue;
        }
        let after = match action {
            Action::Forward(m) => {
                let p = ctx.pose.position() + ctx.pose.heading() * m;
                Pose::new(p.x, p.y, ctx.pose.theta)
            }
            Action::Rotate(a) => Pose::new(ctx.pose.x, ctx.pose.y, ctx.pose.theta + a),
        };
        let mut score = -w.greedy
            * (after.position().distance(goal) + w.bearing * after.bearing_to(goal).abs());
        match action {
            Action::Forward(m) if in_dead_end => score -= w.dead_end * m,
            Action::Rotate(a) => {
                if ctx.last_rotation.map_or(false, |prev| prev * a < 0.0) {
                    score -= w.oscillation;
                }
            }
            _ => {}
        }
        if best.map_or(true, |(b, _)| score > b) {
            best = Some((score, action));
        }
    }
    best.map_or(Action::Rotate(cfg.actions.smallest_rotation()), |(_, a)| a)
}

const STALL_EPS: f64 = 1e-6;

/// Largest forward move no longer than `limit` that fits in `free`.
pub(crate) fn largest_fitting(actions: &ActionSet, limit: f64, free: f64) -> Option<f64> {
    actions
        .moves
        .iter()
        .copied()
        .filter(|&m| m <= limit + 1e-12 && m <= free)
        .last()
}

/// Turns toward, then drives along, the most open direction, preferring
/// directions facing `goal`.
pub fn escape(ctx: &DecisionContext<'_>, goal: Point, cfg: &ControllerConfig) -> Action {
    let bearing = ctx.pose.bearing_to(goal);
    let horizon = cfg.actions.moves.last().copied().unwrap_or(1.0);
    let free = ctx.view.free_travel(0.0, cfg.radius);
    // The view can miss a wall grazing the body; a forward that just failed is not retried.
    let blocked = ctx.last_rotation.is_none() && ctx.stalled > 0;
    if !blocked {
        if let Some(m) =
            largest_fitting(&cfg.actions, horizon, free).filter(|&m| m >= cfg.escape_move)
        {
            return Action::Forward(m);
        }
    }
    let mut best = (f64::NEG_INFINITY, 0.0);
    let reach = ctx.view.sensor.fov / 2.0 - cfg.escape_margin;
    let min_turn = if blocked {
        cfg.actions.smallest_rotation() - 1e-9
    } else {
        0.0
    };
    for i in 0..ctx.view.len() {
        let rel = ctx.view.relative_angle(i);
        if rel.abs() > reach || rel.abs() < min_turn {
            continue;
        }
        let room = ctx.view.free_travel(rel, cfg.radius).min(horizon);
        let score = room - cfg.escape_bias * angle_diff(rel, bearing).abs();
        if score > best.0 {
            best = (score, rel);
        }
    }
    if best.1.abs() > cfg.align_tolerance && !cfg.veto_rotations {
        return Action::Rotate(cfg.actions.rotation_toward(best.1));
    }
    Action::Forward(
        largest_fitting(&cfg.actions, horizon, free).unwrap_or(cfg.actions.smallest_move()),
    )
}

pub fn decide(ctx: &mut DecisionContext<'_>, cfg: &ControllerConfig) -> (Action, DecisionSource) {
    if ctx.stalled >= cfg.stall_limit {
        let goal = pending_waypoint(ctx.plan).unwrap_or(ctx.target);
        return (escape(ctx, goal, cfg), DecisionSource::Heuristic);
    }
    if let Some(k) = active_waypoint(ctx, cfg) {
        let w = ctx.plan.waypoints[k];
        let dist = ctx.pose.position().distance(w);
        let bearing = ctx.pose.bearing_to(w);
        if bearing.abs() <= cfg.align_tolerance {
            let free = ctx.view.free_travel(0.0, cfg.radius);
            if let Some(m) = largest_fitting(&cfg.actions, dist + cfg.overshoot, free)
                .filter(|&m| m >= cfg.min_plan_move)
            {
                return (Action::Forward(m), DecisionSource::PlanRule);
            }
        } else if !cfg.veto_rotations
            && ctx.view.free_travel(bearing, cfg.radius) >= cfg.min_plan_move
        {
            let rot = cfg.actions.rotation_toward(bearing);
            return (Action::Rotate(rot), DecisionSource::PlanRule);
        }
    }
    let goal = pending_waypoint(ctx.plan).unwrap_or(ctx.target);
    (heuristic_vote(ctx, goal, cfg), DecisionSource::Heuristic)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TaskResult {
    pub reached: bool,
    pub actions: usize,
    pub sim_time: f64,
    pub distance: f64,
    pub plan_rule_decisions: usize,
    pub heuristic_decisions: usize,
    pub plans_made: usize,
    /// Stopwatch seconds spent planning.
    pub planning_time: f64,
    pub final_pose: Option<Pose>,
}

impl TaskResult {
    pub fn heuristic_fraction(&self) -> f64 {
        let total = self.plan_rule_decisions + self.heuristic_decisions;
        if total == 0 {
            0.0
        } else {
            self.heuristic_decisions as f64 / total as f64
        }
    }
}

/// One controller decision, as reported to step observers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaskStep {
    pub index: usize,
    pub pose: Pose,
    pub action: Action,
    pub source: DecisionSource,
    pub goal: Point,
    pub outcome: StepOutcome,
    pub duration: f64,
}

impl TaskStep {
    /// `step <n> <x> <y> <theta> <source> <action> <goal_x> <goal_y>`
    pub fn trace_line(&self) -> alloc::string::String {
        alloc::format!(
            "step {} {:.6} {:.6} {:.6} {} {} {:.6} {:.6}",
            self.index,
            self.pose.x,
            self.pose.y,
            self.pose.theta,
            self.source,
            self.action,
            self.goal.x,
            self.goal.y
        )
    }
}

/// Drives the robot from `start` toward `target`, learning into `skeleton`
/// at every decision.
pub fn run_task(
    world: &World,
    start: Pose,
    target: Point,
    skeleton: &mut Skeleton,
    cfg: &ControllerConfig,
    clock: &dyn Stopwatch,
) -> Result<TaskResult, WorldError> {
    run_task_observed(
        world,
        start,
        target,
        None,
        skeleton,
        cfg,
        clock,
        &mut |_| ControlFlow::Continue(()),
    )
}

/// Like [`run_task`], optionally starting from a given plan, reporting every
/// step to `observe`, which may stop the task early.
#[allow(clippy::too_many_arguments)]
pub fn run_task_observed(
    world: &World,
    start: Pose,
    target: Point,
    initial_plan: Option<Plan>,
    skeleton: &mut Skeleton,
    cfg: &ControllerConfig,
    clock: &dyn Stopwatch,
    observe: &mut dyn FnMut(&TaskStep) -> ControlFlow<()>,
) -> Result<TaskResult, WorldError> {
    let mut result = TaskResult::default();
    let mut pose = start;
    skeleton.watch(target);
    let mut plan_at = 0usize;
    let mut plan = match initial_plan {
        Some(p) => p,
        None if cfg.planning => timed_plan(skeleton, pose.position(), target, clock, &mut result),
        None => Plan::empty(target),
    };
    let mut last_rotation = None;
    let mut stalled = 0usize;
    while result.actions < cfg.action_cap {
        if pose.position().distance(target) <= cfg.success_radius {
            result.reached = true;
            break;
        }
        let view = world.scan(pose, &cfg.sensor)?;
        skeleton.observe_decision(pose, &view, None);
        if cfg.planning && plan.is_exhausted() && result.actions >= plan_at + cfg.replan_interval {
            plan = timed_plan(skeleton, pose.position(), target, clock, &mut result);
            plan_at = result.actions;
        }
        let mut ctx = DecisionContext {
            pose,
            view: &view,
            plan: &mut plan,
            target,
            skeleton,
            actions_used: result.actions,
            last_rotation,
            stalled,
        };
        let (action, source) = decide(&mut ctx, cfg);
        let goal = pending_waypoint(&plan).unwrap_or(target);
        let outcome = world.apply_action(pose, action, cfg.radius);
        let duration = cfg.duration(action, &outcome);
        match source {
            DecisionSource::PlanRule => result.plan_rule_decisions += 1,
            DecisionSource::Heuristic => result.heuristic_decisions += 1,
        }
        stalled = if outcome.distance_traveled > STALL_EPS {
            0
        } else {
            stalled + 1
        };
        last_rotation = match action {
            Action::Rotate(a) => Some(a),
            Action::Forward(_) => None,
        };
        let step = TaskStep {
            index: result.actions,
            pose,
            action,
            source,
            goal,
            outcome,
            duration,
        };
        result.actions += 1;
        result.sim_time += duration;
        result.distance += outcome.distance_traveled;
        pose = outcome.new_pose;
        if observe(&step).is_break() {
            break;
        }
    }
    if !result.reached && pose.position().distance(target) <= cfg.success_radius {
        result.reached = true;
    }
    result.final_pose = Some(pose);
    Ok(result)
}

fn timed_plan(
    skeleton: &Skeleton,
    from: Point,
    target: Point,
    clock: &dyn Stopwatch,
    result: &mut TaskResult,
) -> Plan {
    let t0 = clock.now();
    let plan = make_plan(skeleton, from, target);
    result.planning_time += clock.now() - t0;
    result.plans_made += 1;
    plan
}

/// Rotations needed to turn from `heading` to `goal` using the largest
/// rotations that do not overshoot by more than half the smallest one.
pub fn rotations_toward(actions: &ActionSet, heading: f64, goal: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut h = heading;
    let tol = actions.smallest_rotation() / 2.0;
    for _ in 0..64 {
        let diff = angle_diff(goal, h);
        if diff.abs() <= tol {
            break;
        }
        let r = actions.rotation_toward(diff);
        out.push(r);
        h += r;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Segment;
    use crate::world::Bounds;
    use crate::NoClock;
    use alloc::vec;

    fn open_box(w: f64, h: f64) -> World {
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

    fn ctx_parts(world: &World, pose: Pose) -> (View, Skeleton) {
        (
            world.scan(pose, &SensorConfig::default()).unwrap(),
            Skeleton::default(),
        )
    }

    #[test]
    fn aligned_waypoint_gets_largest_move() {
        let world = open_box(30.0, 30.0);
        let pose = Pose::new(5.0, 15.0, 0.0);
        let (view, skel) = ctx_parts(&world, pose);
        let mut plan = Plan::from_waypoints(vec![Point::new(10.0, 15.0)], Point::new(20.0, 15.0));
        let mut ctx = DecisionContext {
            pose,
            view: &view,
            plan: &mut plan,
            target: Point::new(20.0, 15.0),
            skeleton: &skel,
            actions_used: 0,
            last_rotation: None,
            stalled: 0,
        };
        assert_eq!(
            decide(&mut ctx, &ControllerConfig::default()),
            (Action::Forward(3.2), DecisionSource::PlanRule)
        );
    }

    #[test]
    fn waypoint_abeam_rotates() {
        let world = open_box(30.0, 30.0);
        let pose = Pose::new(5.0, 15.0, 0.0);
        let (view, skel) = ctx_parts(&world, pose);
        let mut plan = Plan::from_waypoints(vec![Point::new(5.0, 20.0)], Point::new(5.0, 25.0));
        let mut ctx = DecisionContext {
            pose,
            view: &view,
            plan: &mut plan,
            target: Point::new(5.0, 25.0),
            skeleton: &skel,
            actions_used: 0,
            last_rotation: None,
            stalled: 0,
        };
        assert_eq!(
            decide(&mut ctx, &ControllerConfig::default()),
            (Action::Rotate(1.57), DecisionSource::PlanRule)
        );
    }

    #[test]
    fn empty_plan_is_heuristic() {
        let world = open_box(30.0, 30.0);
        let pose = Pose::new(5.0, 15.0, 0.0);
        let (view, skel) = ctx_parts(&world, pose);
        let mut plan = Plan::empty(Point::new(20.0, 15.0));
        let mut ctx = DecisionContext {
            pose,
            view: &view,
            plan: &mut plan,
            target: Point::new(20.0, 15.0),
            skeleton: &skel,
            actions_used: 0,
            last_rotation: None,
            stalled: 0,
        };
        assert_eq!(
            decide(&mut ctx, &ControllerConfig::default()),
            (Action::Forward(3.2), DecisionSource::Heuristic)
        );
    }

    #[test]
    fn goal_behind_prefers_rotation() {
        let world = open_box(30.0, 30.0);
        let pose = Pose::new(15.0, 15.0, 0.0);
        let (view, skel) = ctx_parts(&world, pose);
        let mut plan = Plan::empty(Point::new(5.0, 15.0));
        let ctx = DecisionContext {
            pose,
            view: &view,
            plan: &mut plan,
            target: Point::new(5.0, 15.0),
            skeleton: &skel,
            actions_used: 0,
            last_rotation: None,
            stalled: 0,
        };
        assert!(
            heuristic_vote(&ctx, Point::new(5.0, 15.0), &ControllerConfig::default()).is_rotation()
        );
    }

    #[test]
    fn all_vetoed_escapes_with_smallest_rotation() {
        let world = open_box(10.0, 10.0);
        let pose = Pose::new(9.55, 5.0, 0.0);
        let (view, skel) = ctx_parts(&world, pose);
        let mut plan = Plan::empty(Point::new(1.0, 5.0));
        let ctx = DecisionContext {
            pose,
            view: &view,
            plan: &mut plan,
            target: Point::new(1.0, 5.0),
            skeleton: &skel,
            actions_used: 0,
            last_rotation: None,
            stalled: 0,
        };
        let cfg = ControllerConfig {
            veto_rotations: true,
            ..ControllerConfig::default()
        };
        assert_eq!(
            heuristic_vote(&ctx, Point::new(1.0, 5.0), &cfg),
            Action::Rotate(0.25)
        );
    }

    #[test]
    fn occluded_waypoint_is_skipped_for_a_near_visible_one() {
        // The first waypoint sits behind a short wall; the second is in the clear.
        let mut walls: Vec<Segment> = open_box(20.0, 20.0).walls().to_vec();
        walls.push(Segment::new(Point::new(8.0, 9.0), Point::new(8.0, 11.0)));
        let world = World::new(
            "w",
            Bounds {
                width: 20.0,
                height: 20.0,
            },
            walls,
        )
        .unwrap();
        let pose = Pose::new(6.0, 10.0, 0.0);
        let (view, skel) = ctx_parts(&world, pose);
        let mut plan = Plan::from_waypoints(
            vec![Point::new(10.0, 10.0), Point::new(6.0, 12.0)],
            Point::new(15.0, 15.0),
        );
        let mut ctx = DecisionContext {
            pose,
            view: &view,
            plan: &mut plan,
            target: Point::new(15.0, 15.0),
            skeleton: &skel,
            actions_used: 0,
            last_rotation: None,
            stalled: 0,
        };
        assert_eq!(
            active_waypoint(&mut ctx, &ControllerConfig::default()),
            Some(1)
        );
        assert_eq!(
            plan.status,
            vec![WaypointStatus::Skipped, WaypointStatus::Pending]
        );
    }

    #[test]
    fn near_target_is_reached_quickly() {
        let world = open_box(10.0, 10.0);
        let mut skel = Skeleton::default();
        let r = run_task(
            &world,
            Pose::new(5.0, 5.0, 0.0),
            Point::new(6.0, 5.0),
            &mut skel,
            &ControllerConfig::default(),
            &NoClock,
        )
        .unwrap();
        assert!(r.reached);
        assert!(r.actions <= 2);
    }

    #[test]
    fn walled_off_target_fails_at_cap() {
        let mut walls: Vec<Segment> = open_box(20.0, 10.0).walls().to_vec();
        walls.push(Segment::new(Point::new(10.0, 0.0), Point::new(10.0, 10.0)));
        let world = World::new(
            "w",
            Bounds {
                width: 20.0,
                height: 10.0,
            },
            walls,
        )
        .unwrap();
        let mut skel = Skeleton::default();
        let r = run_task(
            &world,
            Pose::new(5.0, 5.0, 0.0),
            Point::new(15.0, 5.0),
            &mut skel,
            &ControllerConfig::default(),
            &NoClock,
        )
        .unwrap();
        assert!(!r.reached);
        assert_eq!(r.actions, 750);
    }

    #[test]
    fn rotation_sequence_converges() {
        let rots = rotations_toward(&ActionSet::default(), 0.0, 3.0);
        let total: f64 = rots.iter().sum();
        assert!((total - 3.0).abs() <= 0.125);
    }
}
