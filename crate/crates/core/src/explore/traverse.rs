use alloc::collections::VecDeque;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{angle_diff, weighted_circular_mean};
use crate::perception::{FeatureVector, Stretch};
use crate::world::View;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TerminationReason {
    EndReached,
    HardTurn,
    RoomDetected,
    /// Decision cap per candidate reached.
    BudgetExhausted,
    /// The exploration clock ran out mid-traversal.
    TimeExpired,
    Stuck,
}

impl TerminationReason {
    pub fn name(self) -> &'static str {
        match self {
            TerminationReason::EndReached => "end_reached",
            TerminationReason::HardTurn => "hard_turn",
            TerminationReason::RoomDetected => "room_detected",
            TerminationReason::BudgetExhausted => "budget_exhausted",
            TerminationReason::TimeExpired => "time_expired",
            TerminationReason::Stuck => "stuck",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TerminationConfig {
    pub end_tolerance: f64,
    /// Gap ahead of the body at or below this ends the passage.
    pub front_stop: f64,
    pub hard_turn: f64,
    pub room_factor: f64,
    pub radius: f64,
    /// Half-width of the abeam beams used by [`view_width`].
    pub width_beam: f64,
    /// Width samples needed before the room test applies.
    pub min_width_samples: usize,
    /// Passage length needed before the hard-turn test applies.
    pub turn_gate: f64,
}

impl Default for TerminationConfig {
    fn default() -> Self {
        Self {
            end_tolerance: 0.5,
            front_stop: 0.1,
            hard_turn: FRAC_PI_4,
            room_factor: 1.5,
            radius: 0.4,
            width_beam: 20f64.to_radians(),
            min_width_samples: 3,
            turn_gate: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraversalState {
    pub passage_id: u32,
    /// Heading and distance moved at the most recent decision points, oldest first.
    pub orientation_window: VecDeque<(f64, f64)>,
    pub window_size: usize,
    pub passage_length: f64,
    /// Maximum lateral width seen by each counted view.
    pub width_history: alloc::vec::Vec<f64>,
    pub decisions: usize,
}

impl TraversalState {
    pub fn new(passage_id: u32, window_size: usize) -> Self {
        Self {
            passage_id,
            orientation_window: VecDeque::new(),
            window_size,
            passage_length: 0.0,
            width_history: alloc::vec::Vec::new(),
            decisions: 0,
        }
    }

    pub fn push_heading(&mut self, theta: f64, moved: f64) {
        if self.orientation_window.len() == self.window_size {
            self.orientation_window.pop_front();
        }
        self.orientation_window.push_back((theta, moved));
    }

    /// Travel direction over the window; turning in place carries no weight.
    pub fn mean_orientation(&self) -> Option<f64> {
        weighted_circular_mean(self.orientation_window.iter().copied())
    }

    pub fn mean_width(&self) -> Option<f64> {
        if self.width_history.is_empty() {
            None
        } else {
            Some(self.width_history.iter().sum::<f64>() / self.width_history.len() as f64)
        }
    }
}

/// Lateral chord through the robot: on each side, the smallest
/// perpendicular extent of the rays within `beam` of abeam, so an opening
/// narrower than the beam does not count.
pub fn view_width(view: &View, beam: f64) -> f64 {
    let (mut left, mut right) = (f64::INFINITY, f64::INFINITY);
    for (i, &r) in view.ranges.iter().enumerate() {
        let rel = view.relative_angle(i);
        let off = (rel.abs() - FRAC_PI_2).abs();
        if off <= beam + 1e-12 {
            let lateral = r * rel.sin().abs();
            if rel > 0.0 {
                left = left.min(lateral);
            } else {
                right = right.min(lateral);
            }
        }
    }
    if left.is_finite() && right.is_finite() {
        left + right
    } else {
        0.0
    }
}

/// Room left in front of the body along the ray nearest straight ahead.
pub fn front_gap(view: &View, radius: f64) -> f64 {
    view.ray_index(0.0).map_or(0.0, |i| view.ranges[i] - radius)
}

/// The three stopping conditions, checked in order.
pub fn should_terminate(
    state: &TraversalState,
    view: &View,
    features: &FeatureVector,
    stretch: &Stretch,
    cfg: &TerminationConfig,
) -> Option<TerminationReason> {
    let here = view.pose.position();
    if here.distance(stretch.end()) <= cfg.end_tolerance
        || front_gap(view, cfg.radius) <= cfg.front_stop
    {
        return Some(TerminationReason::EndReached);
    }
    if let Some(mean) = state
        .mean_orientation()
        .filter(|_| state.passage_length >= cfg.turn_gate)
    {
        if angle_diff(view.pose.theta, mean).abs() > cfg.hard_turn {
            return Some(TerminationReason::HardTurn);
        }
    }
    if let Some(w) = state
        .mean_width()
        .filter(|_| state.width_history.len() >= cfg.min_width_samples)
    {
        if state.passage_length + features.front_max < cfg.room_factor * w {
            return Some(TerminationReason::RoomDetected);
        }
    }
    None
}
