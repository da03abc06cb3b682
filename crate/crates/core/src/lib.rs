//! Core algorithms for deliberate high-level-connectivity exploration and
//! skeleton-based navigation in 2D indoor worlds.
//!
//! Everything in this crate is pure computation over owned data and builds
//! without `std`. File formats, the experiment runner, wall-clock timing and
//! the command line live in the companion `hlc` crate.
//!
//! Module map:
//!
//! * [`geometry`] - points, segments, angles and grid traversal.
//! * [`world`] - vector worlds, the range sensor and robot kinematics.
//! * [`perception`] - view features, stretch detection, room/passage classifier.
//! * [`explore`] - the exploration loop: candidates, passage grid and network.
//! * [`skeleton`] - the region graph built from decision points.
//! * [`planner`] - A* over the skeleton and waypoint expansion.
//! * [`controller`] - plan execution with heuristic voting, whole tasks.
//! * [`metrics`] - coverage and target sampling.
//! * [`grid_planner`] - fine-grid A* used as a planning-cost baseline.

#![no_std]

extern crate alloc;

pub mod controller;
pub mod explore;
pub mod geometry;
pub mod grid_planner;
pub mod metrics;
pub mod perception;
pub mod planner;
pub mod skeleton;
pub mod world;

pub use geometry::{Cell, Point, Segment};
pub use world::{Action, ActionSet, Bounds, Pose, SensorConfig, StepOutcome, View, World};

/// Source of elapsed seconds, used to time planning without depending on `std`.
pub trait Stopwatch {
    fn now(&self) -> f64;
}

/// A stopwatch that never advances.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Stopwatch for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}
