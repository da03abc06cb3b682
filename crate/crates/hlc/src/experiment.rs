//! The paired SemaFORR / SemaFORR-A experiment.
//!
//! For every target list and repetition both systems start from the same
//! seeded pose and visit the same targets in order. SemaFORR explores
//! first; SemaFORR-A starts with an empty model and learns only while
//! travelling.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use anyhow::{anyhow, Context};
use hlc_core::controller::{run_task, ControllerConfig};
use hlc_core::explore::{explore, seeded_start, ExploreConfig, PassageGrid};
use hlc_core::metrics::{coverage_of, free_cells, generate_targets};
use hlc_core::perception::RoomPassageClassifier;
use hlc_core::skeleton::{Skeleton, SkeletonConfig};
use hlc_core::{ActionSet, Pose, World};
use rayon::prelude::*;

use crate::clock::WallClock;
use crate::formats::{parse_key_values, parse_world, FormatError};
use crate::worlds;

/// Start poses are drawn this far around the world's start.
pub const START_JITTER: f64 = 0.5;
/// Clearance kept by a jittered start.
pub const START_CLEARANCE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Benchmark name or world file path.
    pub world: String,
    pub seed: u64,
    pub num_tasks: usize,
    pub reps: usize,
    pub task_lists: usize,
    /// Exploration budget, simulated seconds.
    pub budget: f64,
    pub decision_cap: usize,
    pub action_cap: usize,
    pub d: f64,
    pub veer_clearance: f64,
    pub moves: Vec<f64>,
    pub rotations: Vec<f64>,
    /// Run SemaFORR-A only.
    pub ablate: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let actions = ActionSet::default();
        Self {
            world: "office-block".into(),
            seed: 1,
            num_tasks: 40,
            reps: 5,
            task_lists: 5,
            budget: 1200.0,
            decision_cap: 750,
            action_cap: 750,
            d: 7.0,
            veer_clearance: 0.15,
            moves: actions.moves,
            rotations: actions.rotations,
            ablate: false,
        }
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, FormatError> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| FormatError::Invalid(format!("{key}: bad number `{s}`")))
        })
        .collect()
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, FormatError> {
    value
        .parse()
        .map_err(|_| FormatError::Invalid(format!("{key}: bad value `{value}`")))
}

impl ExperimentConfig {
    /// Reads a `key = value` config. Missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut cfg = Self::default();
        for (key, value) in parse_key_values(text)? {
            let v = value.as_str();
            match key.as_str() {
                "world" => cfg.world = value.clone(),
                "seed" => cfg.seed = parse_value(&key, v)?,
                "num_tasks" => cfg.num_tasks = parse_value(&key, v)?,
                "reps" => cfg.reps = parse_value(&key, v)?,
                "task_lists" => cfg.task_lists = parse_value(&key, v)?,
                "budget" => cfg.budget = parse_value(&key, v)?,
                "decision_cap" => cfg.decision_cap = parse_value(&key, v)?,
                "action_cap" => cfg.action_cap = parse_value(&key, v)?,
                "d" => cfg.d = parse_value(&key, v)?,
                "veer_clearance" => cfg.veer_clearance = parse_value(&key, v)?,
                "moves" => cfg.moves = parse_list(&key, v)?,
                "rotations" => cfg.rotations = parse_list(&key, v)?,
                "ablate" => cfg.ablate = parse_value(&key, v)?,
                _ => return Err(FormatError::Invalid(format!("unknown key `{key}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), FormatError> {
        let counts = [
            ("num_tasks", self.num_tasks),
            ("reps", self.reps),
            ("task_lists", self.task_lists),
            ("decision_cap", self.decision_cap),
            ("action_cap", self.action_cap),
        ];
        if let Some((k, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(FormatError::Invalid(format!("{k} must be at least 1")));
        }
        let reals = [
            ("budget", self.budget),
            ("d", self.d),
            ("veer_clearance", self.veer_clearance),
        ];
        if let Some((k, _)) = reals.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(FormatError::Invalid(format!("{k} must be positive")));
        }
        for (k, list) in [("moves", &self.moves), ("rotations", &self.rotations)] {
            if list.is_empty() || list.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(FormatError::Invalid(format!(
                    "{k} must be a list of positive numbers"
                )));
            }
        }
        Ok(())
    }

    pub fn actions(&self) -> ActionSet {
        ActionSet::new(self.moves.clone(), self.rotations.clone())
    }

    pub fn explore_config(&self) -> ExploreConfig {
        ExploreConfig {
            d: self.d,
            actions: self.actions(),
            classifier: RoomPassageClassifier::default_for(self.d),
            veer_clearance: self.veer_clearance,
            decision_cap: self.decision_cap,
            budget: self.budget,
            ..ExploreConfig::default()
        }
    }

    pub fn controller_config(&self) -> ControllerConfig {
        ControllerConfig {
            actions: self.actions(),
            action_cap: self.action_cap,
            ..ControllerConfig::default()
        }
    }

    /// Seed of target list `list`.
    pub fn list_seed(&self, list: usize) -> u64 {
        mix(self.seed, list as u64)
    }

    /// Seed of the start pose shared by both systems of one paired run.
    pub fn start_seed(&self, list: usize, rep: usize) -> u64 {
        mix(self.seed, (1 << 32) + (list * self.reps + rep) as u64)
    }
}

fn mix(seed: u64, k: u64) -> u64 {
    let mut z = seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(k)
        .wrapping_add(0x632b_e59b_d9b4_e019);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Benchmark by name, otherwise a world file relative to `base`.
pub fn load_world(spec: &str, base: &Path) -> anyhow::Result<World> {
    if let Some(b) = worlds::by_name(spec) {
        return Ok(b.world);
    }
    let path = base.join(spec);
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    parse_world(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn start_pose(world: &World) -> anyhow::Result<Pose> {
    world
        .start()
        .ok_or_else(|| anyhow!("world `{}` has no start pose", world.name()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum System {
    SemaForr,
    SemaForrA,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::SemaForr => "semaforr",
            System::SemaForrA => "semaforr-a",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Totals from one completed run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunMetrics {
    pub targets: usize,
    pub reached: usize,
    pub task_time: f64,
    pub task_distance: f64,
    pub explore_time: f64,
    pub explore_distance: f64,
    pub initial_coverage: f64,
    pub final_coverage: f64,
    pub plan_rule_decisions: usize,
    pub heuristic_decisions: usize,
    pub plans_made: usize,
    /// Wall-clock seconds spent planning.
    pub planning_time: f64,
    pub regions: usize,
    pub edges: usize,
}

impl RunMetrics {
    pub fn success_rate(&self) -> f64 {
        ratio(self.reached as f64, self.targets as f64)
    }

    pub fn heuristic_fraction(&self) -> f64 {
        ratio(
            self.heuristic_decisions as f64,
            (self.heuristic_decisions + self.plan_rule_decisions) as f64,
        )
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub system: System,
    pub list: usize,
    pub rep: usize,
    pub start: Pose,
    pub result: Result<RunMetrics, String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricsReport {
    pub runs: usize,
    pub failed: usize,
    pub success_rate: f64,
    pub travel_time_tasks: f64,
    pub travel_time_total: f64,
    pub distance_tasks: f64,
    pub distance_total: f64,
    pub initial_coverage: f64,
    pub final_coverage: f64,
    pub heuristic_decision_fraction: f64,
    /// Wall-clock seconds per plan.
    pub mean_planning_time: f64,
    /// Mean (regions, edges).
    pub skeleton_size: (f64, f64),
}

impl MetricsReport {
    /// Averages over completed runs; failed runs are only counted.
    pub fn from_runs<'a>(records: impl IntoIterator<Item = &'a RunRecord>) -> Self {
        let mut done = Vec::new();
        let mut failed = 0;
        for r in records {
            match &r.result {
                Ok(m) => done.push(m),
                Err(_) => failed += 1,
            }
        }
        let n = done.len() as f64;
        let mean = |f: &dyn Fn(&RunMetrics) -> f64| ratio(done.iter().map(|m| f(m)).sum(), n);
        let plans: usize = done.iter().map(|m| m.plans_made).sum();
        Self {
            runs: done.len(),
            failed,
            success_rate: mean(&|m| m.success_rate()),
            travel_time_tasks: mean(&|m| m.task_time),
            travel_time_total: mean(&|m| m.task_time + m.explore_time),
            distance_tasks: mean(&|m| m.task_distance),
            distance_total: mean(&|m| m.task_distance + m.explore_distance),
            initial_coverage: mean(&|m| m.initial_coverage),
            final_coverage: mean(&|m| m.final_coverage),
            heuristic_decision_fraction: mean(&|m| m.heuristic_fraction()),
            mean_planning_time: ratio(done.iter().map(|m| m.planning_time).sum(), plans as f64),
            skeleton_size: (mean(&|m| m.regions as f64), mean(&|m| m.edges as f64)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutcome {
    /// Ordered by list, rep, then system.
    pub runs: Vec<RunRecord>,
    pub reports: BTreeMap<System, MetricsReport>,
}

impl ExperimentOutcome {
    pub fn report(&self, system: System) -> Option<&MetricsReport> {
        self.reports.get(&system)
    }
}

/// One run of `system`: optional exploration, then every target in turn.
pub fn run_one(
    world: &World,
    cfg: &ExperimentConfig,
    system: System,
    start: Pose,
    targets: &[hlc_core::Point],
) -> anyhow::Result<RunMetrics> {
    let free = free_cells(world, ExploreConfig::default().radius);
    let mut m = RunMetrics {
        targets: targets.len(),
        ..RunMetrics::default()
    };
    let (grid, mut skeleton) = match system {
        System::SemaForr => {
            let ex = explore(world, start, cfg.explore_config())
                .map_err(|e| anyhow!("exploration failed: {e}"))?;
            m.explore_time = ex.elapsed;
            m.explore_distance = ex.distance;
            (ex.grid, ex.skeleton)
        }
        System::SemaForrA => (
            PassageGrid::new(world.bounds()),
            Skeleton::new(SkeletonConfig::default()),
        ),
    };
    m.initial_coverage = coverage_of(&free, &grid, &skeleton);
    // Every task list begins from the shared start pose.
    skeleton.relocate();
    let controller = cfg.controller_config();
    let clock = WallClock::new();
    let mut pose = start;
    for (k, &target) in targets.iter().enumerate() {
        let r = run_task(world, pose, target, &mut skeleton, &controller, &clock)
            .map_err(|e| anyhow!("task {k} failed: {e}"))?;
        m.reached += usize::from(r.reached);
        m.task_time += r.sim_time;
        m.task_distance += r.distance;
        m.plan_rule_decisions += r.plan_rule_decisions;
        m.heuristic_decisions += r.heuristic_decisions;
        m.plans_made += r.plans_made;
        m.planning_time += r.planning_time;
        pose = r.final_pose.unwrap_or(pose);
    }
    m.final_coverage = coverage_of(&free, &grid, &skeleton);
    m.regions = skeleton.region_count();
    m.edges = skeleton.edge_count();
    Ok(m)
}

/// Runs every list and repetition with up to `jobs` threads (0 means one
/// per core). Results do not depend on `jobs`.
pub fn run_experiment(
    world: &World,
    cfg: &ExperimentConfig,
    jobs: usize,
) -> anyhow::Result<ExperimentOutcome> {
    cfg.validate()?;
    let base = start_pose(world)?;
    let clearance = ExploreConfig::default().radius;
    let lists = (0..cfg.task_lists)
        .map(|k| generate_targets(world, cfg.num_tasks, cfg.list_seed(k), clearance))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| anyhow!("{e}"))?;
    let systems: &[System] = if cfg.ablate {
        &[System::SemaForrA]
    } else {
        &[System::SemaForr, System::SemaForrA]
    };
    let mut specs = Vec::new();
    for list in 0..cfg.task_lists {
        for rep in 0..cfg.reps {
            let start = seeded_start(
                world,
                base,
                cfg.start_seed(list, rep),
                START_JITTER,
                START_CLEARANCE,
            );
            specs.extend(systems.iter().map(|&s| (s, list, rep, start)));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let runs: Vec<RunRecord> = pool.install(|| {
        specs
            .par_iter()
            .map(|&(system, list, rep, start)| RunRecord {
                system,
                list,
                rep,
                start,
                result: run_one(world, cfg, system, start, &lists[list])
                    .map_err(|e| format!("{e:#}")),
            })
            .collect()
    });
    let reports = systems
        .iter()
        .map(|&s| {
            (
                s,
                MetricsReport::from_runs(runs.iter().filter(|r| r.system == s)),
            )
        })
        .collect();
    Ok(ExperimentOutcome { runs, reports })
}

pub const REPORT_HEADER: &str = "system,list,rep,status,targets,reached,success_rate,task_time,total_time,task_distance,total_distance,initial_coverage,final_coverage,heuristic_fraction,regions,edges";

/// Per-run CSV rows followed by a summary block. Wall-clock timings are
/// left out so the text depends only on the config.
pub fn write_report(outcome: &ExperimentOutcome) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in &outcome.runs {
        let _ = write!(out, "{},{},{},", r.system, r.list, r.rep);
        match &r.result {
            Ok(m) => {
                let _ = writeln!(
                    out,
                    "ok,{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}",
                    m.targets,
                    m.reached,
                    m.success_rate(),
                    m.task_time,
                    m.task_time + m.explore_time,
                    m.task_distance,
                    m.task_distance + m.explore_distance,
                    m.initial_coverage,
                    m.final_coverage,
                    m.heuristic_fraction(),
                    m.regions,
                    m.edges
                );
            }
            Err(_) => out.push_str("failed,,,,,,,,,,,,\n"),
        }
    }
    for (system, rep) in &outcome.reports {
        let _ = writeln!(
            out,
            "\nsummary {system}: {} runs, {} failed",
            rep.runs, rep.failed
        );
        let rows = [
            ("success rate", rep.success_rate),
            ("travel time, tasks (s)", rep.travel_time_tasks),
            ("travel time, total (s)", rep.travel_time_total),
            ("distance, tasks (m)", rep.distance_tasks),
            ("distance, total (m)", rep.distance_total),
            ("initial coverage", rep.initial_coverage),
            ("final coverage", rep.final_coverage),
            ("heuristic decisions", rep.heuristic_decision_fraction),
            ("skeleton regions", rep.skeleton_size.0),
            ("skeleton edges", rep.skeleton_size.1),
        ];
        for (k, v) in rows {
            let _ = writeln!(out, "  {k:<24} {v:.6}");
        }
    }
    for r in &outcome.runs {
        if let Err(e) = &r.result {
            let _ = writeln!(
                out,
                "\nfailed {} list {} rep {}: {e}",
                r.system, r.list, r.rep
            );
        }
    }
    out
}

/// Planning wall time per run and per system.
pub fn write_timing(outcome: &ExperimentOutcome) -> String {
    let mut out = String::from("system,list,rep,plans,planning_seconds\n");
    for r in &outcome.runs {
        if let Ok(m) = &r.result {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6}",
                r.system, r.list, r.rep, m.plans_made, m.planning_time
            );
        }
    }
    for (system, rep) in &outcome.reports {
        let _ = writeln!(
            out,
            "# {system} mean seconds per plan {:.9}",
            rep.mean_planning_time
        );
    }
    out
}

/// Reads a config file and resolves its world relative to the file.
pub fn load_config(path: &Path) -> anyhow::Result<(ExperimentConfig, World)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg =
        ExperimentConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    let world = load_world(&cfg.world, path.parent().unwrap_or(Path::new(".")))?;
    Ok((cfg, world))
}
