mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::{brute_ray, clearance};
use hlc::experiment::{
    run_experiment, write_report, ExperimentConfig, ExperimentOutcome, System, START_CLEARANCE,
    START_JITTER,
};
use hlc::formats::{write_grid, write_skeleton};
use hlc::worlds::{self, Benchmark};
use hlc_core::explore::{
    bfs_cell_path, explore, seeded_start, should_terminate, similar_stretches, update_occupancy,
    Candidate, CandidateList, CellLabel, ExplorationResult, ExploreConfig, OccupancyConfig,
    PassageGrid, PassageNetwork, RayCounts, TerminationConfig, TerminationReason, TraversalState,
};
use hlc_core::grid_planner::{grid_astar, grid_reference_planner, OccupancyRaster};
use hlc_core::metrics::generate_targets;
use hlc_core::perception::{FeatureVector, Stretch};
use hlc_core::planner::{attach_point, attach_score, make_plan, plan_regions_with_cost, PlanError};
use hlc_core::skeleton::{Skeleton, SkeletonEdge};
use hlc_core::{Action, ActionSet, Cell, Point, Pose, SensorConfig, View, World};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

struct Explored {
    world: &'static str,
    seed: Option<u64>,
    result: ExplorationResult,
}

fn explore_from(bench: &Benchmark, seed: Option<u64>) -> ExplorationResult {
    let w = &bench.world;
    let base = w.start().expect("benchmark start");
    let start = seed.map_or(base, |s| {
        seeded_start(w, base, s, START_JITTER, START_CLEARANCE)
    });
    explore(w, start, ExploreConfig::default()).expect("exploration")
}

fn direction(exp: &ExperimentOutcome) -> Outcome {
    let sf = exp.report(System::SemaForr).unwrap();
    let sa = exp.report(System::SemaForrA).unwrap();
    let gap = sf.success_rate - sa.success_rate;
    let ok = sf.failed == 0
        && sa.failed == 0
        && gap >= 0.10
        && sa.initial_coverage == 0.0
        && sf.initial_coverage >= 0.05;
    let msg = format!(
        "success {:.3} vs {:.3} (gap {:.1} pp), initial coverage {:.3} vs {:.3}, failed runs {}/{}",
        sf.success_rate,
        sa.success_rate,
        100.0 * gap,
        sf.initial_coverage,
        sa.initial_coverage,
        sf.failed,
        sa.failed
    );
    (ok, msg)
}

fn efficiency(exp: &ExperimentOutcome) -> Outcome {
    let sf = exp.report(System::SemaForr).unwrap();
    let sa = exp.report(System::SemaForrA).unwrap();
    let ok = sf.travel_time_tasks < sa.travel_time_total
        && sf.distance_total <= 1.10 * sa.distance_total;
    let msg = format!(
        "task time {:.1}s vs {:.1}s, total distance {:.1}m vs {:.1}m (ratio {:.3})",
        sf.travel_time_tasks,
        sa.travel_time_total,
        sf.distance_total,
        sa.distance_total,
        sf.distance_total / sa.distance_total
    );
    (ok, msg)
}

fn reliance(exp: &ExperimentOutcome) -> Outcome {
    let sf = exp
        .report(System::SemaForr)
        .unwrap()
        .heuristic_decision_fraction;
    let sa = exp
        .report(System::SemaForrA)
        .unwrap()
        .heuristic_decision_fraction;
    (sf < sa, format!("heuristic fraction {sf:.3} vs {sa:.3}"))
}

fn hallways(explored: &[Explored]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["corridor-H", "office-block"] {
        let bench = worlds::by_name(name).unwrap();
        let runs: Vec<_> = explored
            .iter()
            .filter(|e| e.world == name && e.seed.is_some())
            .collect();
        ok &= runs.len() == 5;
        for axis in &bench.axes {
            let cells = axis.cells();
            let mean = runs
                .iter()
                .map(|e| {
                    let n = cells
                        .iter()
                        .filter(|c| matches!(e.result.grid.label(**c), Some(CellLabel::Passage(_))))
                        .count();
                    n as f64 / cells.len() as f64
                })
                .sum::<f64>()
                / runs.len() as f64;
            ok &= mean >= 0.70;
            parts.push(format!("{name}/{} {mean:.2}", axis.name));
        }
    }
    (ok, parts.join(", "))
}

fn speedup(explored: &[Explored]) -> Outcome {
    let bench = worlds::office_block();
    let w = &bench.world;
    let sk = &explored
        .iter()
        .find(|e| e.world == "office-block" && e.seed.is_none())
        .unwrap()
        .result
        .skeleton;
    let clear = ExploreConfig::default().radius;
    let pts = generate_targets(w, 100, 5150, clear).unwrap();
    let t = Instant::now();
    let raster = OccupancyRaster::build(w, 0.25, clear);
    let build = t.elapsed().as_secs_f64();
    let (mut plan_time, mut grid_time, mut reference_time) = (0.0, 0.0, 0.0);
    let (mut empty, mut grid_failed) = (0, 0);
    for pair in pts.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        let t = Instant::now();
        let plan = make_plan(sk, a, b);
        plan_time += t.elapsed().as_secs_f64();
        empty += usize::from(plan.is_empty());
        let t = Instant::now();
        let g = grid_astar(&raster, a, b);
        grid_time += t.elapsed().as_secs_f64();
        grid_failed += usize::from(g.is_err());
        let t = Instant::now();
        let _ = grid_reference_planner(w, a, b, 0.25, clear);
        reference_time += t.elapsed().as_secs_f64();
    }
    let n = 50.0;
    let (plan_mean, grid_mean, ref_mean) = (plan_time / n, grid_time / n, reference_time / n);
    let regions = sk.region_count();
    let free = raster.free_count();
    let ok = plan_mean <= ref_mean / 10.0 && (regions as f64) <= 0.01 * free as f64;
    let msg = format!(
        "skeleton {:.3}ms vs reference planner {:.1}ms (ratio {:.4}); search alone on a prebuilt raster {:.3}ms \
         (ratio {:.3}, build {:.1}ms); regions {regions} vs free cells {free} ({:.2}%), empty plans {empty}, grid failures {grid_failed}",
        1e3 * plan_mean,
        1e3 * ref_mean,
        plan_mean / ref_mean,
        1e3 * grid_mean,
        plan_mean / grid_mean,
        1e3 * build,
        100.0 * regions as f64 / free as f64
    );
    (ok, msg)
}

/// Random skeleton on a jittered lattice, with the edge list kept aside.
fn random_skeleton(rng: &mut ChaCha8Rng) -> (Skeleton, Vec<SkeletonEdge>) {
    let n: u32 = rng.gen_range(2..=500);
    let side = (n as f64).sqrt().ceil() as u32;
    let mut sk = Skeleton::default();
    for k in 0..n {
        let c = Point::new(
            (k % side) as f64 * 5.0 + rng.gen_range(-0.4..0.4),
            (k / side) as f64 * 5.0 + rng.gen_range(-0.4..0.4),
        );
        sk.insert_region(k, c, rng.gen_range(0.3..2.0), Some(0))
            .unwrap();
    }
    let m = rng.gen_range(n / 2..=2 * n);
    let mut edges = Vec::new();
    for _ in 0..m {
        let a = rng.gen_range(0..n);
        // Mostly lattice neighbours, sometimes long links.
        let b = if rng.gen_bool(0.8) {
            let step = [1, side, side + 1, side.saturating_sub(1)][rng.gen_range(0..4)];
            (a + step).min(n - 1)
        } else {
            rng.gen_range(0..n)
        };
        if a == b {
            continue;
        }
        let (ra, rb) = (sk.region(a).unwrap().clone(), sk.region(b).unwrap().clone());
        let u = (rb.center - ra.center) * (1.0 / ra.center.distance(rb.center));
        let exit_a = ra.center + u * ra.radius;
        let entry_b = rb.center - u * rb.radius;
        let distance = exit_a.distance(entry_b) * rng.gen_range(1.0..2.5);
        let e = SkeletonEdge {
            a,
            b,
            distance,
            exit_a,
            entry_b,
            midpoint: exit_a.lerp(entry_b, 0.5),
        };
        sk.insert_edge(e).unwrap();
        edges.push(e);
    }
    (sk, edges)
}

fn dijkstra(sk: &Skeleton, edges: &[SkeletonEdge], from: u32) -> BTreeMap<u32, f64> {
    let mut adj: BTreeMap<u32, Vec<(u32, f64)>> = BTreeMap::new();
    for e in edges {
        let w = e.distance + sk.region(e.a).unwrap().radius + sk.region(e.b).unwrap().radius;
        adj.entry(e.a).or_default().push((e.b, w));
        adj.entry(e.b).or_default().push((e.a, w));
    }
    let mut dist: BTreeMap<u32, f64> = BTreeMap::new();
    let mut done = BTreeSet::new();
    dist.insert(from, 0.0);
    loop {
        let Some((&u, &du)) = dist
            .iter()
            .filter(|(k, _)| !done.contains(*k))
            .min_by(|a, b| a.1.total_cmp(b.1))
        else {
            break;
        };
        done.insert(u);
        for &(v, w) in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            let alt = du + w;
            if dist.get(&v).is_none_or(|&dv| alt < dv) {
                dist.insert(v, alt);
            }
        }
    }
    dist
}

fn random_network(rng: &mut ChaCha8Rng) -> (PassageNetwork, Vec<Cell>, BTreeSet<(Cell, Cell)>) {
    let n = rng.gen_range(2..=200);
    let mut cells = BTreeSet::new();
    while cells.len() < n {
        cells.insert(Cell::new(rng.gen_range(0..30), rng.gen_range(0..30)));
    }
    let cells: Vec<Cell> = cells.into_iter().collect();
    let mut net = PassageNetwork::new();
    for &c in &cells {
        net.add_vertex(c, 0);
    }
    let mut edges = BTreeSet::new();
    for _ in 0..rng.gen_range(n / 2..=3 * n) {
        let (a, b) = (cells[rng.gen_range(0..n)], cells[rng.gen_range(0..n)]);
        if a != b && net.add_edge(a, b) {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    (net, cells, edges)
}

/// All-pairs hop counts by Floyd-Warshall.
fn hops(cells: &[Cell], edges: &BTreeSet<(Cell, Cell)>) -> Vec<Vec<usize>> {
    let n = cells.len();
    let idx: BTreeMap<Cell, usize> = cells.iter().enumerate().map(|(k, c)| (*c, k)).collect();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for k in 0..n {
        d[k][k] = 0;
    }
    for (a, b) in edges {
        d[idx[a]][idx[b]] = 1;
        d[idx[b]][idx[a]] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

fn oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let (mut plan_queries, mut plan_bad) = (0, 0);
    for _ in 0..100 {
        let (sk, edges) = random_skeleton(&mut rng);
        let n = sk.region_count() as u32;
        for _ in 0..5 {
            let (from, to) = (rng.gen_range(0..n), rng.gen_range(0..n));
            plan_queries += 1;
            let truth = dijkstra(&sk, &edges, from);
            let ok = match (plan_regions_with_cost(&sk, from, to), truth.get(&to)) {
                (Ok((path, cost)), Some(&want)) => {
                    let walked: Option<f64> = path.windows(2).try_fold(0.0, |acc, w| {
                        sk.edge(w[0].min(w[1]), w[0].max(w[1])).map(|e| {
                            acc + e.distance
                                + sk.region(w[0]).unwrap().radius
                                + sk.region(w[1]).unwrap().radius
                        })
                    });
                    path.first() == Some(&from)
                        && path.last() == Some(&to)
                        && walked.is_some_and(|c| (c - cost).abs() <= 1e-9 * (1.0 + c))
                        && (cost - want).abs() <= 1e-9 * (1.0 + want)
                }
                (Err(PlanError::Unreachable), None) => true,
                _ => false,
            };
            plan_bad += usize::from(!ok);
        }
    }
    let (mut bfs_queries, mut bfs_bad) = (0, 0);
    for _ in 0..100 {
        let (net, cells, edges) = random_network(&mut rng);
        let d = hops(&cells, &edges);
        for _ in 0..5 {
            let (i, j) = (rng.gen_range(0..cells.len()), rng.gen_range(0..cells.len()));
            bfs_queries += 1;
            let ok = match bfs_cell_path(&net, cells[i], cells[j]) {
                Ok(path) => {
                    path.first() == Some(&cells[i])
                        && path.last() == Some(&cells[j])
                        && path
                            .windows(2)
                            .all(|w| edges.contains(&(w[0].min(w[1]), w[0].max(w[1]))))
                        && path.len() - 1 == d[i][j]
                }
                Err(_) => d[i][j] >= usize::MAX / 4,
            };
            bfs_bad += usize::from(!ok);
        }
    }
    (
        plan_bad == 0 && bfs_bad == 0,
        format!("A* vs Dijkstra {plan_bad}/{plan_queries} mismatches, BFS vs Floyd-Warshall {bfs_bad}/{bfs_queries} mismatches"),
    )
}

fn geometry(explored: &[Explored]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let actions = ActionSet::default().all();
    let (mut ray_bad, mut worst, mut move_bad, mut moves) = (0, 0.0f64, 0, 0);
    for name in worlds::NAMES {
        let w = worlds::by_name(name).unwrap().world;
        let b = w.bounds();
        let mut poses = 0;
        while poses < 10_000 {
            let p = Point::new(rng.gen_range(0.0..b.width), rng.gen_range(0.0..b.height));
            if clearance(w.walls(), p) <= 1e-3 {
                continue;
            }
            poses += 1;
            let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let got = w.cast_ray(p, theta, 25.0).unwrap();
            let delta = (got - brute_ray(w.walls(), p, theta, 25.0)).abs();
            worst = worst.max(delta);
            ray_bad += usize::from(delta > 1e-9);
            if clearance(w.walls(), p) >= 0.4 {
                let a = actions[rng.gen_range(0..actions.len())];
                let out = w.apply_action(Pose::new(p.x, p.y, theta), a, 0.4);
                moves += 1;
                let kept = clearance(w.walls(), out.new_pose.position()) >= 0.4 - 1e-9;
                let exact = match a {
                    Action::Forward(m) => out.distance_traveled <= m,
                    Action::Rotate(_) => out.distance_traveled == 0.0,
                };
                move_bad += usize::from(!kept || !exact);
            }
        }
    }
    let mut overlaps = 0;
    for e in explored {
        let regions: Vec<_> = e.result.skeleton.regions().collect();
        for (k, a) in regions.iter().enumerate() {
            for b in &regions[k + 1..] {
                overlaps += usize::from(a.center.distance(b.center) < a.radius + b.radius - 1e-9);
            }
        }
    }
    (
        ray_bad == 0 && move_bad == 0 && overlaps == 0,
        format!(
            "rays {ray_bad} mismatches (max |d| {worst:.1e}), moves {move_bad}/{moves} violations, \
             overlapping regions {overlaps} over {} explorations",
            explored.len()
        ),
    )
}

fn stretch(x: f64, y: f64, length: f64) -> Stretch {
    Stretch {
        origin: Point::new(x, y),
        direction: 0.0,
        length,
        width: 2.0,
        avg_length: length,
        detected_at: Pose::new(x, y, 0.0),
    }
}

fn open_view(theta: f64) -> View {
    View {
        pose: Pose::new(0.0, 0.0, theta),
        ranges: vec![25.0; 660],
        sensor: SensorConfig::default(),
    }
}

fn formulas() -> Outcome {
    let mut failed = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failed.push(name.to_string());
        }
    };

    // Occupancy ratio, boundary inclusive.
    check("h2p2", RayCounts { hits: 2, passes: 2 }.is_unobstructed());
    check("h3p1", !RayCounts { hits: 3, passes: 1 }.is_unobstructed());
    // Adjacency: a free cell 3m to the left stays unlabeled, one 1m away is labeled.
    let walls = {
        let c = [
            Point::new(0.0, 0.0),
            Point::new(12.0, 0.0),
            Point::new(12.0, 12.0),
            Point::new(0.0, 12.0),
        ];
        (0..4)
            .map(|k| hlc_core::Segment::new(c[k], c[(k + 1) % 4]))
            .collect()
    };
    let room = World::new(
        "room",
        hlc_core::Bounds {
            width: 12.0,
            height: 12.0,
        },
        walls,
    )
    .unwrap();
    let (mut grid, mut net) = (PassageGrid::new(room.bounds()), PassageNetwork::new());
    let view = room
        .scan(Pose::new(6.5, 6.5, 0.0), &SensorConfig::default())
        .unwrap();
    update_occupancy(&mut grid, &mut net, &view, 0, &OccupancyConfig::default());
    check("left 1m", grid.is_passage(Cell::new(6, 7)));
    check("left 3m", grid.label(Cell::new(6, 9)).is_none());

    // Enqueue: front iff avg_length > 2d.
    for (avg, front) in [(15.0, true), (14.0, false), (8.0, false)] {
        let mut list = CandidateList::new();
        list.enqueue(Candidate::new(0, stretch(0.0, 50.0, 30.0)), 7.0);
        list.enqueue(
            Candidate::new(
                1,
                Stretch {
                    avg_length: avg,
                    ..stretch(0.0, 0.0, 10.0)
                },
            ),
            7.0,
        );
        let head = list.queue().next().unwrap().id;
        check(&format!("enqueue {avg}"), (head == 1) == front);
    }

    // Attachment score.
    check("score A", attach_score(2.0, 0.0) == -10.0);
    check("score B", attach_score(3.0, 6.0) == -9.0);
    check(
        "score center",
        attach_score(0.0, 4.0) == 4.0 && attach_score(1.0, 8.0) < 4.0,
    );
    let mut sk = Skeleton::default();
    sk.insert_region(0, Point::new(2.0, 0.0), 0.5, None)
        .unwrap();
    sk.insert_region(1, Point::new(-3.0, 0.0), 0.5, None)
        .unwrap();
    for k in 0..6u32 {
        let a = std::f64::consts::PI * (0.5 + k as f64) / 6.0 + std::f64::consts::PI / 2.0;
        let c = Point::new(-3.0, 0.0) + Point::from_angle(a) * 30.0;
        sk.insert_region(2 + k, c, 0.5, None).unwrap();
        let (ex, en) = (
            Point::new(-3.0, 0.0) + Point::from_angle(a) * 0.5,
            c - Point::from_angle(a) * 0.5,
        );
        sk.insert_edge(SkeletonEdge {
            a: 1,
            b: 2 + k,
            distance: 29.0,
            exit_a: ex,
            entry_b: en,
            midpoint: ex.lerp(en, 0.5),
        })
        .unwrap();
    }
    check("attach B", attach_point(&sk, Point::new(0.0, 0.0)) == Ok(1));

    // Termination, checked in order.
    let cfg = TerminationConfig::default();
    let mut state = TraversalState::new(0, 40);
    for _ in 0..40 {
        state.push_heading(0.0, 0.8);
    }
    state.passage_length = 4.0;
    let far = stretch(0.0, 0.0, 30.0);
    let features = FeatureVector {
        front_max: 25.0,
        ..FeatureVector::default()
    };
    let near_end = View {
        pose: Pose::new(29.6, 0.0, 0.0),
        ..open_view(0.0)
    };
    check(
        "end 0.4",
        should_terminate(&state, &near_end, &features, &far, &cfg)
            == Some(TerminationReason::EndReached),
    );
    check(
        "turn 50",
        should_terminate(
            &state,
            &open_view(50f64.to_radians()),
            &features,
            &far,
            &cfg,
        ) == Some(TerminationReason::HardTurn),
    );
    check(
        "turn 40",
        should_terminate(
            &state,
            &open_view(40f64.to_radians()),
            &features,
            &far,
            &cfg,
        )
        .is_none(),
    );
    state.width_history = vec![5.0; 4];
    let short = FeatureVector {
        front_max: 2.0,
        ..FeatureVector::default()
    };
    check(
        "room 6<7.5",
        should_terminate(&state, &open_view(0.0), &short, &far, &cfg)
            == Some(TerminationReason::RoomDetected),
    );
    let longer = FeatureVector {
        front_max: 4.0,
        ..FeatureVector::default()
    };
    check(
        "room 8>7.5",
        should_terminate(&state, &open_view(0.0), &longer, &far, &cfg).is_none(),
    );

    // Allen overlap of at least a third of the mean length.
    let a = stretch(0.0, 0.0, 12.0);
    check("self", similar_stretches(&a, &a));
    check("overlap 4", similar_stretches(&a, &stretch(8.0, 0.5, 12.0)));
    check(
        "overlap 3.9",
        !similar_stretches(&a, &stretch(8.1, 0.5, 12.0)),
    );
    check(
        "10m apart",
        !similar_stretches(&a, &stretch(0.0, 10.0, 12.0)),
    );

    (
        failed.is_empty(),
        if failed.is_empty() {
            "22 vectors".into()
        } else {
            format!("failed: {}", failed.join(", "))
        },
    )
}

fn determinism(explored: &[Explored]) -> Outcome {
    let w = worlds::corridor_h().world;
    let cfg = ExperimentConfig {
        world: "corridor-H".into(),
        num_tasks: 4,
        reps: 2,
        task_lists: 2,
        seed: 9,
        ..Default::default()
    };
    let a = write_report(&run_experiment(&w, &cfg, 1).unwrap());
    let b = write_report(&run_experiment(&w, &cfg, 2).unwrap());
    let first = &explored
        .iter()
        .find(|e| e.world == "office-block" && e.seed.is_none())
        .unwrap()
        .result;
    let again = explore_from(&worlds::office_block(), None);
    let grid_same = write_grid(&first.grid) == write_grid(&again.grid);
    let skel_same = write_skeleton(&first.skeleton) == write_skeleton(&again.skeleton);
    (
        a == b && grid_same && skel_same,
        format!(
            "report identical {}, grid identical {grid_same}, skeleton identical {skel_same}",
            a == b
        ),
    )
}

fn run(n: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let (ok, msg) = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let why = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        (false, format!("panicked: {}", why.unwrap_or_default()))
    });
    println!(
        "criterion {n} {name}: {} ({msg}) [{:.1}s]",
        if ok { "PASS" } else { "FAIL" },
        t.elapsed().as_secs_f64()
    );
    ok
}

fn main() -> ExitCode {
    let t = Instant::now();
    let bench = worlds::office_block();
    let cfg = ExperimentConfig {
        num_tasks: 20,
        reps: 3,
        task_lists: 3,
        seed: 1,
        ..Default::default()
    };
    let exp = run_experiment(&bench.world, &cfg, 0).expect("experiment");
    println!(
        "office-block experiment: {:.1}s wall clock",
        t.elapsed().as_secs_f64()
    );

    let mut explored = Vec::new();
    let t = Instant::now();
    for name in ["corridor-H", "office-block"] {
        let bench = worlds::by_name(name).unwrap();
        for seed in (0..5).map(Some).chain([None]) {
            explored.push(Explored {
                world: name,
                seed,
                result: explore_from(&bench, seed),
            });
        }
    }
    explored.push(Explored {
        world: "corridor",
        seed: None,
        result: explore_from(&worlds::corridor(), None),
    });
    println!("explorations: {:.1}s", t.elapsed().as_secs_f64());

    let results = [
        run(1, "directional ablation", || direction(&exp)),
        run(2, "travel efficiency", || efficiency(&exp)),
        run(3, "heuristic reliance", || reliance(&exp)),
        run(4, "hallway capture", || hallways(&explored)),
        run(5, "planning speedup", || speedup(&explored)),
        run(6, "oracle equivalence", oracles),
        run(7, "geometry invariants", || geometry(&explored)),
        run(8, "formula vectors", formulas),
        run(9, "determinism", || determinism(&explored)),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
