use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use hlc::clock::WallClock;
use hlc::experiment::{self, load_config, run_experiment, START_CLEARANCE, START_JITTER};
use hlc::formats;
use hlc::svg::{render_svg, Layers};
use hlc_core::controller::{run_task_observed, ControllerConfig};
use hlc_core::explore::{explore, seeded_start, ExploreConfig, PassageGrid};
use hlc_core::metrics::coverage;
use hlc_core::perception::{compute_features, train_classifier, TrainConfig};
use hlc_core::planner::{make_plan, Plan};
use hlc_core::skeleton::{Skeleton, SkeletonConfig};
use hlc_core::{Point, World};

#[derive(Parser)]
#[command(
    name = "hlc",
    version,
    about = "Exploration and skeleton navigation in 2D indoor worlds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Explore a world and write the learned model.
    Explore {
        /// Benchmark name or world file.
        world: String,
        /// Exploration budget in simulated seconds.
        #[arg(long, default_value_t = 1200.0)]
        budget: f64,
        /// Seed for the start pose; omit to start exactly at the world's start.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Drive from the world's start to a target.
    Navigate {
        world: String,
        /// Target as X,Y in metres.
        #[arg(long, value_parser = parse_point)]
        target: Point,
        /// Skeleton to plan on; without one the robot learns from scratch.
        #[arg(long)]
        skeleton: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the paired SemaFORR / SemaFORR-A experiment.
    Experiment {
        config: PathBuf,
        /// Run SemaFORR-A only.
        #[arg(long)]
        ablate: bool,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Draw artifacts (.world .grid .skel .plan .log) as one SVG.
    Render {
        #[arg(required = true)]
        artifacts: Vec<PathBuf>,
        /// Benchmark to draw when no .world file is given.
        #[arg(long)]
        world: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a room/passage classifier to the views of logged decisions.
    TrainClassifier {
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// World the logs were recorded in.
        #[arg(long)]
        world: String,
    },
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or("expected X,Y")?;
    let x: f64 = x.trim().parse().map_err(|_| format!("bad x `{x}`"))?;
    let y: f64 = y.trim().parse().map_err(|_| format!("bad y `{y}`"))?;
    Ok(Point::new(x, y))
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(dir: &Path, name: &str, text: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn world_arg(spec: &str) -> anyhow::Result<World> {
    experiment::load_world(spec, Path::new("."))
}

fn cmd_explore(world: &str, budget: f64, seed: Option<u64>, out: &Path) -> anyhow::Result<()> {
    if !(budget > 0.0) {
        bail!("budget must be positive");
    }
    let world = world_arg(world)?;
    let base = experiment::start_pose(&world)?;
    let cfg = ExploreConfig {
        budget,
        ..ExploreConfig::default()
    };
    let start = seed.map_or(base, |s| {
        seeded_start(&world, base, s, START_JITTER, START_CLEARANCE)
    });
    let ex = explore(&world, start, cfg.clone()).map_err(|e| anyhow!("exploration failed: {e}"))?;
    std::fs::create_dir_all(out)?;
    write(out, "world.world", &formats::write_world(&world))?;
    write(out, "passages.grid", &formats::write_grid(&ex.grid))?;
    write(out, "passages.net", &formats::write_network(&ex.network))?;
    write(out, "skeleton.skel", &formats::write_skeleton(&ex.skeleton))?;
    write(
        out,
        "decisions.log",
        &formats::write_decisions(&ex.decisions),
    )?;
    println!(
        "passages {}  regions {}  edges {}  coverage {:.3}  time {:.1}s  distance {:.1}m",
        ex.passages(),
        ex.skeleton.region_count(),
        ex.skeleton.edge_count(),
        coverage(&ex.grid, &ex.skeleton, &world, cfg.radius),
        ex.elapsed,
        ex.distance
    );
    Ok(())
}

fn cmd_navigate(
    world: &str,
    target: Point,
    skeleton: Option<&Path>,
    out: &Path,
) -> anyhow::Result<()> {
    let world = world_arg(world)?;
    let start = experiment::start_pose(&world)?;
    let mut sk = match skeleton {
        Some(p) => formats::parse_skeleton(&read(p)?, SkeletonConfig::default())
            .with_context(|| format!("parsing {}", p.display()))?,
        None => Skeleton::new(SkeletonConfig::default()),
    };
    let plan = make_plan(&sk, start.position(), target);
    let mut trace = String::new();
    let cfg = ControllerConfig::default();
    let r = run_task_observed(
        &world,
        start,
        target,
        Some(plan.clone()),
        &mut sk,
        &cfg,
        &WallClock::new(),
        &mut |s| {
            trace.push_str(&s.trace_line());
            trace.push('\n');
            ControlFlow::Continue(())
        },
    )?;
    std::fs::create_dir_all(out)?;
    write(out, "plan.plan", &formats::write_plan(&plan))?;
    write(out, "trace.log", &trace)?;
    write(out, "skeleton.skel", &formats::write_skeleton(&sk))?;
    println!(
        "{}  actions {}  time {:.1}s  distance {:.1}m  heuristic {:.3}",
        if r.reached { "reached" } else { "not reached" },
        r.actions,
        r.sim_time,
        r.distance,
        r.heuristic_fraction()
    );
    Ok(())
}

fn cmd_experiment(config: &Path, ablate: bool, jobs: usize, out: &Path) -> anyhow::Result<()> {
    let (mut cfg, world) = load_config(config)?;
    cfg.ablate |= ablate;
    let outcome = run_experiment(&world, &cfg, jobs)?;
    let report = experiment::write_report(&outcome);
    std::fs::create_dir_all(out)?;
    write(out, "report.csv", &report)?;
    write(out, "timing.csv", &experiment::write_timing(&outcome))?;
    print!("{report}");
    Ok(())
}

fn cmd_render(artifacts: &[PathBuf], world: Option<&str>, out: &Path) -> anyhow::Result<()> {
    let ext = |p: &Path| {
        p.extension()
            .and_then(|e| e.to_str())
            .unwrap_or("")
            .to_string()
    };
    let w = match (artifacts.iter().find(|p| ext(p) == "world"), world) {
        (Some(p), _) => {
            formats::parse_world(&read(p)?).with_context(|| format!("parsing {}", p.display()))?
        }
        (None, Some(name)) => world_arg(name)?,
        (None, None) => bail!("no world: pass a .world file or --world"),
    };
    let mut grid: Option<PassageGrid> = None;
    let mut skeleton: Option<Skeleton> = None;
    let mut plan: Option<Plan> = None;
    let mut trace = Vec::new();
    for p in artifacts {
        let text = read(p)?;
        let ctx = || format!("parsing {}", p.display());
        match ext(p).as_str() {
            "world" => {}
            "grid" => grid = Some(formats::parse_grid(&text, w.bounds()).with_context(ctx)?),
            "skel" => {
                skeleton = Some(
                    formats::parse_skeleton(&text, SkeletonConfig::default()).with_context(ctx)?,
                )
            }
            "plan" => plan = Some(formats::parse_plan(&text).with_context(ctx)?),
            "log" => {
                let steps = text.lines().any(|l| l.starts_with("step "));
                let poses = if steps {
                    formats::parse_trace(&text).with_context(ctx)?
                } else {
                    formats::parse_decisions(&text)
                        .with_context(ctx)?
                        .iter()
                        .map(|d| d.pose)
                        .collect()
                };
                trace.extend(poses.iter().map(|p| p.position()));
            }
            e => bail!("cannot render `.{e}` files: {}", p.display()),
        }
    }
    let layers = Layers {
        grid: grid.as_ref(),
        skeleton: skeleton.as_ref(),
        plan: plan.as_ref(),
        trace: &trace,
    };
    std::fs::write(out, render_svg(&w, &layers))
        .with_context(|| format!("writing {}", out.display()))
}

fn cmd_train(logs: &[PathBuf], out: &Path, world: &str) -> anyhow::Result<()> {
    let world = world_arg(world)?;
    let cfg = ExploreConfig::default();
    let mut samples = Vec::new();
    for p in logs {
        for d in formats::parse_decisions(&read(p)?)
            .with_context(|| format!("parsing {}", p.display()))?
        {
            let view = world.scan(d.pose, &cfg.sensor)?;
            samples.push(compute_features(&view, &cfg.sectors));
        }
    }
    let classifier = train_classifier(&samples, &TrainConfig::default())?;
    std::fs::write(out, formats::write_classifier(&classifier))
        .with_context(|| format!("writing {}", out.display()))?;
    println!("trained on {} views", samples.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Explore {
            world,
            budget,
            seed,
            out,
        } => cmd_explore(world, *budget, *seed, out),
        Command::Navigate {
            world,
            target,
            skeleton,
            out,
        } => cmd_navigate(world, *target, skeleton.as_deref(), out),
        Command::Experiment {
            config,
            ablate,
            jobs,
            out,
        } => cmd_experiment(config, *ablate, *jobs, out),
        Command::Render {
            artifacts,
            world,
            out,
        } => cmd_render(artifacts, world.as_deref(), out),
        Command::TrainClassifier { logs, out, world } => cmd_train(logs, out, world),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
