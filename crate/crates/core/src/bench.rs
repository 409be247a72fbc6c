//! Timed sweeps over field size, obstacle count and source count.
//!
//! Each configuration gets a seeded random field with the destination and
//! sources kept clear of obstacles and one discarded warmup run. Then `reps`
//! rounds time the full dispatch pipeline once per configuration, in a seeded
//! random order per round. Records hold per-phase medians.
//! Everything runs on the calling thread.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::apsp::{floyd, ApspResult};
use crate::dispatch::{dispatch_with, Planner};
use crate::error::{Error, Result};
use crate::field::{random_field, CellId, Field};
use crate::visibility::{build_weight_matrix, WeightMatrix};

pub const CSV_HEADER: &str = "scenario,width,height,obstacles,sources,seed,phase,reps,seconds";

pub const DEFAULT_REPS: usize = 5;
pub const DEFAULT_SEED: u64 = 2024;
/// Side length of the fixed-size field in the obstacle and source sweeps.
pub const STANDARD_SIDE: usize = 60;
/// Obstacle count held fixed in the size and source sweeps.
pub const STANDARD_OBSTACLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Demo,
    Size,
    Obstacles,
    Sources,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Demo => "demo",
            Scenario::Size => "size",
            Scenario::Obstacles => "obstacles",
            Scenario::Sources => "sources",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "demo" => Ok(Scenario::Demo),
            "size" => Ok(Scenario::Size),
            "obstacles" => Ok(Scenario::Obstacles),
            "sources" => Ok(Scenario::Sources),
            other => Err(Error::Argument(format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    BuildWeights,
    Floyd,
    Extract,
    Total,
}

impl Phase {
    pub const ALL: [Phase; 4] = [
        Phase::BuildWeights,
        Phase::Floyd,
        Phase::Extract,
        Phase::Total,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::BuildWeights => "build_w",
            Phase::Floyd => "floyd",
            Phase::Extract => "extract",
            Phase::Total => "total",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Median wall-clock time of one phase for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub scenario: Scenario,
    pub width: usize,
    pub height: usize,
    pub num_obstacles: usize,
    pub num_sources: usize,
    pub seed: u64,
    pub phase: Phase,
    pub reps: usize,
    pub seconds: f64,
}

impl BenchRecord {
    pub fn cells(&self) -> usize {
        self.width * self.height
    }
}

/// One field configuration of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunPoint {
    pub width: usize,
    pub height: usize,
    pub obstacles: usize,
    pub sources: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub points: Vec<RunPoint>,
    pub seed: u64,
    pub reps: usize,
}

impl ScenarioConfig {
    /// Square fields of the given side lengths. The obstacle count is capped
    /// so that each field keeps room for the source and destination.
    pub fn size(sides: &[usize], obstacles: usize) -> Self {
        let points = sides
            .iter()
            .map(|&side| RunPoint {
                width: side,
                height: side,
                obstacles: obstacles.min((side * side).saturating_sub(2)),
                sources: 1,
            })
            .collect();
        Self::new(Scenario::Size, points)
    }

    pub fn obstacles(side: usize, counts: &[usize]) -> Self {
        let points = counts
            .iter()
            .map(|&obstacles| RunPoint {
                width: side,
                height: side,
                obstacles,
                sources: 1,
            })
            .collect();
        Self::new(Scenario::Obstacles, points)
    }

    pub fn sources(side: usize, obstacles: usize, counts: &[usize]) -> Self {
        let points = counts
            .iter()
            .map(|&sources| RunPoint {
                width: side,
                height: side,
                obstacles,
                sources,
            })
            .collect();
        Self::new(Scenario::Sources, points)
    }

    /// The two showcase fields: 10x10 with 20 obstacles and 60x60 with 100.
    pub fn demo() -> Self {
        let point = |side, obstacles| RunPoint {
            width: side,
            height: side,
            obstacles,
            sources: 1,
        };
        Self::new(Scenario::Demo, vec![point(10, 20), point(60, 100)])
    }

    /// Sweep parameters used for the scaling study. The size sweep stops at
    /// 60x60 unless `full_scale` adds the 70..100 sides.
    pub fn standard(scenario: Scenario, full_scale: bool) -> Self {
        match scenario {
            Scenario::Demo => Self::demo(),
            Scenario::Size => {
                let last = if full_scale { 100 } else { 60 };
                let sides: Vec<usize> = (10..=last).step_by(10).collect();
                Self::size(&sides, STANDARD_OBSTACLES)
            }
            Scenario::Obstacles => {
                let mut counts = vec![1];
                counts.extend((100..=1000).step_by(100));
                Self::obstacles(STANDARD_SIDE, &counts)
            }
            Scenario::Sources => {
                let counts = [1, 5, 10, 20, 50, 100, 200, 400, 500, 600, 1000];
                Self::sources(STANDARD_SIDE, STANDARD_OBSTACLES, &counts)
            }
        }
    }

    fn new(scenario: Scenario, points: Vec<RunPoint>) -> Self {
        ScenarioConfig {
            scenario,
            points,
            seed: DEFAULT_SEED,
            reps: DEFAULT_REPS,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self
    }
}

/// A generated benchmark instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub field: Field,
    pub sources: Vec<CellId>,
    pub destination: CellId,
}

/// Draws the destination and sources uniformly, then places obstacles on the
/// remaining cells.
pub fn generate_instance(point: &RunPoint, seed: u64) -> Result<Instance> {
    if point.width == 0 || point.height == 0 || point.sources == 0 {
        return Err(Error::Argument(format!(
            "run parameters must be positive: {point:?}"
        )));
    }
    let cells = point.width * point.height;
    if point.sources + 1 > cells || point.obstacles > cells - point.sources - 1 {
        return Err(Error::Capacity(format!(
            "{} obstacles, {} sources and a destination do not fit in {} cells",
            point.obstacles, point.sources, cells
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<CellId> = rand::seq::index::sample(&mut rng, cells, point.sources + 1)
        .into_iter()
        .map(CellId::from_index)
        .collect();
    let field = random_field(
        point.width,
        point.height,
        point.obstacles,
        &picks,
        seed.wrapping_add(1),
    )?;
    Ok(Instance {
        field,
        destination: picks[0],
        sources: picks[1..].to_vec(),
    })
}

#[derive(Debug, Default)]
struct TimedPlanner {
    build_seconds: f64,
    floyd_seconds: f64,
    floyd_calls: usize,
}

impl Planner for TimedPlanner {
    fn weights(&mut self, field: &Field) -> Result<WeightMatrix> {
        let start = Instant::now();
        let w = build_weight_matrix(field);
        self.build_seconds += start.elapsed().as_secs_f64();
        w
    }

    fn all_pairs(&mut self, weights: &WeightMatrix) -> Result<ApspResult> {
        let start = Instant::now();
        let r = floyd(weights);
        self.floyd_seconds += start.elapsed().as_secs_f64();
        self.floyd_calls += 1;
        r
    }
}

/// Phase timings of one pipeline run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunTiming {
    pub build_weights: f64,
    pub floyd: f64,
    pub extract: f64,
    pub total: f64,
    /// All-pairs invocations made by the dispatch.
    pub floyd_calls: usize,
}

impl RunTiming {
    pub fn phase(&self, phase: Phase) -> f64 {
        match phase {
            Phase::BuildWeights => self.build_weights,
            Phase::Floyd => self.floyd,
            Phase::Extract => self.extract,
            Phase::Total => self.total,
        }
    }
}

/// Runs one full dispatch and times its phases.
pub fn time_pipeline(instance: &Instance) -> Result<RunTiming> {
    let mut planner = TimedPlanner::default();
    let start = Instant::now();
    dispatch_with(
        &instance.field,
        &instance.sources,
        instance.destination,
        &mut planner,
    )?;
    let total = start.elapsed().as_secs_f64();
    Ok(RunTiming {
        build_weights: planner.build_seconds,
        floyd: planner.floyd_seconds,
        extract: (total - planner.build_seconds - planner.floyd_seconds).max(0.0),
        total,
        floyd_calls: planner.floyd_calls,
    })
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub records: Vec<BenchRecord>,
    /// Largest number of all-pairs runs seen in a single dispatch, per point.
    pub floyd_calls: Vec<usize>,
}

impl ScenarioReport {
    /// Records of one phase, in sweep order.
    pub fn phase(&self, phase: Phase) -> impl Iterator<Item = &BenchRecord> {
        self.records.iter().filter(move |r| r.phase == phase)
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport> {
    run_scenario_with(config, |_| {})
}

/// Progress notifications from [`run_scenario_with`].
#[derive(Debug, Clone, Copy)]
pub enum Progress<'a> {
    /// Round `done` of `reps` finished.
    Round { done: usize, reps: usize },
    /// Final records of one point, in sweep order.
    Point(&'a [BenchRecord]),
}

/// Like [`run_scenario`], reporting each finished round and each point.
pub fn run_scenario_with(
    config: &ScenarioConfig,
    mut progress: impl FnMut(Progress<'_>),
) -> Result<ScenarioReport> {
    if config.reps == 0 {
        return Err(Error::Argument("reps must be positive".into()));
    }
    let instances = config
        .points
        .iter()
        .map(|p| generate_instance(p, config.seed))
        .collect::<Result<Vec<_>>>()?;
    let mut calls = Vec::with_capacity(instances.len());
    for instance in &instances {
        calls.push(time_pipeline(instance)?.floyd_calls);
    }
    // every round visits the points in a fresh seeded order, so machine drift
    // and position-in-round effects do not line up with the swept value
    let mut order_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..instances.len()).collect();
    let mut runs: Vec<Vec<RunTiming>> = vec![Vec::with_capacity(config.reps); instances.len()];
    for round in 0..config.reps {
        order.shuffle(&mut order_rng);
        for &i in &order {
            let t = time_pipeline(&instances[i])?;
            calls[i] = calls[i].max(t.floyd_calls);
            runs[i].push(t);
        }
        progress(Progress::Round {
            done: round + 1,
            reps: config.reps,
        });
    }

    let mut report = ScenarioReport {
        records: Vec::with_capacity(config.points.len() * Phase::ALL.len()),
        floyd_calls: calls,
    };
    for (point, (instance, runs)) in config.points.iter().zip(instances.iter().zip(&runs)) {
        let first = report.records.len();
        for phase in Phase::ALL {
            let mut samples: Vec<f64> = runs.iter().map(|r| r.phase(phase)).collect();
            report.records.push(BenchRecord {
                scenario: config.scenario,
                width: point.width,
                height: point.height,
                num_obstacles: instance.field.obstacle_count(),
                num_sources: instance.sources.len(),
                seed: config.seed,
                phase,
                reps: config.reps,
                seconds: median(&mut samples),
            });
        }
        progress(Progress::Point(&report.records[first..]));
    }
    Ok(report)
}

pub fn write_csv_header(mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")
}

pub fn write_csv_rows(records: &[BenchRecord], mut out: impl Write) -> std::io::Result<()> {
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.9}",
            r.scenario,
            r.width,
            r.height,
            r.num_obstacles,
            r.num_sources,
            r.seed,
            r.phase,
            r.reps,
            r.seconds
        )?;
    }
    Ok(())
}

pub fn write_csv(records: &[BenchRecord], mut out: impl Write) -> std::io::Result<()> {
    write_csv_header(&mut out)?;
    write_csv_rows(records, out)
}
