//! Timing harness for the two benchmark families.

use std::io;
use std::time::Instant;

use bipsym_core::{run_silent, EncodingStats, Engine, EnumEngine, ModelError, SymbolicEngine, SystemModel};

use crate::gen::{gen_bus, gen_tasks, GenError};

pub const CSV_HEADER: [&str; 12] = [
    "example",
    "engine",
    "n",
    "m",
    "steps",
    "total_ns",
    "mean_step_ns",
    "fs_nodes",
    "fb_nodes",
    "fc_nodes",
    "fp_nodes",
    "seed",
];

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("steps must be at least 1")]
    NoSteps,
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("the model deadlocks before its first timed step")]
    NoProgress,
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    Bus { n: usize },
    Tasks { n: usize, m: usize },
}

impl Example {
    pub fn name(&self) -> &'static str {
        match self {
            Example::Bus { .. } => "bus",
            Example::Tasks { .. } => "tasks",
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Example::Bus { n } | Example::Tasks { n, .. } => n,
        }
    }

    pub fn m(&self) -> Option<usize> {
        match *self {
            Example::Bus { .. } => None,
            Example::Tasks { m, .. } => Some(m),
        }
    }

    pub fn system(&self) -> Result<SystemModel, GenError> {
        match *self {
            Example::Bus { n } => gen_bus(n),
            Example::Tasks { n, m } => gen_tasks(n, m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Enum,
    Symbolic,
}

impl EngineKind {
    pub fn name(&self) -> &'static str {
        match self {
            EngineKind::Enum => "enum",
            EngineKind::Symbolic => "symbolic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    pub repetitions: usize,
    /// Untimed steps run before each timed run.
    pub warmup_steps: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            repetitions: 5,
            warmup_steps: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Repetition {
    pub steps: usize,
    pub total_ns: u128,
}

impl Repetition {
    pub fn mean_step_ns(&self) -> f64 {
        self.total_ns as f64 / self.steps as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub example: String,
    pub engine: String,
    pub n: usize,
    pub m: Option<usize>,
    /// Steps executed by the median repetition.
    pub steps: usize,
    pub total_ns: u128,
    /// Per-step mean of the median repetition.
    pub mean_step_ns: f64,
    /// Present for symbolic runs only.
    pub stats: Option<EncodingStats>,
    pub seed: u64,
    pub repetitions: Vec<Repetition>,
}

impl BenchRecord {
    /// Mean of the per-step means over all repetitions.
    pub fn mean_of_repetitions(&self) -> f64 {
        let sum: f64 = self.repetitions.iter().map(Repetition::mean_step_ns).sum();
        sum / self.repetitions.len() as f64
    }

    pub fn csv_row(&self) -> [String; 12] {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        let stat = |f: fn(&EncodingStats) -> usize| opt(self.stats.as_ref().map(f));
        [
            self.example.clone(),
            self.engine.clone(),
            self.n.to_string(),
            opt(self.m),
            self.steps.to_string(),
            self.total_ns.to_string(),
            format!("{:.1}", self.mean_step_ns),
            stat(|s| s.fs_nodes),
            stat(|s| s.fb_nodes),
            stat(|s| s.fc_nodes),
            stat(|s| s.fp_nodes),
            self.seed.to_string(),
        ]
    }
}

/// Writes the header followed by one row per record.
pub fn write_csv<W: io::Write>(out: W, records: &[BenchRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

pub fn bench(example: Example, engine: EngineKind, steps: usize, seed: u64) -> Result<BenchRecord, BenchError> {
    bench_with(example, engine, steps, seed, BenchOptions::default())
}

/// Runs `repetitions` independent timed runs of `steps` steps, each on a fresh
/// engine after a warm-up, and reports the median one.
pub fn bench_with(
    example: Example,
    engine: EngineKind,
    steps: usize,
    seed: u64,
    options: BenchOptions,
) -> Result<BenchRecord, BenchError> {
    if steps == 0 {
        return Err(BenchError::NoSteps);
    }
    if options.repetitions == 0 {
        return Err(BenchError::NoRepetitions);
    }
    let system = example.system()?;
    let mut repetitions = Vec::with_capacity(options.repetitions);
    let mut stats = None;
    for _ in 0..options.repetitions {
        let rep = match engine {
            EngineKind::Enum => timed(&mut EnumEngine::new(&system, seed)?, steps, options.warmup_steps)?,
            EngineKind::Symbolic => {
                let mut e = SymbolicEngine::new(&system, seed)?;
                stats = Some(e.encoding().stats());
                timed(&mut e, steps, options.warmup_steps)?
            }
        };
        repetitions.push(rep);
    }
    let mut order: Vec<usize> = (0..repetitions.len()).collect();
    order.sort_by(|&a, &b| repetitions[a].mean_step_ns().total_cmp(&repetitions[b].mean_step_ns()));
    let median = repetitions[order[order.len() / 2]];
    Ok(BenchRecord {
        example: example.name().to_string(),
        engine: engine.name().to_string(),
        n: example.n(),
        m: example.m(),
        steps: median.steps,
        total_ns: median.total_ns,
        mean_step_ns: median.mean_step_ns(),
        stats,
        seed,
        repetitions,
    })
}

fn timed<E: Engine>(engine: &mut E, steps: usize, warmup: usize) -> Result<Repetition, BenchError> {
    run_silent(engine, warmup)?;
    let start = Instant::now();
    let done = run_silent(engine, steps)?;
    let total_ns = start.elapsed().as_nanos();
    if done == 0 {
        return Err(BenchError::NoProgress);
    }
    Ok(Repetition { steps: done, total_ns })
}
