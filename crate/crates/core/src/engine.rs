//! The interface shared by both execution engines and a trace-producing driver.

use std::time::{Duration, Instant};

use crate::connector::InteractionSet;
use crate::error::ModelError;
use crate::model::{GlobalState, Interaction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Fired {
        interaction: Interaction,
        next: GlobalState,
    },
    /// No interaction survives priority filtering.
    Deadlock,
}

pub trait Engine {
    fn name(&self) -> &'static str;

    fn state(&self) -> &GlobalState;

    fn set_state(&mut self, state: GlobalState) -> Result<(), ModelError>;

    /// Interactions the engine may choose from at `state`.
    fn survivors(&mut self, state: &GlobalState) -> Result<InteractionSet, ModelError>;

    /// Chooses one survivor at the current state, executes it and moves on.
    fn step(&mut self) -> Result<StepOutcome, ModelError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub interaction: Interaction,
    /// State after the step.
    pub state: GlobalState,
}

#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub deadlocked: bool,
    pub elapsed: Duration,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn interactions(&self) -> impl Iterator<Item = &Interaction> {
        self.steps.iter().map(|s| &s.interaction)
    }

    pub fn mean_step(&self) -> Duration {
        match self.steps.len() {
            0 => Duration::ZERO,
            n => self.elapsed / n as u32,
        }
    }
}

/// Runs up to `steps` steps, stopping early on deadlock.
pub fn run<E: Engine + ?Sized>(engine: &mut E, steps: usize) -> Result<Trace, ModelError> {
    let mut trace = Trace {
        steps: Vec::with_capacity(steps),
        ..Trace::default()
    };
    let start = Instant::now();
    for _ in 0..steps {
        match engine.step()? {
            StepOutcome::Fired { interaction, next } => trace.steps.push(TraceStep {
                interaction,
                state: next,
            }),
            StepOutcome::Deadlock => {
                trace.deadlocked = true;
                break;
            }
        }
    }
    trace.elapsed = start.elapsed();
    Ok(trace)
}

/// Runs up to `steps` steps without recording anything; returns the number of
/// steps executed.
pub fn run_silent<E: Engine + ?Sized>(engine: &mut E, steps: usize) -> Result<usize, ModelError> {
    for done in 0..steps {
        if engine.step()? == StepOutcome::Deadlock {
            return Ok(done);
        }
    }
    Ok(steps)
}
