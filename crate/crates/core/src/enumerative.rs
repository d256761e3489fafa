//! The enumerative engine: the interaction model is flattened into a list once,
//! and every step checks every listed interaction against the current state.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connector::InteractionSet;
use crate::engine::{Engine, StepOutcome};
use crate::error::ModelError;
use crate::model::{validate, GlobalState, Interaction, PriorityModel, SystemModel};

type Projection = Vec<(usize, Interaction)>;

#[derive(Debug, Clone)]
enum Dominator {
    /// Index into the interaction list; its activity is already known each step.
    Listed(usize),
    /// An interaction outside the list, checked on demand.
    Other(Projection),
}

#[derive(Debug, Clone)]
pub struct EnumEngine {
    system: SystemModel,
    gamma: Vec<Interaction>,
    projections: Vec<Projection>,
    dominators: Vec<Vec<Dominator>>,
    state: GlobalState,
    rng: ChaCha8Rng,
    act_checks: u64,
    active: Vec<bool>,
}

impl EnumEngine {
    pub fn new(system: &SystemModel, seed: u64) -> Result<Self, ModelError> {
        let diagnostics = validate(system);
        if !diagnostics.is_empty() {
            return Err(ModelError::Invalid(diagnostics));
        }
        let gamma: Vec<Interaction> = system.gamma().iter().cloned().collect();
        let projections = gamma.iter().map(|a| system.split(a)).collect::<Result<Vec<_>, _>>()?;
        let index: HashMap<&Interaction, usize> = gamma.iter().enumerate().map(|(k, a)| (a, k)).collect();
        let mut dominators: Vec<Vec<Dominator>> = vec![Vec::new(); gamma.len()];
        match system.priority() {
            PriorityModel::MaximalProgress => {
                for (j, hi) in gamma.iter().enumerate() {
                    for k in strict_subsets_in(hi, &gamma, &index) {
                        dominators[k].push(Dominator::Listed(j));
                    }
                }
            }
            p @ PriorityModel::ExplicitPairs(_) => {
                for (lo, hi) in p.closure().unwrap_or_default() {
                    let Some(&k) = index.get(&lo) else { continue };
                    let dom = match index.get(&hi) {
                        Some(&j) => Dominator::Listed(j),
                        None => Dominator::Other(system.split(&hi)?),
                    };
                    dominators[k].push(dom);
                }
            }
        }
        let active = vec![false; gamma.len()];
        Ok(EnumEngine {
            state: system.initial_state(),
            system: system.clone(),
            gamma,
            projections,
            dominators,
            rng: ChaCha8Rng::seed_from_u64(seed),
            act_checks: 0,
            active,
        })
    }

    pub fn system(&self) -> &SystemModel {
        &self.system
    }

    /// The flattened interaction model.
    pub fn gamma(&self) -> &[Interaction] {
        &self.gamma
    }

    /// Number of interaction activity checks performed so far.
    pub fn act_checks(&self) -> u64 {
        self.act_checks
    }

    fn check(&mut self, state: &GlobalState, projection: &Projection) -> bool {
        self.act_checks += 1;
        let atoms = self.system.atoms();
        projection
            .iter()
            .all(|(i, label)| atoms[*i].is_active(state.0[*i], label))
    }

    /// Indices of the surviving interactions at `state`, in list order.
    fn survivor_indices(&mut self, state: &GlobalState) -> Vec<usize> {
        let mut active = std::mem::take(&mut self.active);
        for (k, slot) in active.iter_mut().enumerate() {
            let projection = std::mem::take(&mut self.projections[k]);
            *slot = self.check(state, &projection);
            self.projections[k] = projection;
        }
        let mut out = Vec::new();
        for k in 0..self.gamma.len() {
            if !active[k] {
                continue;
            }
            let dominators = std::mem::take(&mut self.dominators[k]);
            let dominated = dominators.iter().any(|d| match d {
                Dominator::Listed(j) => active[*j],
                Dominator::Other(p) => self.check(state, p),
            });
            self.dominators[k] = dominators;
            if !dominated {
                out.push(k);
            }
        }
        self.active = active;
        out
    }

    fn advance(&mut self, k: usize) -> GlobalState {
        let mut next = self.state.clone();
        let atoms = self.system.atoms();
        for (i, label) in &self.projections[k] {
            let from = self.state.0[*i];
            let count = atoms[*i].targets(from, label).count();
            let pick = if count > 1 { self.rng.random_range(0..count) } else { 0 };
            next.0[*i] = atoms[*i].targets(from, label).nth(pick).expect("survivor is active");
        }
        next
    }
}

/// Indices of the listed interactions that are strict subsets of `hi`.
fn strict_subsets_in(hi: &Interaction, gamma: &[Interaction], index: &HashMap<&Interaction, usize>) -> Vec<usize> {
    let ports = hi.ports();
    if ports.len() <= 16 {
        let full = (1u32 << ports.len()) - 1;
        (1..full)
            .filter_map(|mask| {
                let sub = Interaction::new(
                    ports
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| mask >> b & 1 == 1)
                        .map(|(_, p)| p.clone()),
                );
                index.get(&sub).copied()
            })
            .collect()
    } else {
        gamma
            .iter()
            .enumerate()
            .filter(|(_, lo)| lo.is_strict_subset(hi))
            .map(|(k, _)| k)
            .collect()
    }
}

impl Engine for EnumEngine {
    fn name(&self) -> &'static str {
        "enum"
    }

    fn state(&self) -> &GlobalState {
        &self.state
    }

    fn set_state(&mut self, state: GlobalState) -> Result<(), ModelError> {
        self.system.check_state(&state)?;
        self.state = state;
        Ok(())
    }

    fn survivors(&mut self, state: &GlobalState) -> Result<InteractionSet, ModelError> {
        self.system.check_state(state)?;
        Ok(self
            .survivor_indices(state)
            .into_iter()
            .map(|k| self.gamma[k].clone())
            .collect())
    }

    fn step(&mut self) -> Result<StepOutcome, ModelError> {
        let state = self.state.clone();
        let survivors = self.survivor_indices(&state);
        if survivors.is_empty() {
            return Ok(StepOutcome::Deadlock);
        }
        let k = survivors[self.rng.random_range(0..survivors.len())];
        let next = self.advance(k);
        self.state = next.clone();
        Ok(StepOutcome::Fired {
            interaction: self.gamma[k].clone(),
            next,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connector::AcTerm;
    use crate::engine::run;
    use crate::model::{AtomicBehavior, Connector};

    fn ring(n: usize) -> SystemModel {
        let atoms = (0..n)
            .map(|k| {
                let p = format!("p{k}");
                AtomicBehavior::new(
                    &format!("x{k}"),
                    &[p.as_str()],
                    &["a", "b"],
                    "a",
                    &[("a", vec![p.as_str()], "b"), ("b", vec![p.as_str()], "a")],
                )
                .unwrap()
            })
            .collect();
        let connectors = (0..n)
            .map(|k| Connector::new(format!("c{k}"), AcTerm::port(&format!("p{k}"))))
            .collect();
        SystemModel::new("ring", atoms, connectors, PriorityModel::MaximalProgress)
    }

    #[test]
    fn every_step_checks_every_listed_interaction() {
        for n in [1, 4, 9] {
            let mut e = EnumEngine::new(&ring(n), 3).unwrap();
            let trace = run(&mut e, 10).unwrap();
            assert_eq!(trace.len(), 10);
            assert_eq!(e.act_checks(), 10 * n as u64);
        }
    }

    #[test]
    fn empty_gamma_deadlocks() {
        let mut sys = ring(2);
        sys = SystemModel::new("bare", sys.atoms().to_vec(), vec![], PriorityModel::none());
        let mut e = EnumEngine::new(&sys, 0).unwrap();
        assert_eq!(e.step().unwrap(), StepOutcome::Deadlock);
        let trace = run(&mut e, 5).unwrap();
        assert!(trace.deadlocked && trace.is_empty());
    }

    #[test]
    fn zero_steps_is_an_empty_trace() {
        let mut e = EnumEngine::new(&ring(2), 0).unwrap();
        let trace = run(&mut e, 0).unwrap();
        assert!(trace.is_empty() && !trace.deadlocked);
    }

    #[test]
    fn seeded_runs_repeat() {
        let sys = ring(5);
        let a = run(&mut EnumEngine::new(&sys, 42).unwrap(), 50).unwrap();
        let b = run(&mut EnumEngine::new(&sys, 42).unwrap(), 50).unwrap();
        assert_eq!(a.steps, b.steps);
    }
}
