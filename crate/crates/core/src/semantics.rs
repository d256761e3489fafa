//! Reference operational semantics: activity, enabledness, priority filtering,
//! single steps and bounded reachability.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connector::InteractionSet;
use crate::error::ModelError;
use crate::model::{GlobalState, Interaction, PriorityModel, SystemModel};

/// Whether every atom touched by `a` can perform exactly `a ∩ Pᵢ` from its
/// current state. The empty interaction is always active.
pub fn act(system: &SystemModel, state: &GlobalState, a: &Interaction) -> Result<bool, ModelError> {
    let parts = system.split(a)?;
    Ok(parts
        .iter()
        .all(|(i, label)| system.atoms()[*i].is_active(state.0[*i], label)))
}

fn active(system: &SystemModel, state: &GlobalState, a: &Interaction) -> bool {
    act(system, state, a).unwrap_or(false)
}

/// Interactions of the interaction model that are active in `state`.
pub fn enabled(system: &SystemModel, state: &GlobalState) -> InteractionSet {
    system
        .gamma()
        .iter()
        .filter(|a| active(system, state, a))
        .cloned()
        .collect()
}

/// Drops every interaction that has an active strict dominator.
///
/// With explicit pairs the dominators are the upper elements of the
/// transitively closed pairs; with maximal progress they are the strict
/// supersets found in the interaction model.
pub fn filter_priority(system: &SystemModel, state: &GlobalState, enabled: &InteractionSet) -> InteractionSet {
    match system.priority() {
        PriorityModel::MaximalProgress => {
            let gamma = system.gamma();
            enabled
                .iter()
                .filter(|a| !gamma.iter().any(|b| a.is_strict_subset(b) && active(system, state, b)))
                .cloned()
                .collect()
        }
        p @ PriorityModel::ExplicitPairs(_) => {
            let closure = p.closure().unwrap_or_default();
            enabled
                .iter()
                .filter(|a| !closure.iter().any(|(lo, hi)| lo == *a && active(system, state, hi)))
                .cloned()
                .collect()
        }
    }
}

/// Enabled interactions that survive priority filtering.
pub fn survivors(system: &SystemModel, state: &GlobalState) -> InteractionSet {
    filter_priority(system, state, &enabled(system, state))
}

/// Every global state reachable by executing `a` from `state`.
pub fn successors(system: &SystemModel, state: &GlobalState, a: &Interaction) -> Result<Vec<GlobalState>, ModelError> {
    let mut out = vec![state.clone()];
    for (i, label) in system.split(a)? {
        let targets: Vec<usize> = system.atoms()[i].targets(state.0[i], &label).collect();
        if targets.is_empty() {
            return Ok(Vec::new());
        }
        out = out
            .into_iter()
            .flat_map(|s| {
                targets.iter().map(move |&t| {
                    let mut next = s.clone();
                    next.0[i] = t;
                    next
                })
            })
            .collect();
    }
    Ok(out)
}

/// Advances every atom touched by `a` along its `a ∩ Pᵢ` transition, choosing
/// uniformly with `rng` among several targets.
pub fn step_with<R: Rng + ?Sized>(
    system: &SystemModel,
    state: &GlobalState,
    a: &Interaction,
    rng: &mut R,
) -> Result<GlobalState, ModelError> {
    system.check_state(state)?;
    if !a.is_empty() && !system.gamma().contains(a) {
        return Err(ModelError::NotEnabled(a.to_string()));
    }
    let mut next = state.clone();
    for (i, label) in system.split(a)? {
        let targets: Vec<usize> = system.atoms()[i].targets(state.0[i], &label).collect();
        next.0[i] = match targets.as_slice() {
            [] => return Err(ModelError::NotEnabled(a.to_string())),
            [only] => *only,
            many => many[rng.random_range(0..many.len())],
        };
    }
    Ok(next)
}

/// [`step_with`] using a generator seeded from `seed`.
pub fn step(system: &SystemModel, state: &GlobalState, a: &Interaction, seed: u64) -> Result<GlobalState, ModelError> {
    step_with(system, state, a, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reachable {
    /// In breadth-first discovery order, initial state first.
    pub states: Vec<GlobalState>,
    /// Set when exploration stopped at the bound with unexplored successors left.
    pub truncated: bool,
}

impl Reachable {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn as_set(&self) -> BTreeSet<GlobalState> {
        self.states.iter().cloned().collect()
    }
}

/// Breadth-first closure from the initial state under the priority-filtered
/// enabled interactions, stopping after `bound` states.
pub fn reachable(system: &SystemModel, bound: usize) -> Reachable {
    let init = system.initial_state();
    let mut seen: HashSet<GlobalState> = HashSet::from([init.clone()]);
    let mut states = vec![init.clone()];
    let mut queue = VecDeque::from([init]);
    let mut truncated = false;
    while let Some(s) = queue.pop_front() {
        for a in survivors(system, &s) {
            for next in successors(system, &s, &a).unwrap_or_default() {
                if seen.contains(&next) {
                    continue;
                }
                if states.len() >= bound {
                    truncated = true;
                    continue;
                }
                seen.insert(next.clone());
                states.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Reachable { states, truncated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connector::AcTerm;
    use crate::model::{AtomicBehavior, Connector};

    fn i(ps: &[&str]) -> Interaction {
        Interaction::new(ps.iter().copied())
    }

    fn toggle(name: &str, port: &str) -> AtomicBehavior {
        AtomicBehavior::new(
            name,
            &[port],
            &["a", "b"],
            "a",
            &[("a", vec![port], "b"), ("b", vec![port], "a")],
        )
        .unwrap()
    }

    #[test]
    fn empty_interaction_is_identity() {
        let sys = SystemModel::new("s", vec![toggle("x", "p")], vec![], PriorityModel::none());
        let s = sys.initial_state();
        assert!(act(&sys, &s, &Interaction::empty()).unwrap());
        assert_eq!(step(&sys, &s, &Interaction::empty(), 0).unwrap(), s);
    }

    #[test]
    fn no_connectors_means_nothing_enabled() {
        let sys = SystemModel::new("s", vec![toggle("x", "p")], vec![], PriorityModel::none());
        assert!(enabled(&sys, &sys.initial_state()).is_empty());
        let r = reachable(&sys, 10);
        assert_eq!(r.states, vec![sys.initial_state()]);
        assert!(!r.truncated);
    }

    #[test]
    fn bound_one_truncates() {
        let sys = SystemModel::new(
            "s",
            vec![toggle("x", "p")],
            vec![Connector::new("c", AcTerm::port("p"))],
            PriorityModel::none(),
        );
        let r = reachable(&sys, 1);
        assert_eq!(r.len(), 1);
        assert!(r.truncated);
        assert_eq!(reachable(&sys, 10).len(), 2);
    }

    #[test]
    fn foreign_port_is_an_input_error() {
        let sys = SystemModel::new("s", vec![toggle("x", "p")], vec![], PriorityModel::none());
        assert!(matches!(
            act(&sys, &sys.initial_state(), &i(&["zz"])),
            Err(ModelError::ForeignPort(_))
        ));
    }

    #[test]
    fn stepping_a_disabled_interaction_fails() {
        let atom = AtomicBehavior::new("x", &["p", "q"], &["a", "b"], "a", &[("a", vec!["p"], "b")]).unwrap();
        let sys = SystemModel::new(
            "s",
            vec![atom],
            vec![Connector::new("c", AcTerm::port("q"))],
            PriorityModel::none(),
        );
        assert!(matches!(
            step(&sys, &sys.initial_state(), &i(&["q"]), 0),
            Err(ModelError::NotEnabled(_))
        ));
    }

    #[test]
    fn nondeterministic_targets_are_all_reached() {
        let atom = AtomicBehavior::new(
            "x",
            &["p"],
            &["a", "b", "c"],
            "a",
            &[("a", vec!["p"], "b"), ("a", vec!["p"], "c")],
        )
        .unwrap();
        let sys = SystemModel::new(
            "s",
            vec![atom],
            vec![Connector::new("c", AcTerm::port("p"))],
            PriorityModel::none(),
        );
        let init = sys.initial_state();
        let picks: BTreeSet<GlobalState> = (0..64)
            .map(|seed| step(&sys, &init, &i(&["p"]), seed).unwrap())
            .collect();
        assert_eq!(picks.len(), 2);
        assert_eq!(reachable(&sys, 10).len(), 3);
    }
}
