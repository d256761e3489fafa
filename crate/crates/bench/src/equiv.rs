//! Cross-engine equivalence: both engines must offer the same survivors at
//! every reachable state.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use bipsym_core::{
    successors, Engine, EnumEngine, GlobalState, InteractionSet, ModelError, SymbolicEngine, SystemEncoding,
    SystemModel,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub state: GlobalState,
    pub enumerative: InteractionSet,
    pub symbolic: InteractionSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// Number of states compared.
    pub states: usize,
    /// Set when the bound cut off part of the reachable state space.
    pub truncated: bool,
    pub divergences: Vec<Divergence>,
}

impl EquivalenceReport {
    pub fn is_equivalent(&self) -> bool {
        self.divergences.is_empty()
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_equivalent() {
            write!(f, "equivalent, {} states", self.states)?;
        } else {
            write!(f, "divergent at {} of {} states", self.divergences.len(), self.states)?;
        }
        if self.truncated {
            f.write_str(" (truncated)")?;
        }
        Ok(())
    }
}

fn render(set: &InteractionSet) -> String {
    let items: Vec<String> = set.iter().map(|a| format!("{{{a}}}")).collect();
    items.join(" ")
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "state {:?}: enum [{}] symbolic [{}]",
            self.state.0,
            render(&self.enumerative),
            render(&self.symbolic)
        )
    }
}

/// Compares the engines at up to `bound` states reachable from the initial one.
pub fn check_equivalence(system: &SystemModel, bound: usize) -> Result<EquivalenceReport, ModelError> {
    check_encoding(system, SystemEncoding::build(system)?, bound)
}

/// As [`check_equivalence`], with a caller-supplied encoding for the symbolic
/// side.
pub fn check_encoding(
    system: &SystemModel,
    encoding: SystemEncoding,
    bound: usize,
) -> Result<EquivalenceReport, ModelError> {
    let mut enumerative = EnumEngine::new(system, 0)?;
    let mut symbolic = SymbolicEngine::from_encoding(encoding, 0);
    let init = system.initial_state();
    let mut seen: HashSet<GlobalState> = HashSet::from([init.clone()]);
    let mut queue = VecDeque::from([init]);
    let mut report = EquivalenceReport {
        states: 0,
        truncated: false,
        divergences: Vec::new(),
    };
    while let Some(state) = queue.pop_front() {
        report.states += 1;
        let e = enumerative.survivors(&state)?;
        let s = symbolic.survivors(&state)?;
        for a in e.union(&s) {
            for next in successors(system, &state, a)? {
                if seen.contains(&next) {
                    continue;
                }
                if seen.len() >= bound {
                    report.truncated = true;
                    continue;
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
        if e != s {
            report.divergences.push(Divergence {
                state,
                enumerative: e,
                symbolic: s,
            });
        }
    }
    Ok(report)
}
