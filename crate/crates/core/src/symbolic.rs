//! Boolean encoding of a system and the symbolic engine built on it.
//!
//! Every control state is a variable (one-hot), every port `p` is a variable
//! and has a primed twin `p'` used to describe the dominating interaction of a
//! priority pair. Variables are ordered atom by atom: the atom's state
//! variables first, then each of its ports immediately followed by its twin.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bipsym_bdd::{Bdd, BddError, BddManager, Mark, Var, VarOrder};

use crate::causal::{causal_rules, rules_to_formula, tau};
use crate::connector::{AcTerm, InteractionSet};
use crate::engine::{Engine, StepOutcome};
use crate::error::ModelError;
use crate::model::{validate, AtomicBehavior, GlobalState, Interaction, Port, PriorityModel, SystemModel};

pub fn state_var_name(atom: &AtomicBehavior, state: usize) -> String {
    format!("{}.{}", atom.name(), atom.states()[state])
}

pub fn primed_name(port: &Port) -> String {
    format!("{}'", port.name())
}

pub fn variable_order(system: &SystemModel) -> Result<VarOrder, BddError> {
    let mut names = Vec::new();
    for atom in system.atoms() {
        names.extend((0..atom.states().len()).map(|q| state_var_name(atom, q)));
        for p in atom.ports() {
            names.push(p.name().to_string());
            names.push(primed_name(p));
        }
    }
    VarOrder::new(names)
}

fn port_var(mgr: &BddManager, p: &Port, primed: bool) -> Result<Var, BddError> {
    if primed {
        mgr.var_by_name(&primed_name(p))
    } else {
        mgr.var_by_name(p.name())
    }
}

/// `⋁_q [q ∧ ⋀_{q'≠q} ¬q' ∧ ⋁_{q -a->} minterm(a)] ∨ ⋀_p ¬p`, over the atom's
/// state variables and its plain or primed port variables.
pub fn encode_atom(mgr: &mut BddManager, atom: &AtomicBehavior, primed: bool) -> Result<Bdd, BddError> {
    let states = (0..atom.states().len())
        .map(|q| mgr.var_by_name(&state_var_name(atom, q)))
        .collect::<Result<Vec<_>, _>>()?;
    let ports = atom
        .ports()
        .iter()
        .map(|p| port_var(mgr, p, primed))
        .collect::<Result<Vec<_>, _>>()?;
    let idle_lits: Vec<(Var, bool)> = ports.iter().map(|&v| (v, false)).collect();
    let mut disjuncts = vec![mgr.cube(&idle_lits)];
    for (q, _) in states.iter().enumerate() {
        let labels: Vec<Bdd> = atom
            .transitions()
            .iter()
            .filter(|t| t.from == q)
            .map(|t| {
                let lits: Vec<(Var, bool)> = atom
                    .ports()
                    .iter()
                    .zip(&ports)
                    .map(|(p, &v)| (v, t.label.contains(p)))
                    .collect();
                mgr.cube(&lits)
            })
            .collect();
        if labels.is_empty() {
            continue;
        }
        let moves = mgr.or_all(labels);
        let one_hot: Vec<(Var, bool)> = states.iter().enumerate().map(|(k, &v)| (v, k == q)).collect();
        let at_q = mgr.cube(&one_hot);
        disjuncts.push(mgr.and(at_q, moves));
    }
    Ok(mgr.or_all(disjuncts))
}

/// Conjunction of the atom encodings.
pub fn encode_behavior(mgr: &mut BddManager, system: &SystemModel, primed: bool) -> Result<Bdd, BddError> {
    let parts = system
        .atoms()
        .iter()
        .map(|a| encode_atom(mgr, a, primed))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(mgr.and_all(parts))
}

/// Characteristic function of one connector, from its causal rules.
pub fn encode_connector(mgr: &mut BddManager, term: &AcTerm) -> Result<Bdd, BddError> {
    rules_to_formula(mgr, &causal_rules(&tau(term)), &term.support())
}

/// `⋁ᵢ (f_Cᵢ ∧ ⋀_{p ∉ Cᵢ} ¬p)` with `p` ranging over `universe`.
pub fn encode_connectors(mgr: &mut BddManager, terms: &[&AcTerm], universe: &[Port]) -> Result<Bdd, BddError> {
    let mut disjuncts = Vec::with_capacity(terms.len());
    for term in terms {
        let support = term.support();
        let mut outside = Vec::new();
        for p in universe.iter().filter(|p| !support.contains(*p)) {
            outside.push((port_var(mgr, p, false)?, false));
        }
        let f = encode_connector(mgr, term)?;
        let silent = mgr.cube(&outside);
        disjuncts.push(mgr.and(f, silent));
    }
    Ok(mgr.or_all(disjuncts))
}

/// Priority pairs to encode: the closed explicit pairs, or every strict
/// inclusion inside `gamma` for maximal progress.
pub fn priority_pairs(priority: &PriorityModel, gamma: &InteractionSet) -> Vec<(Interaction, Interaction)> {
    match priority {
        PriorityModel::ExplicitPairs(_) => priority.closure().unwrap_or_default().into_iter().collect(),
        PriorityModel::MaximalProgress => {
            let mut pairs = Vec::new();
            for hi in gamma {
                let ports = hi.ports();
                if ports.len() <= 16 {
                    let full = (1u32 << ports.len()) - 1;
                    for mask in 1..full {
                        let lo = Interaction::new(
                            ports
                                .iter()
                                .enumerate()
                                .filter(|(b, _)| mask >> b & 1 == 1)
                                .map(|(_, p)| p.clone()),
                        );
                        if gamma.contains(&lo) {
                            pairs.push((lo, hi.clone()));
                        }
                    }
                } else {
                    pairs.extend(
                        gamma
                            .iter()
                            .filter(|lo| lo.is_strict_subset(hi))
                            .map(|lo| (lo.clone(), hi.clone())),
                    );
                }
            }
            pairs.sort();
            pairs
        }
    }
}

/// `⋁_{a ≺ a'} minterm(a) ∧ minterm'(a')`, minterms taken over `universe` and
/// its primed copy.
pub fn encode_priority(
    mgr: &mut BddManager,
    priority: &PriorityModel,
    gamma: &InteractionSet,
    universe: &[Port],
) -> Result<Bdd, BddError> {
    let plain = universe
        .iter()
        .map(|p| port_var(mgr, p, false))
        .collect::<Result<Vec<_>, _>>()?;
    let primed = universe
        .iter()
        .map(|p| port_var(mgr, p, true))
        .collect::<Result<Vec<_>, _>>()?;
    let mut disjuncts = Vec::new();
    for (lo, hi) in priority_pairs(priority, gamma) {
        let mut lits = Vec::with_capacity(2 * universe.len());
        for (k, p) in universe.iter().enumerate() {
            lits.push((plain[k], lo.contains(p)));
            lits.push((primed[k], hi.contains(p)));
        }
        disjuncts.push(mgr.cube(&lits));
    }
    Ok(mgr.or_all(disjuncts))
}

/// Node counts of the encoded functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EncodingStats {
    pub variables: usize,
    pub fb_nodes: usize,
    pub fc_nodes: usize,
    pub fs_nodes: usize,
    pub fp_nodes: usize,
    pub fpb_nodes: usize,
}

/// All functions the symbolic engine needs, owned together with their manager.
#[derive(Debug)]
pub struct SystemEncoding {
    system: SystemModel,
    mgr: BddManager,
    state_vars: Vec<Vec<Var>>,
    ports: Vec<Port>,
    port_vars: Vec<Var>,
    primed_vars: Vec<Var>,
    port_index: HashMap<Port, usize>,
    f_b: Bdd,
    f_c: Bdd,
    f_s: Bdd,
    f_p: Bdd,
    f_pb: Bdd,
    base: Mark,
}

impl SystemEncoding {
    pub fn build(system: &SystemModel) -> Result<Self, ModelError> {
        let diagnostics = validate(system);
        if !diagnostics.is_empty() {
            return Err(ModelError::Invalid(diagnostics));
        }
        let mut mgr = BddManager::new(variable_order(system)?);
        let state_vars = system
            .atoms()
            .iter()
            .map(|a| {
                (0..a.states().len())
                    .map(|q| mgr.var_by_name(&state_var_name(a, q)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ports: Vec<Port> = system.ports().cloned().collect();
        let port_vars = ports
            .iter()
            .map(|p| port_var(&mgr, p, false))
            .collect::<Result<Vec<_>, _>>()?;
        let primed_vars = ports
            .iter()
            .map(|p| port_var(&mgr, p, true))
            .collect::<Result<Vec<_>, _>>()?;
        let port_index = ports.iter().enumerate().map(|(k, p)| (p.clone(), k)).collect();

        let f_b = encode_behavior(&mut mgr, system, false)?;
        let terms: Vec<&AcTerm> = system.connectors().iter().map(|c| &c.term).collect();
        let f_c = encode_connectors(&mut mgr, &terms, &ports)?;
        let f_s = mgr.and(f_b, f_c);
        let gamma = match system.priority() {
            PriorityModel::MaximalProgress => system.gamma().clone(),
            PriorityModel::ExplicitPairs(_) => InteractionSet::new(),
        };
        let f_p = encode_priority(&mut mgr, system.priority(), &gamma, &ports)?;
        let f_pb = if f_p.is_false() {
            f_p
        } else {
            let f_b_primed = encode_behavior(&mut mgr, system, true)?;
            mgr.and(f_p, f_b_primed)
        };
        // Intermediate results of the build are dropped so that per-step work
        // only sees the nodes of the kept functions.
        let [f_b, f_c, f_s, f_p, f_pb] = mgr.compact(&[f_b, f_c, f_s, f_p, f_pb])?[..] else {
            unreachable!("one handle per root")
        };
        let base = mgr.mark();
        Ok(SystemEncoding {
            system: system.clone(),
            mgr,
            state_vars,
            ports,
            port_vars,
            primed_vars,
            port_index,
            f_b,
            f_c,
            f_s,
            f_p,
            f_pb,
            base,
        })
    }

    pub fn system(&self) -> &SystemModel {
        &self.system
    }

    pub fn manager(&self) -> &BddManager {
        &self.mgr
    }

    pub fn f_b(&self) -> Bdd {
        self.f_b
    }

    pub fn f_c(&self) -> Bdd {
        self.f_c
    }

    pub fn f_s(&self) -> Bdd {
        self.f_s
    }

    pub fn f_p(&self) -> Bdd {
        self.f_p
    }

    /// `f_P ∧ f_B[x'/x]`.
    pub fn f_pb(&self) -> Bdd {
        self.f_pb
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn port_vars(&self) -> &[Var] {
        &self.port_vars
    }

    pub fn primed_vars(&self) -> &[Var] {
        &self.primed_vars
    }

    pub fn state_vars(&self) -> &[Vec<Var>] {
        &self.state_vars
    }

    pub fn stats(&self) -> EncodingStats {
        EncodingStats {
            variables: self.mgr.var_count(),
            fb_nodes: self.mgr.node_count(self.f_b),
            fc_nodes: self.mgr.node_count(self.f_c),
            fs_nodes: self.mgr.node_count(self.f_s),
            fp_nodes: self.mgr.node_count(self.f_p),
            fpb_nodes: self.mgr.node_count(self.f_pb),
        }
    }

    /// Replaces the connector function with one built by `build` and recomputes
    /// `f_S`. Meant for fault-injection tests.
    pub fn replace_connectors<F>(&mut self, build: F) -> Result<(), ModelError>
    where
        F: FnOnce(&mut BddManager, Bdd) -> Result<Bdd, BddError>,
    {
        self.mgr.rollback(self.base);
        let f_c = build(&mut self.mgr, self.f_c)?;
        self.mgr.check_handle(f_c)?;
        self.f_c = f_c;
        self.f_s = self.mgr.and(self.f_b, f_c);
        self.base = self.mgr.mark();
        Ok(())
    }

    /// The literal assignment fixing every state variable: current states true,
    /// all others false.
    pub fn state_literals(&self, state: &GlobalState) -> Result<Vec<(Var, bool)>, ModelError> {
        self.system.check_state(state)?;
        Ok(self
            .state_vars
            .iter()
            .zip(&state.0)
            .flat_map(|(vars, &q)| vars.iter().enumerate().map(move |(k, &v)| (v, k == q)))
            .collect())
    }

    pub fn interaction_of(&self, valuation: &[bool]) -> Interaction {
        Interaction::new(
            self.ports
                .iter()
                .zip(&self.port_vars)
                .filter(|(_, v)| valuation[v.level()])
                .map(|(p, _)| p.clone()),
        )
    }

    /// Port valuations allowed by `f_S` at `state`.
    fn restricted(&mut self, lits: &[(Var, bool)]) -> Result<Bdd, ModelError> {
        Ok(self.mgr.restrict_cube(self.f_s, lits)?)
    }

    /// Drops the valuations that have an active priority dominator.
    fn filtered(&mut self, lits: &[(Var, bool)], r: Bdd) -> Result<Bdd, ModelError> {
        if self.f_pb.is_false() {
            return Ok(r);
        }
        let dominated = self.mgr.restrict_exists(self.f_pb, lits, &self.primed_vars)?;
        Ok(self.mgr.diff(r, dominated))
    }

    fn to_set(&self, f: Bdd) -> Result<InteractionSet, ModelError> {
        let models = self.mgr.sat_assignments(f, &self.port_vars)?;
        Ok(models
            .into_iter()
            .map(|m| Interaction::new(self.ports.iter().zip(m).filter(|(_, v)| *v).map(|(p, _)| p.clone())))
            .collect())
    }

    /// Interactions satisfying `f_S` at `state`, before priorities.
    pub fn enabled_set(&mut self, state: &GlobalState) -> Result<InteractionSet, ModelError> {
        let lits = self.state_literals(state)?;
        let r = self.restricted(&lits);
        let out = r.and_then(|r| self.to_set(r));
        self.mgr.rollback(self.base);
        out
    }

    /// Interactions surviving the priority filter at `state`.
    pub fn survivor_set(&mut self, state: &GlobalState) -> Result<InteractionSet, ModelError> {
        let lits = self.state_literals(state)?;
        let out = self
            .restricted(&lits)
            .and_then(|r| self.filtered(&lits, r))
            .and_then(|f| self.to_set(f));
        self.mgr.rollback(self.base);
        out
    }

    /// Picks a surviving interaction at `state`, or `None` on deadlock. With
    /// `greedy`, priorities are not consulted; instead the pick is extended to
    /// a maximal enabled interaction.
    pub fn choose<R: Rng + ?Sized>(
        &mut self,
        state: &GlobalState,
        greedy: bool,
        rng: &mut R,
    ) -> Result<Option<Interaction>, ModelError> {
        let lits = self.state_literals(state)?;
        let out = self.choose_inner(&lits, greedy, rng);
        self.mgr.rollback(self.base);
        out
    }

    fn choose_inner<R: Rng + ?Sized>(
        &mut self,
        lits: &[(Var, bool)],
        greedy: bool,
        rng: &mut R,
    ) -> Result<Option<Interaction>, ModelError> {
        let r = self.restricted(lits)?;
        if greedy {
            let Some(first) = self.mgr.pick_sat_with(r, rng) else {
                return Ok(None);
            };
            let picked: Vec<(Var, bool)> = self
                .port_vars
                .iter()
                .filter(|v| first[v.level()])
                .map(|&v| (v, true))
                .collect();
            let seed = self.mgr.cube(&picked);
            let mut g = self.mgr.and(r, seed);
            for k in 0..self.port_vars.len() {
                let v = self.port_vars[k];
                if first[v.level()] {
                    continue;
                }
                let lit = self.mgr.literal(v, true);
                let wider = self.mgr.and(g, lit);
                if !wider.is_false() {
                    g = wider;
                }
            }
            return Ok(self.mgr.pick_sat_with(g, rng).map(|m| self.interaction_of(&m)));
        }
        let survivors = self.filtered(lits, r)?;
        Ok(self.mgr.pick_sat_with(survivors, rng).map(|m| self.interaction_of(&m)))
    }

    /// Index of `p` in [`ports`](Self::ports).
    pub fn port_position(&self, p: &Port) -> Option<usize> {
        self.port_index.get(p).copied()
    }
}

/// The symbolic engine: each step restricts the precomputed functions by the
/// current state and picks a valuation of the port variables.
#[derive(Debug)]
pub struct SymbolicEngine {
    enc: SystemEncoding,
    state: GlobalState,
    rng: ChaCha8Rng,
    greedy: bool,
}

impl SymbolicEngine {
    pub fn new(system: &SystemModel, seed: u64) -> Result<Self, ModelError> {
        Ok(Self::from_encoding(SystemEncoding::build(system)?, seed))
    }

    pub fn from_encoding(enc: SystemEncoding, seed: u64) -> Self {
        SymbolicEngine {
            state: enc.system().initial_state(),
            enc,
            rng: ChaCha8Rng::seed_from_u64(seed),
            greedy: false,
        }
    }

    /// Enables the greedy maximal-extension choice. Only meaningful under
    /// maximal progress, where it picks from the same survivor set.
    pub fn with_greedy(mut self, greedy: bool) -> Self {
        self.greedy = greedy;
        self
    }

    pub fn encoding(&self) -> &SystemEncoding {
        &self.enc
    }

    pub fn encoding_mut(&mut self) -> &mut SystemEncoding {
        &mut self.enc
    }

    /// Pre-priority enabled set at `state`.
    pub fn enabled(&mut self, state: &GlobalState) -> Result<InteractionSet, ModelError> {
        self.enc.enabled_set(state)
    }
}

impl Engine for SymbolicEngine {
    fn name(&self) -> &'static str {
        "symbolic"
    }

    fn state(&self) -> &GlobalState {
        &self.state
    }

    fn set_state(&mut self, state: GlobalState) -> Result<(), ModelError> {
        self.enc.system().check_state(&state)?;
        self.state = state;
        Ok(())
    }

    fn survivors(&mut self, state: &GlobalState) -> Result<InteractionSet, ModelError> {
        self.enc.survivor_set(state)
    }

    fn step(&mut self) -> Result<StepOutcome, ModelError> {
        let state = self.state.clone();
        let Some(a) = self.enc.choose(&state, self.greedy, &mut self.rng)? else {
            return Ok(StepOutcome::Deadlock);
        };
        let system = self.enc.system();
        let mut next = state.clone();
        for (i, label) in system.split(&a)? {
            let atom = &system.atoms()[i];
            let count = atom.targets(state.0[i], &label).count();
            let pick = match count {
                0 => return Err(ModelError::NotEnabled(a.to_string())),
                1 => 0,
                n => self.rng.random_range(0..n),
            };
            next.0[i] = atom.targets(state.0[i], &label).nth(pick).expect("counted");
        }
        self.state = next.clone();
        Ok(StepOutcome::Fired { interaction: a, next })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Connector;

    fn modulo2(name: &str, p: &str, q: &str, l1: &str, l2: &str) -> AtomicBehavior {
        AtomicBehavior::new(name, &[p, q], &[l1, l2], l1, &[(l1, vec![p], l2), (l2, vec![p, q], l1)]).unwrap()
    }

    #[test]
    fn modulo2_atom_matches_hand_expansion() {
        let atom = modulo2("b1", "p", "q", "l1", "l2");
        let sys = SystemModel::new("m", vec![atom.clone()], vec![], PriorityModel::none());
        let mut m = BddManager::new(variable_order(&sys).unwrap());
        let f = encode_atom(&mut m, &atom, false).unwrap();
        let l1 = m.var_by_name("b1.l1").unwrap();
        let l2 = m.var_by_name("b1.l2").unwrap();
        let p = m.var_by_name("p").unwrap();
        let q = m.var_by_name("q").unwrap();
        let a = m.cube(&[(l1, true), (l2, false), (p, true), (q, false)]);
        let b = m.cube(&[(l1, false), (l2, true), (p, true), (q, true)]);
        let idle = m.cube(&[(p, false), (q, false)]);
        let expected = m.or_all([a, b, idle]);
        assert_eq!(f, expected);
    }

    #[test]
    fn atom_without_transitions_is_idle_only() {
        let atom = AtomicBehavior::new("x", &["p", "q"], &["a", "b"], "a", &[]).unwrap();
        let sys = SystemModel::new("m", vec![atom.clone()], vec![], PriorityModel::none());
        let mut m = BddManager::new(variable_order(&sys).unwrap());
        let f = encode_atom(&mut m, &atom, false).unwrap();
        let p = m.var_by_name("p").unwrap();
        let q = m.var_by_name("q").unwrap();
        assert_eq!(f, m.cube(&[(p, false), (q, false)]));
    }

    #[test]
    fn two_singleton_connectors() {
        let mut m = BddManager::with_vars(["c1", "c2"]).unwrap();
        let t1 = AcTerm::port("c1");
        let t2 = AcTerm::port("c2");
        let universe = [Port::new("c1"), Port::new("c2")];
        let f = encode_connectors(&mut m, &[&t1, &t2], &universe).unwrap();
        let (a, b) = (m.var_by_name("c1").unwrap(), m.var_by_name("c2").unwrap());
        let l = m.cube(&[(a, true), (b, false)]);
        let r = m.cube(&[(a, false), (b, true)]);
        assert_eq!(f, m.or(l, r));
        assert!(encode_connectors(&mut m, &[], &universe).unwrap().is_false());
    }

    #[test]
    fn explicit_pair_expansion() {
        let mut m = BddManager::with_vars(["s", "s'", "r1", "r1'"]).unwrap();
        let universe = [Port::new("s"), Port::new("r1")];
        let lo = Interaction::new(["s"]);
        let hi = Interaction::new(["s", "r1"]);
        let pr = PriorityModel::ExplicitPairs(vec![(lo, hi)]);
        let f = encode_priority(&mut m, &pr, &InteractionSet::new(), &universe).unwrap();
        let v: Vec<Var> = m.vars().collect();
        let expected = m.cube(&[(v[0], true), (v[1], true), (v[2], false), (v[3], true)]);
        assert_eq!(f, expected);
        let none = encode_priority(&mut m, &PriorityModel::none(), &InteractionSet::new(), &universe).unwrap();
        assert!(none.is_false());
    }

    #[test]
    fn maximal_progress_pairs_stay_inside_gamma() {
        let gamma: InteractionSet = [Interaction::new(["s"]), Interaction::new(["s", "r1", "r2", "r3"])].into();
        let pairs = priority_pairs(&PriorityModel::MaximalProgress, &gamma);
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn orphan_port_deadlocks() {
        let atom = AtomicBehavior::new("x", &["p"], &["a"], "a", &[("a", vec!["p"], "a")]).unwrap();
        let sys = SystemModel::new("m", vec![atom], vec![], PriorityModel::none());
        let mut e = SymbolicEngine::new(&sys, 0).unwrap();
        assert_eq!(e.step().unwrap(), StepOutcome::Deadlock);
    }

    #[test]
    fn scratch_nodes_are_released_after_each_step() {
        let atom = modulo2("b1", "p", "q", "l1", "l2");
        let sys = SystemModel::new(
            "m",
            vec![atom],
            vec![Connector::new("c", AcTerm::port("p"))],
            PriorityModel::MaximalProgress,
        );
        let mut e = SymbolicEngine::new(&sys, 0).unwrap();
        let size = e.encoding().manager().store_size();
        for _ in 0..20 {
            e.step().unwrap();
        }
        assert_eq!(e.encoding().manager().store_size(), size);
        e.encoding().manager().audit().unwrap();
    }
}
