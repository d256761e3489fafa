//! Operational semantics against brute-force oracles on small random systems.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use bipsym_core::{
    act, enabled, filter_priority, reachable, run, step, successors, survivors, validate, EnumEngine, GlobalState,
    Interaction, InteractionSet, PriorityModel, SymbolicEngine, SystemEncoding, SystemModel,
};
use common::random_system;
use proptest::prelude::*;

fn all_states(sys: &SystemModel) -> Vec<GlobalState> {
    let mut out = vec![GlobalState(vec![])];
    for atom in sys.atoms() {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..atom.states().len()).map(move |q| {
                    let mut next = s.clone();
                    next.0.push(q);
                    next
                })
            })
            .collect();
    }
    out
}

/// Transitions of the product automaton from `state`: every combination of
/// one move or idling per atom, kept when the joint label belongs to γ.
fn product_moves(sys: &SystemModel, state: &GlobalState) -> BTreeMap<Interaction, BTreeSet<GlobalState>> {
    let mut partial: Vec<(Interaction, GlobalState)> = vec![(Interaction::empty(), state.clone())];
    for (i, atom) in sys.atoms().iter().enumerate() {
        let mut next = Vec::new();
        for (label, s) in &partial {
            next.push((label.clone(), s.clone()));
            for t in atom.transitions().iter().filter(|t| t.from == state.0[i]) {
                let mut moved = s.clone();
                moved.0[i] = t.to;
                next.push((label.union(&t.label), moved));
            }
        }
        partial = next;
    }
    let mut out: BTreeMap<Interaction, BTreeSet<GlobalState>> = BTreeMap::new();
    for (label, s) in partial {
        if sys.gamma().contains(&label) {
            out.entry(label).or_default().insert(s);
        }
    }
    out
}

fn dominators<'a>(sys: &'a SystemModel, a: &'a Interaction) -> Vec<Interaction> {
    match sys.priority() {
        PriorityModel::MaximalProgress => sys.gamma().iter().filter(|b| a.is_strict_subset(b)).cloned().collect(),
        p @ PriorityModel::ExplicitPairs(_) => p
            .closure()
            .unwrap_or_default()
            .into_iter()
            .filter(|(lo, _)| lo == a)
            .map(|(_, hi)| hi)
            .collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn product_automaton_agrees(seed: u64) {
        let sys = random_system(seed, 3, 3, 2);
        prop_assert!(validate(&sys).is_empty(), "{:?}", validate(&sys));
        for s in all_states(&sys) {
            let moves = product_moves(&sys, &s);
            let labels: InteractionSet = moves.keys().cloned().collect();
            prop_assert_eq!(enabled(&sys, &s), labels);
            for (a, targets) in &moves {
                let got: BTreeSet<GlobalState> = successors(&sys, &s, a).unwrap().into_iter().collect();
                prop_assert_eq!(&got, targets);
                prop_assert!(targets.contains(&step(&sys, &s, a, seed).unwrap()));
            }
        }
    }

    #[test]
    fn activity_decomposes_per_atom(seed: u64, mask: u32) {
        let sys = random_system(seed, 3, 3, 2);
        let ports: Vec<_> = sys.ports().cloned().collect();
        let a = Interaction::new(ports.iter().enumerate().filter(|(k, _)| mask >> (k % 32) & 1 == 1).map(|(_, p)| p.clone()));
        for s in all_states(&sys) {
            let expected = sys.atoms().iter().enumerate().all(|(i, atom)| {
                let part = a.restrict_to(atom.ports());
                part.is_empty() || atom.transitions().iter().any(|t| t.from == s.0[i] && t.label == part)
            });
            prop_assert_eq!(act(&sys, &s, &a).unwrap(), expected);
            prop_assert_eq!(step(&sys, &s, &Interaction::empty(), seed).unwrap(), s.clone());
        }
    }

    #[test]
    fn survivors_are_maximal_and_exist(seed: u64) {
        let sys = random_system(seed, 3, 3, 2);
        for s in all_states(&sys) {
            let en = enabled(&sys, &s);
            let kept = filter_priority(&sys, &s, &en);
            prop_assert!(kept.is_subset(&en));
            prop_assert!(en.is_empty() || !kept.is_empty());
            for a in &en {
                let dominated = dominators(&sys, a).iter().any(|b| act(&sys, &s, b).unwrap_or(false));
                prop_assert_eq!(kept.contains(a), !dominated, "{:?}", a);
            }
        }
    }

    #[test]
    fn symbolic_sets_match_at_every_state(seed: u64) {
        let sys = random_system(seed, 3, 3, 2);
        let mut enc = SystemEncoding::build(&sys).unwrap();
        for s in all_states(&sys) {
            prop_assert_eq!(enc.enabled_set(&s).unwrap(), enabled(&sys, &s));
            let sv = enc.survivor_set(&s).unwrap();
            prop_assert!(!sv.contains(&Interaction::empty()));
            prop_assert_eq!(sv, survivors(&sys, &s));
        }
    }

    #[test]
    fn seeded_runs_repeat(seed: u64) {
        let sys = random_system(seed, 3, 3, 2);
        let a = run(&mut EnumEngine::new(&sys, seed).unwrap(), 30).unwrap();
        let b = run(&mut EnumEngine::new(&sys, seed).unwrap(), 30).unwrap();
        prop_assert_eq!(a.steps, b.steps);
        let a = run(&mut SymbolicEngine::new(&sys, seed).unwrap(), 30).unwrap();
        let b = run(&mut SymbolicEngine::new(&sys, seed).unwrap(), 30).unwrap();
        prop_assert_eq!(a.steps, b.steps);
    }

    #[test]
    fn engine_traces_stay_in_the_reachable_set(seed: u64) {
        let sys = random_system(seed, 3, 3, 2);
        let reach = reachable(&sys, 1000).as_set();
        for trace in [
            run(&mut EnumEngine::new(&sys, seed).unwrap(), 40).unwrap(),
            run(&mut SymbolicEngine::new(&sys, seed).unwrap(), 40).unwrap(),
        ] {
            let mut prev = sys.initial_state();
            for st in &trace.steps {
                prop_assert!(survivors(&sys, &prev).contains(&st.interaction));
                prop_assert!(reach.contains(&st.state));
                prev = st.state.clone();
            }
            prop_assert_eq!(trace.deadlocked, survivors(&sys, &prev).is_empty() && trace.len() < 40);
        }
    }
}

#[test]
fn modulo_style_examples() {
    let text = include_str!("../../../models/modulo8.bip-lite");
    let sys = bipsym_core::parse(text).unwrap();
    let init = sys.initial_state();
    let p = Interaction::new(["p"]);
    assert!(act(&sys, &init, &p).unwrap());
    let l2 = GlobalState(vec![1, 0, 0]);
    assert!(!act(&sys, &l2, &p).unwrap());
    assert_eq!(step(&sys, &init, &p, 0).unwrap(), l2);
    let pqr = Interaction::new(["p", "q", "r"]);
    assert_eq!(enabled(&sys, &l2), InteractionSet::from([pqr.clone()]));
    assert_eq!(step(&sys, &l2, &pqr, 0).unwrap(), GlobalState(vec![0, 1, 0]));
}

#[test]
fn explicit_pair_filters_the_lower_interaction() {
    let text = "system s {
      atom x { ports p; states init a; trans a -[p]-> a; }
      atom y { ports q, r; states init b; trans b -[q, r]-> b; }
      connector c = p' [q r];
      priority {p} < {p, q, r};
    }";
    let sys = bipsym_core::parse(text).unwrap();
    let init = sys.initial_state();
    let en = enabled(&sys, &init);
    assert_eq!(en.len(), 2);
    assert_eq!(
        filter_priority(&sys, &init, &en),
        InteractionSet::from([Interaction::new(["p", "q", "r"])])
    );
}
