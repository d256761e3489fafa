//! Randomized agreement between the connector semantics, the causal-tree
//! translation and the boolean encoding, with exhaustive enumeration as oracle.

mod common;

use bipsym_bdd::BddManager;
use bipsym_core::symbolic::encode_connector;
use bipsym_core::{
    bool_to_interactions, causal_rules, ct_interactions, interactions_of, interactions_to_bool, normalize_binary,
    rules_to_formula, tau, AcTerm, Factor, Interaction, InteractionSet, Port,
};
use common::{ports_of, term_strategy};
use proptest::prelude::*;

fn sat_set(term: &AcTerm) -> InteractionSet {
    let ports = ports_of(term);
    let names: Vec<&str> = ports.iter().map(Port::name).collect();
    let mut m = BddManager::with_vars(names).unwrap();
    let f = rules_to_formula(&mut m, &causal_rules(&tau(term)), &term.support()).unwrap();
    m.audit().unwrap();
    let via_encoder = encode_connector(&mut m, term).unwrap();
    assert_eq!(f, via_encoder);
    bool_to_interactions(&m, f, &ports).unwrap()
}

fn without_empty(mut s: InteractionSet) -> InteractionSet {
    s.remove(&Interaction::empty());
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn tree_and_formula_agree_with_enumeration(term in term_strategy(6, 4, false)) {
        let expected = interactions_of(&term);
        prop_assert_eq!(ct_interactions(&tau(&term)), expected.clone(), "tau of {}", term);
        prop_assert_eq!(sat_set(&term), without_empty(expected), "formula of {}", term);
    }

    #[test]
    fn constants_keep_the_tree_semantics(term in term_strategy(6, 4, true)) {
        let expected = interactions_of(&term);
        prop_assert_eq!(ct_interactions(&tau(&term)), expected.clone(), "tau of {}", term);
        prop_assert_eq!(sat_set(&term), without_empty(expected), "formula of {}", term);
    }

    #[test]
    fn normalization_preserves_semantics(term in term_strategy(6, 4, true)) {
        let n = normalize_binary(&term);
        prop_assert_eq!(interactions_of(&n), interactions_of(&term), "{} vs {}", term, n);
    }

    #[test]
    fn support_lists_every_port(term in term_strategy(6, 4, true)) {
        let mut seen = Vec::new();
        term.for_each_port(&mut |p| seen.push(p.clone()));
        seen.sort();
        seen.dedup();
        prop_assert_eq!(seen, ports_of(&term));
        for a in interactions_of(&term) {
            prop_assert!(a.ports().iter().all(|p| term.support().contains(p)));
        }
    }

    #[test]
    fn a_trigger_alone_may_fire(term in term_strategy(4, 3, false), n in 1usize..4) {
        let receivers: Vec<Factor> = (0..n).map(|k| Factor::synchron(AcTerm::port(&format!("y{k}")))).collect();
        let mut factors = vec![Factor::trigger(term.clone())];
        factors.extend(receivers);
        let whole = interactions_of(&AcTerm::Fusion(factors));
        for a in interactions_of(&term) {
            prop_assert!(whole.contains(&a));
        }
    }
}

#[test]
fn round_trip_over_every_set_up_to_four_ports() {
    for n in 0..=4usize {
        let universe: Vec<Port> = (0..n).map(|k| Port::new(&format!("x{k}"))).collect();
        let names: Vec<&str> = universe.iter().map(Port::name).collect();
        let mut m = BddManager::with_vars(names).unwrap();
        let all: Vec<Interaction> = (0..1u32 << n)
            .map(|mask| {
                Interaction::new(
                    universe
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| mask >> k & 1 == 1)
                        .map(|(_, p)| p.clone()),
                )
            })
            .collect();
        for family in 0..1u64 << all.len() {
            let gamma: InteractionSet = all
                .iter()
                .enumerate()
                .filter(|(k, _)| family >> k & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect();
            let f = interactions_to_bool(&mut m, &gamma, &universe).unwrap();
            assert_eq!(bool_to_interactions(&m, f, &universe).unwrap(), gamma);
        }
        // Every function over the universe comes back unchanged as well.
        let vars: Vec<_> = m.vars().collect();
        for table in 0..1u64 << (1u32 << n) {
            let mut f = m.constant(false);
            for row in 0..1u32 << n {
                if table >> row & 1 == 1 {
                    let lits: Vec<_> = vars.iter().enumerate().map(|(k, &v)| (v, row >> k & 1 == 1)).collect();
                    let c = m.cube(&lits);
                    f = m.or(f, c);
                }
            }
            let gamma = bool_to_interactions(&m, f, &universe).unwrap();
            assert_eq!(interactions_to_bool(&mut m, &gamma, &universe).unwrap(), f);
        }
    }
}

#[test]
fn rendezvous_of_singletons_is_one_interaction() {
    for k in 1..7 {
        let names: Vec<String> = (0..k).map(|j| format!("p{j}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let term = AcTerm::rendezvous(&refs);
        assert_eq!(
            interactions_of(&term),
            InteractionSet::from([Interaction::new(refs.iter().copied())])
        );
    }
}

#[test]
fn synchron_zero_annihilates_trigger_free_fusions() {
    let term = AcTerm::Fusion(vec![
        Factor::synchron(AcTerm::port("p")),
        Factor::synchron(AcTerm::Zero),
        Factor::synchron(AcTerm::rendezvous(&["q", "r"])),
    ]);
    assert!(interactions_of(&term).is_empty());
    assert!(ct_interactions(&tau(&term)).is_empty());
}
