#![allow(dead_code)]

use bipsym_core::{AcTerm, Factor, Interaction, InteractionSet, Port};
use proptest::prelude::*;

pub fn i(ports: &[&str]) -> Interaction {
    Interaction::new(ports.iter().copied())
}

pub fn set(items: &[&[&str]]) -> InteractionSet {
    items.iter().map(|ps| i(ps)).collect()
}

#[derive(Debug, Clone)]
enum Shape {
    Port,
    Zero,
    One,
    Fusion(Vec<(Shape, bool)>),
}

impl Shape {
    fn ports(&self) -> usize {
        match self {
            Shape::Port => 1,
            Shape::Zero | Shape::One => 0,
            Shape::Fusion(fs) => fs.iter().map(|(s, _)| s.ports()).sum(),
        }
    }

    fn depth(&self) -> usize {
        match self {
            Shape::Fusion(fs) => 1 + fs.iter().map(|(s, _)| s.depth()).max().unwrap_or(0),
            _ => 0,
        }
    }

    fn build(&self, next: &mut usize) -> AcTerm {
        match self {
            Shape::Port => {
                *next += 1;
                AcTerm::port(&format!("p{}", *next - 1))
            }
            Shape::Zero => AcTerm::Zero,
            Shape::One => AcTerm::One,
            Shape::Fusion(fs) => AcTerm::Fusion(
                fs.iter()
                    .map(|(s, trigger)| {
                        let t = s.build(next);
                        if *trigger {
                            Factor::trigger(t)
                        } else {
                            Factor::synchron(t)
                        }
                    })
                    .collect(),
            ),
        }
    }
}

/// Monomial terms over distinct ports `p0…`, with at most `max_ports` ports
/// and at most `max_depth` nested fusions. `with_constants` admits `0`/`1`.
pub fn term_strategy(max_ports: usize, max_depth: u32, with_constants: bool) -> impl Strategy<Value = AcTerm> {
    let leaf = if with_constants {
        prop_oneof![8 => Just(Shape::Port), 1 => Just(Shape::Zero), 1 => Just(Shape::One)].boxed()
    } else {
        Just(Shape::Port).boxed()
    };
    leaf.prop_recursive(max_depth, 16, 4, |inner| {
        prop::collection::vec((inner, any::<bool>()), 1..4).prop_map(Shape::Fusion)
    })
    .prop_filter("port budget", move |s| {
        s.ports() <= max_ports && s.depth() <= max_depth as usize
    })
    .prop_map(|s| s.build(&mut 0))
}

pub fn ports_of(term: &AcTerm) -> Vec<Port> {
    term.support().into_iter().collect()
}

use bipsym_core::{AtomicBehavior, Connector, PriorityModel, SystemModel, Transition};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_fusion(rng: &mut ChaCha8Rng, ports: &[Port], depth: usize) -> AcTerm {
    if ports.len() == 1 && (depth == 0 || rng.random_bool(0.6)) {
        return AcTerm::Port(ports[0].clone());
    }
    let mut factors = Vec::new();
    let mut rest = ports;
    while !rest.is_empty() {
        let take = if depth == 0 {
            1
        } else {
            rng.random_range(1..=rest.len())
        };
        let (chunk, tail) = rest.split_at(take);
        let term = random_fusion(rng, chunk, depth.saturating_sub(1));
        factors.push(if rng.random_bool(0.5) {
            Factor::trigger(term)
        } else {
            Factor::synchron(term)
        });
        rest = tail;
    }
    AcTerm::Fusion(factors)
}

/// Small random valid system: up to `atoms` atoms with up to `states` states
/// and `ports` ports each, connectors over disjoint port groups.
pub fn random_system(seed: u64, atoms: usize, states: usize, ports: usize) -> SystemModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=atoms);
    let mut all_ports = Vec::new();
    let mut list = Vec::new();
    for a in 0..n {
        let k = rng.random_range(1..=states);
        let m = rng.random_range(1..=ports);
        let ps: Vec<Port> = (0..m).map(|j| Port::new(&format!("a{a}_{j}"))).collect();
        let st: Vec<String> = (0..k).map(|j| format!("s{j}")).collect();
        let mut ts = Vec::new();
        for from in 0..k {
            for _ in 0..rng.random_range(0..=2) {
                let mask = rng.random_range(1..1u32 << m);
                let label = Interaction::new(
                    ps.iter()
                        .enumerate()
                        .filter(|(j, _)| mask >> j & 1 == 1)
                        .map(|(_, p)| p.clone()),
                );
                ts.push(Transition {
                    from,
                    label,
                    to: rng.random_range(0..k),
                });
            }
        }
        all_ports.extend(ps.iter().cloned());
        list.push(AtomicBehavior::from_parts(
            format!("a{a}"),
            ps,
            st,
            rng.random_range(0..k),
            ts,
        ));
    }
    all_ports.shuffle(&mut rng);
    let mut connectors = Vec::new();
    let mut rest = &all_ports[..];
    while !rest.is_empty() {
        let take = rng.random_range(1..=rest.len().min(4));
        let (group, tail) = rest.split_at(take);
        if rng.random_bool(0.85) {
            let term = random_fusion(&mut rng, group, 3);
            connectors.push(Connector::new(format!("k{}", connectors.len()), term));
        }
        rest = tail;
    }
    let sys = SystemModel::new(format!("r{seed}"), list, connectors, PriorityModel::none());
    let gamma: Vec<Interaction> = sys.gamma().iter().cloned().collect();
    let priority = match rng.random_range(0..3) {
        0 => PriorityModel::none(),
        1 => PriorityModel::MaximalProgress,
        _ if gamma.len() >= 2 => {
            let mut pairs = Vec::new();
            for _ in 0..rng.random_range(1..=3) {
                let x = rng.random_range(0..gamma.len());
                let y = rng.random_range(0..gamma.len());
                if x < y {
                    pairs.push((gamma[x].clone(), gamma[y].clone()));
                }
            }
            PriorityModel::ExplicitPairs(pairs)
        }
        _ => PriorityModel::MaximalProgress,
    };
    sys.with_priority(priority)
}
