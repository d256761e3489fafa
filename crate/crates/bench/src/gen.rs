//! Model generators: the bus clusters, the preemptable tasks and random systems.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bipsym_core::{
    AcTerm, AtomicBehavior, Connector, Factor, Interaction, Port, PriorityModel, SystemModel, Transition,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GenError {
    #[error("bus needs at least one cluster")]
    NoClusters,
    #[error("tasks needs at least two tasks and one processor (got n={n}, m={m})")]
    TooSmall { n: usize, m: usize },
}

/// Order of the two phases of a bus atom's cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BusCycle {
    /// `A -c-> B -s-> A`.
    #[default]
    ComputeFirst,
    /// `A -s-> B -c-> A`.
    CommunicateFirst,
}

/// `n` clusters of four atoms. Each atom alternates between a private
/// computation port `c` and a bus port `s`; the bus connector of a cluster is
/// `s1' s2' s3' s4`.
pub fn gen_bus(n: usize) -> Result<SystemModel, GenError> {
    gen_bus_with(n, BusCycle::ComputeFirst)
}

pub fn gen_bus_with(n: usize, cycle: BusCycle) -> Result<SystemModel, GenError> {
    if n == 0 {
        return Err(GenError::NoClusters);
    }
    let mut atoms = Vec::with_capacity(4 * n);
    let mut connectors = Vec::with_capacity(5 * n);
    for k in 1..=n {
        for i in 1..=4 {
            let c = format!("c{k}_{i}");
            let s = format!("s{k}_{i}");
            let (first, second) = match cycle {
                BusCycle::ComputeFirst => (&c, &s),
                BusCycle::CommunicateFirst => (&s, &c),
            };
            let atom = AtomicBehavior::new(
                &format!("b{k}_{i}"),
                &[c.as_str(), s.as_str()],
                &["A", "B"],
                "A",
                &[("A", vec![first.as_str()], "B"), ("B", vec![second.as_str()], "A")],
            )
            .expect("states exist");
            atoms.push(atom);
            connectors.push(Connector::new(format!("comp{k}_{i}"), AcTerm::port(&c)));
        }
        let mut bus: Vec<Factor> = (1..=3)
            .map(|i| Factor::trigger(AcTerm::port(&format!("s{k}_{i}"))))
            .collect();
        bus.push(Factor::synchron(AcTerm::port(&format!("s{k}_4"))));
        connectors.push(Connector::new(format!("bus{k}"), AcTerm::Fusion(bus)));
    }
    Ok(SystemModel::new(
        format!("bus{n}"),
        atoms,
        connectors,
        PriorityModel::MaximalProgress,
    ))
}

fn task_port(task: usize, kind: char, cpu: usize) -> String {
    format!("t{task}_{kind}{cpu}")
}

/// `n` preemptable tasks on `m` processors. A task starting on a processor may
/// preempt the task running there; a task finishing may resume a preempted one.
pub fn gen_tasks(n: usize, m: usize) -> Result<SystemModel, GenError> {
    if n < 2 || m < 1 {
        return Err(GenError::TooSmall { n, m });
    }
    let mut atoms = Vec::with_capacity(n + m);
    for j in 1..=n {
        let mut ports = Vec::with_capacity(4 * m);
        let mut states = vec!["s".to_string()];
        let mut transitions = Vec::with_capacity(4 * m);
        for i in 1..=m {
            let (c, w) = (2 * i - 1, 2 * i);
            states.push(format!("c{i}"));
            states.push(format!("w{i}"));
            for kind in ['b', 'f', 'p', 'r'] {
                ports.push(Port::new(&task_port(j, kind, i)));
            }
            let label = |kind| Interaction::new([task_port(j, kind, i).as_str()]);
            transitions.push(Transition {
                from: 0,
                label: label('b'),
                to: c,
            });
            transitions.push(Transition {
                from: c,
                label: label('f'),
                to: 0,
            });
            transitions.push(Transition {
                from: c,
                label: label('p'),
                to: w,
            });
            transitions.push(Transition {
                from: w,
                label: label('r'),
                to: c,
            });
        }
        atoms.push(AtomicBehavior::from_parts(
            format!("t{j}"),
            ports,
            states,
            0,
            transitions,
        ));
    }
    for i in 1..=m {
        let s = format!("cpu{i}_s");
        let e = format!("cpu{i}_e");
        atoms.push(
            AtomicBehavior::new(
                &format!("cpu{i}"),
                &[s.as_str(), e.as_str()],
                &["l0", "l1", "l2"],
                "l0",
                &[
                    ("l0", vec![s.as_str()], "l1"),
                    ("l1", vec![e.as_str()], "l0"),
                    ("l1", vec![s.as_str()], "l2"),
                    ("l2", vec![e.as_str()], "l1"),
                ],
            )
            .expect("states exist"),
        );
    }
    let mut connectors = Vec::with_capacity(2 * n * (n - 1) * m);
    for t1 in 1..=n {
        for t2 in (1..=n).filter(|&t| t != t1) {
            for i in 1..=m {
                let start = AcTerm::Fusion(vec![
                    Factor::trigger(AcTerm::rendezvous(&[&task_port(t2, 'b', i), &format!("cpu{i}_s")])),
                    Factor::synchron(AcTerm::port(&task_port(t1, 'p', i))),
                ]);
                connectors.push(Connector::new(format!("start_t{t2}_t{t1}_cpu{i}"), start));
                let finish = AcTerm::Fusion(vec![
                    Factor::trigger(AcTerm::rendezvous(&[&task_port(t1, 'f', i), &format!("cpu{i}_e")])),
                    Factor::synchron(AcTerm::port(&task_port(t2, 'r', i))),
                ]);
                connectors.push(Connector::new(format!("finish_t{t1}_t{t2}_cpu{i}"), finish));
            }
        }
    }
    Ok(SystemModel::new(
        format!("tasks{n}x{m}"),
        atoms,
        connectors,
        PriorityModel::MaximalProgress,
    ))
}

/// Upper bounds for [`gen_random`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomBounds {
    pub atoms: usize,
    pub states: usize,
    pub ports: usize,
    pub depth: usize,
}

impl RandomBounds {
    pub fn new(atoms: usize, states: usize, ports: usize, depth: usize) -> Self {
        RandomBounds {
            atoms: atoms.max(1),
            states: states.max(1),
            ports: ports.max(1),
            depth: depth.max(1),
        }
    }
}

/// A random monomial term over `ports`, each port used at most once, with
/// nesting depth at most `depth`.
pub fn random_term<R: Rng + ?Sized>(rng: &mut R, ports: &[Port], depth: usize) -> AcTerm {
    if ports.len() == 1 || depth <= 1 {
        if ports.len() == 1 {
            return AcTerm::Port(ports[0].clone());
        }
        return AcTerm::Fusion(
            ports
                .iter()
                .map(|p| random_factor(rng, AcTerm::Port(p.clone())))
                .collect(),
        );
    }
    let groups = rng.random_range(1..=ports.len().min(3));
    let mut cuts: Vec<usize> = (1..ports.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(groups - 1).collect();
    cuts.sort_unstable();
    let mut factors = Vec::with_capacity(groups);
    let mut start = 0;
    for end in cuts.into_iter().chain([ports.len()]) {
        let chunk = &ports[start..end];
        let inner = if chunk.len() == 1 {
            AcTerm::Port(chunk[0].clone())
        } else {
            random_term(rng, chunk, depth - 1)
        };
        factors.push(random_factor(rng, inner));
        start = end;
    }
    if factors.len() == 1 {
        let only = factors.pop().expect("one factor");
        if let AcTerm::Fusion(_) = only.term {
            return only.term;
        }
        return AcTerm::Fusion(vec![only]);
    }
    AcTerm::Fusion(factors)
}

fn random_factor<R: Rng + ?Sized>(rng: &mut R, term: AcTerm) -> Factor {
    if rng.random_bool(0.5) {
        Factor::trigger(term)
    } else {
        Factor::synchron(term)
    }
}

/// A valid random system, reproducible per seed. Deadlocks are allowed.
pub fn gen_random(seed: u64, bounds: RandomBounds) -> SystemModel {
    let bounds = RandomBounds::new(bounds.atoms, bounds.states, bounds.ports, bounds.depth);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_atoms = rng.random_range(1..=bounds.atoms);
    let mut atoms = Vec::with_capacity(n_atoms);
    let mut all_ports = Vec::new();
    for a in 0..n_atoms {
        let n_states = rng.random_range(1..=bounds.states);
        let n_ports = rng.random_range(1..=bounds.ports);
        let ports: Vec<Port> = (0..n_ports).map(|k| Port::new(&format!("a{a}p{k}"))).collect();
        let states: Vec<String> = (0..n_states).map(|q| format!("q{q}")).collect();
        let mut transitions = Vec::new();
        for from in 0..n_states {
            for _ in 0..rng.random_range(0..=2) {
                let mut label: Vec<Port> = ports.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
                if label.is_empty() {
                    label.push(ports[rng.random_range(0..ports.len())].clone());
                }
                let t = Transition {
                    from,
                    label: Interaction::new(label),
                    to: rng.random_range(0..n_states),
                };
                if !transitions.contains(&t) {
                    transitions.push(t);
                }
            }
        }
        let init = rng.random_range(0..n_states);
        all_ports.extend(ports.iter().cloned());
        atoms.push(AtomicBehavior::from_parts(
            format!("a{a}"),
            ports,
            states,
            init,
            transitions,
        ));
    }
    let n_connectors = rng.random_range(1..=3);
    let mut connectors = Vec::with_capacity(n_connectors);
    for c in 0..n_connectors {
        let mut pool = all_ports.clone();
        pool.shuffle(&mut rng);
        let width = rng.random_range(1..=pool.len().min(4));
        pool.truncate(width);
        pool.sort();
        connectors.push(Connector::new(
            format!("k{c}"),
            random_term(&mut rng, &pool, bounds.depth),
        ));
    }
    let draft = SystemModel::new(format!("random{seed}"), atoms, connectors, PriorityModel::none());
    let priority = match rng.random_range(0..3) {
        0 => PriorityModel::none(),
        1 => PriorityModel::MaximalProgress,
        _ => {
            let gamma: Vec<Interaction> = draft.gamma().iter().cloned().collect();
            if gamma.len() >= 2 {
                let lo = rng.random_range(0..gamma.len());
                let mut hi = rng.random_range(0..gamma.len() - 1);
                if hi >= lo {
                    hi += 1;
                }
                PriorityModel::ExplicitPairs(vec![(gamma[lo].clone(), gamma[hi].clone())])
            } else {
                PriorityModel::none()
            }
        }
    };
    draft.with_priority(priority)
}
