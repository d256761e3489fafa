//! Connector terms with trigger/synchron typing, their interaction semantics,
//! and the correspondence between interaction sets and boolean functions.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use bipsym_bdd::{Bdd, BddError, BddManager, Var};

use crate::model::{Interaction, Port};

/// A set of interactions with canonical ordering.
pub type InteractionSet = BTreeSet<Interaction>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Typing {
    /// Can initiate an interaction on its own.
    Trigger,
    /// Participates only together with others.
    Synchron,
}

/// One typed operand of a fusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factor {
    pub term: AcTerm,
    pub typing: Typing,
}

impl Factor {
    pub fn trigger(term: AcTerm) -> Self {
        Factor {
            term,
            typing: Typing::Trigger,
        }
    }

    pub fn synchron(term: AcTerm) -> Self {
        Factor {
            term,
            typing: Typing::Synchron,
        }
    }

    pub fn is_trigger(&self) -> bool {
        self.typing == Typing::Trigger
    }
}

/// A monomial connector term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AcTerm {
    Port(Port),
    /// The connector with no interactions.
    Zero,
    /// The connector whose only interaction is the empty one.
    One,
    Fusion(Vec<Factor>),
}

impl AcTerm {
    pub fn port(name: &str) -> Self {
        AcTerm::Port(Port::new(name))
    }

    /// Fusion of the given ports, all synchrons.
    pub fn rendezvous(ports: &[&str]) -> Self {
        AcTerm::Fusion(ports.iter().map(|p| Factor::synchron(AcTerm::port(p))).collect())
    }

    /// `t' s1 s2 …`: one trigger port followed by synchron ports.
    pub fn broadcast(trigger: &str, receivers: &[&str]) -> Self {
        let mut fs = vec![Factor::trigger(AcTerm::port(trigger))];
        fs.extend(receivers.iter().map(|p| Factor::synchron(AcTerm::port(p))));
        AcTerm::Fusion(fs)
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self, AcTerm::Fusion(_))
    }

    pub fn for_each_port(&self, f: &mut impl FnMut(&Port)) {
        match self {
            AcTerm::Port(p) => f(p),
            AcTerm::Zero | AcTerm::One => {}
            AcTerm::Fusion(fs) => fs.iter().for_each(|x| x.term.for_each_port(f)),
        }
    }

    /// All ports occurring in the term.
    pub fn support(&self) -> BTreeSet<Port> {
        let mut out = BTreeSet::new();
        self.for_each_port(&mut |p| {
            out.insert(p.clone());
        });
        out
    }

    /// Exact (exponential) enumeration of the term's interactions.
    pub fn interactions(&self) -> InteractionSet {
        match self {
            AcTerm::Port(p) => InteractionSet::from([Interaction::new([p.clone()])]),
            AcTerm::Zero => InteractionSet::new(),
            AcTerm::One => InteractionSet::from([Interaction::empty()]),
            AcTerm::Fusion(fs) => {
                let sems: Vec<InteractionSet> = fs.iter().map(|f| f.term.interactions()).collect();
                if fs.iter().any(Factor::is_trigger) {
                    // (union so far, whether a trigger contributed)
                    let mut acc: BTreeSet<(Interaction, bool)> = BTreeSet::from([(Interaction::empty(), false)]);
                    for (f, sem) in fs.iter().zip(&sems) {
                        let mut next = acc.clone();
                        for (u, fired) in &acc {
                            for a in sem {
                                next.insert((u.union(a), *fired || f.is_trigger()));
                            }
                        }
                        acc = next;
                    }
                    acc.into_iter().filter(|(_, fired)| *fired).map(|(u, _)| u).collect()
                } else {
                    let mut acc = InteractionSet::from([Interaction::empty()]);
                    for sem in &sems {
                        acc = acc.iter().flat_map(|u| sem.iter().map(move |a| u.union(a))).collect();
                    }
                    acc
                }
            }
        }
    }
}

/// Juxtaposition of factors; a trailing apostrophe marks triggers.
impl fmt::Display for AcTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcTerm::Port(p) => write!(f, "{p}"),
            AcTerm::Zero => f.write_str("0"),
            AcTerm::One => f.write_str("1"),
            AcTerm::Fusion(fs) => {
                // A lone untyped leaf needs brackets to stay a fusion when re-read.
                if let [single] = fs.as_slice() {
                    if !single.is_trigger() && single.term.is_leaf() {
                        return write!(f, "[{}]", single.term);
                    }
                }
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    if x.term.is_leaf() {
                        write!(f, "{}", x.term)?;
                    } else {
                        write!(f, "[{}]", x.term)?;
                    }
                    if x.is_trigger() {
                        f.write_str("'")?;
                    }
                }
                Ok(())
            }
        }
    }
}

pub fn interactions_of(term: &AcTerm) -> InteractionSet {
    term.interactions()
}

pub fn support(term: &AcTerm) -> BTreeSet<Port> {
    term.support()
}

/// Rewrites a term so that every fusion is in one of three binary shapes: a
/// single trigger with synchrons, exactly two triggers, or exactly two synchrons.
/// Extra triggers are grouped left-nested under a trigger typing and extra
/// synchrons are grouped left-nested under a synchron typing; semantics is
/// unchanged.
pub fn normalize_binary(term: &AcTerm) -> AcTerm {
    let AcTerm::Fusion(fs) = term else {
        return term.clone();
    };
    let fs: Vec<Factor> = fs
        .iter()
        .map(|f| Factor {
            term: normalize_binary(&f.term),
            typing: f.typing,
        })
        .collect();
    if fs.len() <= 1 {
        return AcTerm::Fusion(fs);
    }
    let (triggers, synchrons): (Vec<Factor>, Vec<Factor>) = fs.into_iter().partition(Factor::is_trigger);
    match triggers.len() {
        0 => {
            let mut it = synchrons.into_iter();
            let first = it.next().expect("at least two synchrons");
            let second = it.next().expect("at least two synchrons");
            let mut acc = AcTerm::Fusion(vec![first, second]);
            for y in it {
                acc = AcTerm::Fusion(vec![Factor::synchron(acc), y]);
            }
            acc
        }
        1 => {
            let mut out = triggers;
            out.extend(synchrons);
            AcTerm::Fusion(out)
        }
        _ => {
            let mut it = triggers.into_iter();
            let first = it.next().expect("at least two triggers");
            let second = it.next().expect("at least two triggers");
            let mut acc = AcTerm::Fusion(vec![first, second]);
            for x in it {
                acc = AcTerm::Fusion(vec![Factor::trigger(acc), x]);
            }
            if synchrons.is_empty() {
                acc
            } else {
                let mut out = vec![Factor::trigger(acc)];
                out.extend(synchrons);
                AcTerm::Fusion(out)
            }
        }
    }
}

fn universe_vars(mgr: &BddManager, universe: &[Port]) -> Result<HashMap<Port, Var>, BddError> {
    universe
        .iter()
        .map(|p| Ok((p.clone(), mgr.var_by_name(p.name())?)))
        .collect()
}

/// Characteristic function of `gamma` over `universe`: one full minterm per
/// interaction, with absent ports negated. Port variables are looked up by name.
pub fn interactions_to_bool(mgr: &mut BddManager, gamma: &InteractionSet, universe: &[Port]) -> Result<Bdd, BddError> {
    let vars = universe_vars(mgr, universe)?;
    let mut acc = mgr.constant(false);
    for a in gamma {
        if let Some(p) = a.ports().iter().find(|p| !vars.contains_key(*p)) {
            return Err(BddError::UnknownVariable(p.to_string()));
        }
        let lits: Vec<(Var, bool)> = universe.iter().map(|p| (vars[p], a.contains(p))).collect();
        let m = mgr.cube(&lits);
        acc = mgr.or(acc, m);
    }
    Ok(acc)
}

/// Inverse of [`interactions_to_bool`]: reads every satisfying valuation over
/// `universe` as the interaction of its true ports.
pub fn bool_to_interactions(mgr: &BddManager, f: Bdd, universe: &[Port]) -> Result<InteractionSet, BddError> {
    let vars: Vec<Var> = universe
        .iter()
        .map(|p| mgr.var_by_name(p.name()))
        .collect::<Result<_, _>>()?;
    let models = mgr.sat_assignments(f, &vars)?;
    Ok(models
        .into_iter()
        .map(|m| Interaction::new(universe.iter().zip(m).filter(|(_, v)| *v).map(|(p, _)| p.clone())))
        .collect())
}
