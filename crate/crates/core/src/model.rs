//! Components, interactions, priorities and the composed system.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::connector::{AcTerm, InteractionSet};
use crate::error::ModelError;

/// A named synchronization point. Ports are compared by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Port(Arc<str>);

impl Port {
    pub fn new(name: &str) -> Self {
        Port(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Port {
    fn from(s: &str) -> Self {
        Port::new(s)
    }
}

impl From<&String> for Port {
    fn from(s: &String) -> Self {
        Port::new(s)
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A set of ports, kept sorted and duplicate-free so that set equality is
/// structural equality.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interaction(Vec<Port>);

impl Interaction {
    pub fn new<I, P>(ports: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<Port>,
    {
        let mut v: Vec<Port> = ports.into_iter().map(Into::into).collect();
        v.sort();
        v.dedup();
        Interaction(v)
    }

    pub fn empty() -> Self {
        Interaction(Vec::new())
    }

    pub fn ports(&self) -> &[Port] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: &Port) -> bool {
        self.0.binary_search(p).is_ok()
    }

    pub fn is_subset(&self, other: &Interaction) -> bool {
        self.0.iter().all(|p| other.contains(p))
    }

    pub fn is_strict_subset(&self, other: &Interaction) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }

    pub fn union(&self, other: &Interaction) -> Interaction {
        let mut v = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    v.push(self.0[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    v.push(other.0[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    v.push(self.0[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        v.extend_from_slice(&self.0[i..]);
        v.extend_from_slice(&other.0[j..]);
        Interaction(v)
    }

    pub fn without(&self, p: &Port) -> Interaction {
        Interaction(self.0.iter().filter(|q| *q != p).cloned().collect())
    }

    /// The ports of `self` that also belong to `ports`.
    pub fn restrict_to(&self, ports: &[Port]) -> Interaction {
        Interaction(self.0.iter().filter(|p| ports.contains(p)).cloned().collect())
    }
}

/// Space-separated port names; the empty interaction prints as nothing.
impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub label: Interaction,
    pub to: usize,
}

/// A labeled transition system whose labels are interactions over its own ports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicBehavior {
    name: String,
    ports: Vec<Port>,
    states: Vec<String>,
    init: usize,
    transitions: Vec<Transition>,
}

impl AtomicBehavior {
    /// Builds an atom from names. Transitions are `(source, label ports, target)`.
    pub fn new<S: AsRef<str>>(
        name: &str,
        ports: &[S],
        states: &[S],
        init: &str,
        transitions: &[(&str, Vec<&str>, &str)],
    ) -> Result<Self, ModelError> {
        let states: Vec<String> = states.iter().map(|s| s.as_ref().to_string()).collect();
        let lookup = |s: &str| {
            states
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| ModelError::UnknownState {
                    atom: name.to_string(),
                    state: s.to_string(),
                })
        };
        let init = lookup(init)?;
        let transitions = transitions
            .iter()
            .map(|(from, label, to)| {
                Ok(Transition {
                    from: lookup(from)?,
                    label: Interaction::new(label.iter().copied()),
                    to: lookup(to)?,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        Ok(AtomicBehavior {
            name: name.to_string(),
            ports: ports.iter().map(|p| Port::new(p.as_ref())).collect(),
            states,
            init,
            transitions,
        })
    }

    /// Index-based constructor; the caller guarantees indices are in range.
    pub fn from_parts(
        name: String,
        ports: Vec<Port>,
        states: Vec<String>,
        init: usize,
        transitions: Vec<Transition>,
    ) -> Self {
        AtomicBehavior {
            name,
            ports,
            states,
            init,
            transitions,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Targets of the transitions leaving `state` whose label is exactly `label`.
    pub fn targets<'a>(&'a self, state: usize, label: &'a Interaction) -> impl Iterator<Item = usize> + 'a {
        self.transitions
            .iter()
            .filter(move |t| t.from == state && &t.label == label)
            .map(|t| t.to)
    }

    pub fn is_active(&self, state: usize, label: &Interaction) -> bool {
        self.targets(state, label).next().is_some()
    }
}

/// A strict partial order on interactions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PriorityModel {
    /// `(low, high)` pairs: `low` yields to `high`. The empty list is "no priority".
    ExplicitPairs(Vec<(Interaction, Interaction)>),
    /// `a` yields to every strict superset `a'` in the interaction model.
    MaximalProgress,
}

impl Default for PriorityModel {
    fn default() -> Self {
        PriorityModel::ExplicitPairs(Vec::new())
    }
}

impl PriorityModel {
    pub fn none() -> Self {
        Self::default()
    }

    /// Transitive closure of an explicit pair list; `None` for maximal progress.
    pub fn closure(&self) -> Option<BTreeSet<(Interaction, Interaction)>> {
        let PriorityModel::ExplicitPairs(pairs) = self else {
            return None;
        };
        let mut succ: BTreeMap<&Interaction, BTreeSet<&Interaction>> = BTreeMap::new();
        for (lo, hi) in pairs {
            succ.entry(lo).or_default().insert(hi);
        }
        let mut closed = BTreeSet::new();
        for &start in succ.keys() {
            let mut stack: Vec<&Interaction> = succ[start].iter().copied().collect();
            let mut seen = BTreeSet::new();
            while let Some(next) = stack.pop() {
                if !seen.insert(next) {
                    continue;
                }
                closed.insert((start.clone(), next.clone()));
                if let Some(more) = succ.get(next) {
                    stack.extend(more.iter().copied());
                }
            }
        }
        Some(closed)
    }
}

/// A named connector term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connector {
    pub name: String,
    pub term: AcTerm,
}

impl Connector {
    pub fn new(name: impl Into<String>, term: AcTerm) -> Self {
        Connector {
            name: name.into(),
            term,
        }
    }
}

/// Flat composition of atoms under connectors and a priority model.
#[derive(Debug, Clone)]
pub struct SystemModel {
    name: String,
    atoms: Vec<AtomicBehavior>,
    connectors: Vec<Connector>,
    priority: PriorityModel,
    owner: HashMap<Port, usize>,
    gamma: OnceLock<InteractionSet>,
}

impl PartialEq for SystemModel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.atoms == other.atoms
            && self.connectors == other.connectors
            && self.priority == other.priority
    }
}

impl Eq for SystemModel {}

impl SystemModel {
    pub fn new(
        name: impl Into<String>,
        atoms: Vec<AtomicBehavior>,
        connectors: Vec<Connector>,
        priority: PriorityModel,
    ) -> Self {
        let mut owner = HashMap::new();
        for (i, atom) in atoms.iter().enumerate() {
            for p in atom.ports() {
                owner.entry(p.clone()).or_insert(i);
            }
        }
        SystemModel {
            name: name.into(),
            atoms,
            connectors,
            priority,
            owner,
            gamma: OnceLock::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn atoms(&self) -> &[AtomicBehavior] {
        &self.atoms
    }

    pub fn connectors(&self) -> &[Connector] {
        &self.connectors
    }

    pub fn priority(&self) -> &PriorityModel {
        &self.priority
    }

    /// A copy of this system with a different priority model.
    pub fn with_priority(&self, priority: PriorityModel) -> SystemModel {
        SystemModel::new(self.name.clone(), self.atoms.clone(), self.connectors.clone(), priority)
    }

    /// All ports, atom by atom in declaration order.
    pub fn ports(&self) -> impl Iterator<Item = &Port> {
        self.atoms.iter().flat_map(|a| a.ports().iter())
    }

    pub fn owner_of(&self, p: &Port) -> Option<usize> {
        self.owner.get(p).copied()
    }

    pub fn initial_state(&self) -> GlobalState {
        GlobalState(self.atoms.iter().map(|a| a.init()).collect())
    }

    /// The interaction model: union of the connectors' interactions, without ∅.
    pub fn gamma(&self) -> &InteractionSet {
        self.gamma.get_or_init(|| {
            let mut all = InteractionSet::new();
            for c in &self.connectors {
                all.extend(c.term.interactions());
            }
            all.remove(&Interaction::empty());
            all
        })
    }

    /// Projection `a ∩ Pᵢ` for every atom touched by `a`.
    pub fn split(&self, a: &Interaction) -> Result<Vec<(usize, Interaction)>, ModelError> {
        let mut parts: BTreeMap<usize, Vec<Port>> = BTreeMap::new();
        for p in a.ports() {
            let owner = self.owner_of(p).ok_or_else(|| ModelError::ForeignPort(p.to_string()))?;
            parts.entry(owner).or_default().push(p.clone());
        }
        Ok(parts.into_iter().map(|(i, ports)| (i, Interaction(ports))).collect())
    }

    pub fn check_state(&self, state: &GlobalState) -> Result<(), ModelError> {
        if state.0.len() != self.atoms.len() {
            return Err(ModelError::BadState(format!(
                "expected {} entries, got {}",
                self.atoms.len(),
                state.0.len()
            )));
        }
        for (atom, &q) in self.atoms.iter().zip(&state.0) {
            if q >= atom.states().len() {
                return Err(ModelError::BadState(format!(
                    "atom `{}` has no state #{q}",
                    atom.name()
                )));
            }
        }
        Ok(())
    }

    /// Human-readable per-atom state names.
    pub fn state_names(&self, state: &GlobalState) -> Vec<&str> {
        self.atoms
            .iter()
            .zip(&state.0)
            .map(|(a, &q)| a.states()[q].as_str())
            .collect()
    }

    /// Looks a global state up by per-atom state names.
    pub fn state_from_names(&self, names: &[&str]) -> Result<GlobalState, ModelError> {
        if names.len() != self.atoms.len() {
            return Err(ModelError::BadState(format!(
                "expected {} entries, got {}",
                self.atoms.len(),
                names.len()
            )));
        }
        self.atoms
            .iter()
            .zip(names)
            .map(|(a, n)| {
                a.state_index(n).ok_or_else(|| ModelError::UnknownState {
                    atom: a.name().to_string(),
                    state: n.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(GlobalState)
    }
}

/// Per-atom current state indices, aligned with [`SystemModel::atoms`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlobalState(pub Vec<usize>);

/// What a diagnostic complains about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    Disjointness,
    UnboundPort,
    DuplicateName,
    EmptyLabel,
    ForeignLabelPort,
    RepeatedConnectorPort,
    PriorityCycle,
    PriorityUnknownPort,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagnosticKind::Disjointness => "disjointness",
            DiagnosticKind::UnboundPort => "unbound port",
            DiagnosticKind::DuplicateName => "duplicate name",
            DiagnosticKind::EmptyLabel => "empty label",
            DiagnosticKind::ForeignLabelPort => "foreign label port",
            DiagnosticKind::RepeatedConnectorPort => "repeated connector port",
            DiagnosticKind::PriorityCycle => "priority cycle",
            DiagnosticKind::PriorityUnknownPort => "priority unknown port",
        };
        f.write_str(s)
    }
}

/// Where in a [`SystemModel`] a diagnostic applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Atom(usize),
    Transition { atom: usize, index: usize },
    Connector(usize),
    Priority(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

/// Checks every structural invariant of `system`; an empty result means valid.
pub fn validate(system: &SystemModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |kind, location, message: String| {
        out.push(Diagnostic {
            kind,
            location,
            message,
        })
    };

    let mut atom_names = HashMap::new();
    let mut port_owner: HashMap<&Port, usize> = HashMap::new();
    for (i, atom) in system.atoms().iter().enumerate() {
        if let Some(prev) = atom_names.insert(atom.name(), i) {
            push(
                DiagnosticKind::DuplicateName,
                Location::Atom(i),
                format!("atom `{}` already declared as atom #{prev}", atom.name()),
            );
        }
        let mut states = HashMap::new();
        for s in atom.states() {
            if states.insert(s.as_str(), ()).is_some() {
                push(
                    DiagnosticKind::DuplicateName,
                    Location::Atom(i),
                    format!("state `{s}` declared twice in atom `{}`", atom.name()),
                );
            }
        }
        for p in atom.ports() {
            match port_owner.get(p) {
                Some(&j) if j == i => push(
                    DiagnosticKind::DuplicateName,
                    Location::Atom(i),
                    format!("port `{p}` declared twice in atom `{}`", atom.name()),
                ),
                Some(&j) => push(
                    DiagnosticKind::Disjointness,
                    Location::Atom(i),
                    format!(
                        "port `{p}` of atom `{}` is also a port of atom `{}`",
                        atom.name(),
                        system.atoms()[j].name()
                    ),
                ),
                None => {
                    port_owner.insert(p, i);
                }
            }
        }
        for (k, t) in atom.transitions().iter().enumerate() {
            let loc = Location::Transition { atom: i, index: k };
            if t.label.is_empty() {
                push(
                    DiagnosticKind::EmptyLabel,
                    loc,
                    format!("transition #{k} of atom `{}` has an empty label", atom.name()),
                );
            }
            for p in t.label.ports() {
                if !atom.ports().contains(p) {
                    push(
                        DiagnosticKind::ForeignLabelPort,
                        loc,
                        format!(
                            "transition #{k} of atom `{}` uses port `{p}`, which the atom does not own",
                            atom.name()
                        ),
                    );
                }
            }
        }
    }

    let mut connector_names = HashMap::new();
    for (i, c) in system.connectors().iter().enumerate() {
        if let Some(prev) = connector_names.insert(c.name.as_str(), i) {
            push(
                DiagnosticKind::DuplicateName,
                Location::Connector(i),
                format!("connector `{}` already declared as connector #{prev}", c.name),
            );
        }
        let mut occurrences: BTreeMap<Port, usize> = BTreeMap::new();
        c.term
            .for_each_port(&mut |p| *occurrences.entry(p.clone()).or_default() += 1);
        for (p, n) in occurrences {
            if !port_owner.contains_key(&p) {
                push(
                    DiagnosticKind::UnboundPort,
                    Location::Connector(i),
                    format!("connector `{}` mentions unknown port `{p}`", c.name),
                );
            }
            if n > 1 {
                push(
                    DiagnosticKind::RepeatedConnectorPort,
                    Location::Connector(i),
                    format!("connector `{}` mentions port `{p}` {n} times", c.name),
                );
            }
        }
    }

    if let PriorityModel::ExplicitPairs(pairs) = system.priority() {
        for (i, (lo, hi)) in pairs.iter().enumerate() {
            for p in lo.ports().iter().chain(hi.ports()) {
                if !port_owner.contains_key(p) {
                    push(
                        DiagnosticKind::PriorityUnknownPort,
                        Location::Priority(i),
                        format!("priority pair #{i} mentions unknown port `{p}`"),
                    );
                }
            }
        }
        if let Some(closure) = system.priority().closure() {
            for (i, (lo, _)) in pairs.iter().enumerate() {
                if closure.contains(&(lo.clone(), lo.clone())) {
                    push(
                        DiagnosticKind::PriorityCycle,
                        Location::Priority(i),
                        format!("priority pair #{i} lies on a cycle through {{{lo}}}"),
                    );
                }
            }
        }
    }
    out
}
