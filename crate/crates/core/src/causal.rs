//! Causal trees: translation from connector terms, their interaction
//! semantics, and extraction of the causal rules used by the boolean
//! connector encoding.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use bipsym_bdd::{Bdd, BddError, BddManager};

use crate::connector::{normalize_binary, AcTerm, InteractionSet};
use crate::model::{Interaction, Port};

/// A node participates only if its parent does.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CtNode {
    pub label: Interaction,
    pub children: Vec<CtNode>,
}

impl CtNode {
    pub fn leaf(label: Interaction) -> Self {
        CtNode {
            label,
            children: Vec::new(),
        }
    }

    pub fn new(label: Interaction, children: Vec<CtNode>) -> Self {
        CtNode { label, children }
    }

    fn canonical(&self) -> CtNode {
        let mut children: Vec<CtNode> = self.children.iter().map(CtNode::canonical).collect();
        children.sort();
        CtNode {
            label: self.label.clone(),
            children,
        }
    }

    /// Interactions of this subtree that include this node.
    fn interactions(&self) -> InteractionSet {
        let mut acc = InteractionSet::from([self.label.clone()]);
        for child in &self.children {
            let sub = child.interactions();
            let mut next = acc.clone();
            for u in &acc {
                for a in &sub {
                    next.insert(u.union(a));
                }
            }
            acc = next;
        }
        acc
    }

    fn any_empty_label(&self) -> bool {
        self.label.is_empty() || self.children.iter().any(CtNode::any_empty_label)
    }
}

/// A forest of causal trees composed in parallel. The empty forest has no
/// interactions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CausalTree {
    pub roots: Vec<CtNode>,
}

impl CausalTree {
    pub fn new(roots: Vec<CtNode>) -> Self {
        CausalTree { roots }
    }

    /// Same tree with every sibling list sorted, so that trees equal up to
    /// reordering of parallel branches compare equal.
    pub fn canonical(&self) -> CausalTree {
        let mut roots: Vec<CtNode> = self.roots.iter().map(CtNode::canonical).collect();
        roots.sort();
        CausalTree { roots }
    }

    pub fn equivalent(&self, other: &CausalTree) -> bool {
        self.canonical() == other.canonical()
    }

    /// True when some node carries the empty label, which only `1` leaves produce.
    pub fn has_empty_label(&self) -> bool {
        self.roots.iter().any(CtNode::any_empty_label)
    }

    /// `a -> (t1 + t2 + …)` appended to every root.
    fn under_each_root(mut self, extra: &[CtNode]) -> CausalTree {
        for r in &mut self.roots {
            r.children.extend(extra.iter().cloned());
        }
        self
    }

    fn product(&self, other: &CausalTree) -> CausalTree {
        let mut roots = Vec::with_capacity(self.roots.len() * other.roots.len());
        for a in &self.roots {
            for b in &other.roots {
                let mut children = a.children.clone();
                children.extend(b.children.iter().cloned());
                roots.push(CtNode::new(a.label.union(&b.label), children));
            }
        }
        CausalTree { roots }
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &CtNode) -> fmt::Result {
    write_label(f, &node.label)?;
    match node.children.as_slice() {
        [] => Ok(()),
        [only] => {
            f.write_str(" → ")?;
            write_node(f, only)
        }
        many => {
            f.write_str(" → (")?;
            write_forest(f, many)?;
            f.write_str(")")
        }
    }
}

fn write_label(f: &mut fmt::Formatter<'_>, label: &Interaction) -> fmt::Result {
    if label.is_empty() {
        return f.write_str("∅");
    }
    for (i, p) in label.ports().iter().enumerate() {
        if i > 0 {
            f.write_str("·")?;
        }
        write!(f, "{p}")?;
    }
    Ok(())
}

fn write_forest(f: &mut fmt::Formatter<'_>, nodes: &[CtNode]) -> fmt::Result {
    for (i, n) in nodes.iter().enumerate() {
        if i > 0 {
            f.write_str(" ⊕ ")?;
        }
        if nodes.len() > 1 && !n.children.is_empty() {
            f.write_str("(")?;
            write_node(f, n)?;
            f.write_str(")")?;
        } else {
            write_node(f, n)?;
        }
    }
    Ok(())
}

/// Arrow/⊕ notation, e.g. `(p → r·t → (s ⊕ u)) ⊕ (q → r·t → (s ⊕ u))`.
impl fmt::Display for CausalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.roots.is_empty() {
            return f.write_str("0");
        }
        write_forest(f, &self.roots)
    }
}

/// Translates a connector term into a causal tree.
pub fn tau(term: &AcTerm) -> CausalTree {
    tau_normal(&normalize_binary(term))
}

fn tau_normal(term: &AcTerm) -> CausalTree {
    match term {
        AcTerm::Port(p) => CausalTree::new(vec![CtNode::leaf(Interaction::new([p.clone()]))]),
        AcTerm::Zero => CausalTree::default(),
        AcTerm::One => CausalTree::new(vec![CtNode::leaf(Interaction::empty())]),
        AcTerm::Fusion(fs) => {
            if let [single] = fs.as_slice() {
                return tau_normal(&single.term);
            }
            let triggers: Vec<_> = fs.iter().filter(|f| f.is_trigger()).collect();
            match triggers.len() {
                0 => {
                    let mut it = fs.iter().map(|f| tau_normal(&f.term));
                    let first = it.next().unwrap_or_default();
                    it.fold(first, |acc, t| acc.product(&t))
                }
                1 => {
                    let extra: Vec<CtNode> = fs
                        .iter()
                        .filter(|f| !f.is_trigger())
                        .flat_map(|f| tau_normal(&f.term).roots)
                        .collect();
                    tau_normal(&triggers[0].term).under_each_root(&extra)
                }
                _ => {
                    // Synchrons beside several triggers are not produced by
                    // normalization; fold triggers then attach synchrons.
                    let mut roots: Vec<CtNode> = triggers.iter().flat_map(|f| tau_normal(&f.term).roots).collect();
                    let extra: Vec<CtNode> = fs
                        .iter()
                        .filter(|f| !f.is_trigger())
                        .flat_map(|f| tau_normal(&f.term).roots)
                        .collect();
                    if !extra.is_empty() {
                        roots = CausalTree::new(roots).under_each_root(&extra).roots;
                    }
                    CausalTree::new(roots)
                }
            }
        }
    }
}

/// Unions of labels over every nonempty parent-closed set of nodes.
pub fn ct_interactions(tree: &CausalTree) -> InteractionSet {
    let mut acc = InteractionSet::new();
    for root in &tree.roots {
        let sub = root.interactions();
        let mut next = acc.clone();
        next.extend(sub.iter().cloned());
        for u in &acc {
            for a in &sub {
                next.insert(u.union(a));
            }
        }
        acc = next;
    }
    acc
}

/// `head ⇒ ⋁ body`, each monomial a conjunction of ports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalRule {
    pub head: Port,
    pub body: BTreeSet<Interaction>,
}

impl fmt::Display for CausalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⇒ ", self.head)?;
        for (i, m) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∨ ")?;
            }
            write_label(f, m)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    /// Ordered by head.
    pub rules: Vec<CausalRule>,
    /// Disjunction of the ports of the root labels.
    pub root_clause: BTreeSet<Port>,
    /// Ports that occur in the tree but need no rule.
    pub free: BTreeSet<Port>,
}

impl RuleSet {
    pub fn rule(&self, head: &str) -> Option<&CausalRule> {
        self.rules.iter().find(|r| r.head.name() == head)
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        let roots: Vec<String> = self.root_clause.iter().map(ToString::to_string).collect();
        write!(f, "root: {}", roots.join(" ∨ "))
    }
}

/// Extracts one rule per port that needs one, plus the root clause.
///
/// A node labelled `a` under a parent labelled `b` gives each `p ∈ a` the
/// monomial `(a ∖ p) ∪ b`. A port that obtains the empty monomial is
/// unconstrained and gets no rule. Nodes with an empty label are transparent:
/// their children see the nearest labelled ancestor.
pub fn causal_rules(tree: &CausalTree) -> RuleSet {
    let mut bodies: BTreeMap<Port, BTreeSet<Interaction>> = BTreeMap::new();
    let mut free: BTreeSet<Port> = BTreeSet::new();
    let mut root_clause = BTreeSet::new();

    fn visit(
        node: &CtNode,
        parent: &Interaction,
        at_root: bool,
        bodies: &mut BTreeMap<Port, BTreeSet<Interaction>>,
        free: &mut BTreeSet<Port>,
        root_clause: &mut BTreeSet<Port>,
    ) {
        if node.label.is_empty() {
            for c in &node.children {
                visit(c, parent, at_root, bodies, free, root_clause);
            }
            return;
        }
        if at_root {
            root_clause.extend(node.label.ports().iter().cloned());
        }
        for p in node.label.ports() {
            let m = node.label.without(p).union(parent);
            if m.is_empty() {
                free.insert(p.clone());
            } else {
                bodies.entry(p.clone()).or_default().insert(m);
            }
        }
        for c in &node.children {
            visit(c, &node.label, false, bodies, free, root_clause);
        }
    }

    for r in &tree.roots {
        visit(r, &Interaction::empty(), true, &mut bodies, &mut free, &mut root_clause);
    }
    let rules = bodies
        .into_iter()
        .filter(|(p, _)| !free.contains(p))
        .map(|(head, body)| CausalRule { head, body })
        .collect();
    RuleSet {
        rules,
        root_clause,
        free,
    }
}

/// `⋀ rules ∧ ⋁ root_clause`, with port variables looked up by name. Ports of
/// `support` that the tree never mentions cannot participate and are negated.
pub fn rules_to_formula(mgr: &mut BddManager, rules: &RuleSet, support: &BTreeSet<Port>) -> Result<Bdd, BddError> {
    let mut roots = Vec::with_capacity(rules.root_clause.len());
    for p in &rules.root_clause {
        roots.push(mgr.var(p.name())?);
    }
    let mut acc = mgr.or_all(roots);
    for rule in &rules.rules {
        let mut disjuncts = Vec::with_capacity(rule.body.len());
        for m in &rule.body {
            let mut lits = Vec::with_capacity(m.len());
            for p in m.ports() {
                lits.push((mgr.var_by_name(p.name())?, true));
            }
            disjuncts.push(mgr.cube(&lits));
        }
        let body = mgr.or_all(disjuncts);
        let head = mgr.var(rule.head.name())?;
        let imp = mgr.implies(head, body);
        acc = mgr.and(acc, imp);
    }
    let mut absent = Vec::new();
    for p in support {
        if !rules.free.contains(p) && rules.rule(p.name()).is_none() {
            absent.push((mgr.var_by_name(p.name())?, false));
        }
    }
    let absent = mgr.cube(&absent);
    Ok(mgr.and(acc, absent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connector::{bool_to_interactions, Factor};

    fn i(ps: &[&str]) -> Interaction {
        Interaction::new(ps.iter().copied())
    }

    fn node(ps: &[&str], children: Vec<CtNode>) -> CtNode {
        CtNode::new(i(ps), children)
    }

    fn p(n: &str) -> AcTerm {
        AcTerm::port(n)
    }

    #[test]
    fn broadcast_tree() {
        let t = tau(&AcTerm::broadcast("s", &["r1", "r2", "r3"]));
        let expected = CausalTree::new(vec![node(
            &["s"],
            vec![node(&["r1"], vec![]), node(&["r2"], vec![]), node(&["r3"], vec![])],
        )]);
        assert!(t.equivalent(&expected), "{t}");
        assert_eq!(ct_interactions(&t).len(), 8);
    }

    #[test]
    fn reordered_branches_are_equivalent() {
        let a = CausalTree::new(vec![node(&["p"], vec![node(&["q"], vec![]), node(&["r"], vec![])])]);
        let b = CausalTree::new(vec![node(&["p"], vec![node(&["r"], vec![]), node(&["q"], vec![])])]);
        assert!(a.equivalent(&b));
        assert_ne!(a, b);
    }

    #[test]
    fn single_root_has_no_rules() {
        let rs = causal_rules(&tau(&p("p")));
        assert!(rs.rules.is_empty());
        assert_eq!(rs.root_clause, BTreeSet::from([Port::new("p")]));
    }

    #[test]
    fn zero_and_one() {
        assert!(tau(&AcTerm::Zero).roots.is_empty());
        let one = tau(&AcTerm::One);
        assert!(one.has_empty_label());
        assert_eq!(ct_interactions(&one), InteractionSet::from([Interaction::empty()]));
    }

    #[test]
    fn empty_label_is_transparent_for_rules() {
        let t = AcTerm::Fusion(vec![Factor::trigger(AcTerm::One), Factor::synchron(p("p"))]);
        let tree = tau(&t);
        assert_eq!(ct_interactions(&tree), t.interactions());
        let mut m = BddManager::with_vars(["p"]).unwrap();
        let f = rules_to_formula(&mut m, &causal_rules(&tree), &t.support()).unwrap();
        assert_eq!(
            bool_to_interactions(&m, f, &[Port::new("p")]).unwrap(),
            InteractionSet::from([i(&["p"])])
        );
    }

    #[test]
    fn display_uses_arrows() {
        let t = tau(&AcTerm::Fusion(vec![
            Factor::trigger(p("p")),
            Factor::synchron(AcTerm::rendezvous(&["q", "r"])),
        ]));
        assert_eq!(t.to_string(), "p → q·r");
    }
}
