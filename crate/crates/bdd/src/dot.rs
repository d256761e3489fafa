use std::fmt::Write;

use rustc_hash::FxHashSet;

use crate::manager::{Bdd, BddManager, TRUE_IDX};

impl BddManager {
    /// Graphviz rendering of `f`; dashed edges are low (false) branches.
    pub fn to_dot(&self, f: Bdd) -> String {
        let root = self.owned(f);
        let mut out = String::from("digraph bdd {\n");
        out.push_str("  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n");
        let mut seen = FxHashSet::default();
        let mut stack = vec![root];
        while let Some(idx) = stack.pop() {
            if idx <= TRUE_IDX || !seen.insert(idx) {
                continue;
            }
            let n = self.node(idx);
            let name = &self.order.names()[n.var as usize];
            let _ = writeln!(out, "  n{idx} [label=\"{}\"];", name.replace('"', "\\\""));
            let _ = writeln!(out, "  n{idx} -> n{} [style=dashed];", n.low);
            let _ = writeln!(out, "  n{idx} -> n{};", n.high);
            stack.push(n.low);
            stack.push(n.high);
        }
        out.push_str("}\n");
        out
    }
}
