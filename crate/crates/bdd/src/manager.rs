use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::memo::DenseMemo;
use crate::ops::Op;

pub(crate) const FALSE_IDX: u32 = 0;
pub(crate) const TRUE_IDX: u32 = 1;
pub(crate) const TERMINAL_LEVEL: u32 = u32::MAX;

static NEXT_MANAGER_ID: AtomicU32 = AtomicU32::new(1);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BddError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` appears twice in the variable order")]
    DuplicateVariable(String),
    #[error("BDD handle belongs to a different manager")]
    ManagerMismatch,
    #[error("function depends on variable `{0}`, which is outside the requested variable set")]
    SupportOutsideVars(String),
}

/// A variable, identified by its level in the manager's order (0 = topmost).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub(crate) u32);

impl Var {
    pub fn from_level(level: usize) -> Var {
        Var(level as u32)
    }

    pub fn level(self) -> usize {
        self.0 as usize
    }
}

/// Handle to a node of one particular [`BddManager`].
///
/// Canonicity: for handles of the same manager, `f == g` iff the functions are
/// equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bdd {
    pub(crate) mgr: u32,
    pub(crate) idx: u32,
}

impl Bdd {
    pub fn is_false(self) -> bool {
        self.idx == FALSE_IDX
    }

    pub fn is_true(self) -> bool {
        self.idx == TRUE_IDX
    }

    pub fn is_constant(self) -> bool {
        self.idx <= TRUE_IDX
    }
}

/// Total, duplicate-free ordering of variable names.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VarOrder(Vec<String>);

impl VarOrder {
    pub fn new<I, S>(names: I) -> Result<Self, BddError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = HashMap::with_capacity(names.len());
        for name in &names {
            if seen.insert(name.as_str(), ()).is_some() {
                return Err(BddError::DuplicateVariable(name.clone()));
            }
        }
        Ok(VarOrder(names))
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Node {
    pub(crate) var: u32,
    pub(crate) low: u32,
    pub(crate) high: u32,
}

/// Position in the node store, see [`BddManager::rollback`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mark(u32);

/// Owner of the node store, the unique table and the operation caches.
pub struct BddManager {
    pub(crate) id: u32,
    pub(crate) order: VarOrder,
    by_name: HashMap<String, Var>,
    pub(crate) nodes: Vec<Node>,
    unique: FxHashMap<Node, u32>,
    pub(crate) apply_cache: FxHashMap<(Op, u32, u32), u32>,
    pub(crate) ite_cache: FxHashMap<(u32, u32, u32), u32>,
    pub(crate) memo: DenseMemo,
}

impl fmt::Debug for BddManager {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BddManager")
            .field("vars", &self.order.len())
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl BddManager {
    pub fn new(order: VarOrder) -> Self {
        let by_name = order
            .names()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), Var(i as u32)))
            .collect();
        let terminal = |idx| Node {
            var: TERMINAL_LEVEL,
            low: idx,
            high: idx,
        };
        BddManager {
            id: NEXT_MANAGER_ID.fetch_add(1, Ordering::Relaxed),
            order,
            by_name,
            nodes: vec![terminal(FALSE_IDX), terminal(TRUE_IDX)],
            unique: FxHashMap::default(),
            apply_cache: FxHashMap::default(),
            ite_cache: FxHashMap::default(),
            memo: DenseMemo::default(),
        }
    }

    /// Convenience constructor from a list of names.
    pub fn with_vars<I, S>(names: I) -> Result<Self, BddError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ok(Self::new(VarOrder::new(names)?))
    }

    pub fn order(&self) -> &VarOrder {
        &self.order
    }

    pub fn var_count(&self) -> usize {
        self.order.len()
    }

    pub fn var_by_name(&self, name: &str) -> Result<Var, BddError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| BddError::UnknownVariable(name.to_string()))
    }

    pub fn var_at(&self, level: usize) -> Result<Var, BddError> {
        if level < self.order.len() {
            Ok(Var(level as u32))
        } else {
            Err(BddError::UnknownVariable(format!("#{level}")))
        }
    }

    pub fn var_name(&self, var: Var) -> &str {
        &self.order.names()[var.level()]
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (0..self.order.len() as u32).map(Var)
    }

    /// The single-node function that is true iff `name` is true.
    pub fn var(&mut self, name: &str) -> Result<Bdd, BddError> {
        let v = self.var_by_name(name)?;
        Ok(self.literal(v, true))
    }

    pub fn literal(&mut self, var: Var, positive: bool) -> Bdd {
        let idx = if positive {
            self.mk(var.0, FALSE_IDX, TRUE_IDX)
        } else {
            self.mk(var.0, TRUE_IDX, FALSE_IDX)
        };
        self.handle(idx)
    }

    pub fn constant(&self, value: bool) -> Bdd {
        self.handle(if value { TRUE_IDX } else { FALSE_IDX })
    }

    /// Number of nodes in the store, terminals included.
    pub fn store_size(&self) -> usize {
        self.nodes.len()
    }

    pub(crate) fn handle(&self, idx: u32) -> Bdd {
        Bdd { mgr: self.id, idx }
    }

    pub(crate) fn check(&self, f: Bdd) -> Result<u32, BddError> {
        if f.mgr == self.id {
            Ok(f.idx)
        } else {
            Err(BddError::ManagerMismatch)
        }
    }

    /// Fails when `f` was created by another manager.
    pub fn check_handle(&self, f: Bdd) -> Result<(), BddError> {
        self.check(f).map(|_| ())
    }

    pub(crate) fn owned(&self, f: Bdd) -> u32 {
        assert_eq!(f.mgr, self.id, "BDD handle belongs to a different manager");
        f.idx
    }

    pub(crate) fn check_var(&self, var: Var) -> Result<(), BddError> {
        if var.level() < self.order.len() {
            Ok(())
        } else {
            Err(BddError::UnknownVariable(format!("#{}", var.0)))
        }
    }

    #[inline]
    pub(crate) fn level(&self, idx: u32) -> u32 {
        self.nodes[idx as usize].var
    }

    #[inline]
    pub(crate) fn node(&self, idx: u32) -> Node {
        self.nodes[idx as usize]
    }

    /// Hash-consing constructor; enforces reduction (`low != high`).
    pub(crate) fn mk(&mut self, var: u32, low: u32, high: u32) -> u32 {
        if low == high {
            return low;
        }
        debug_assert!(var < self.level(low) && var < self.level(high));
        let node = Node { var, low, high };
        if let Some(&idx) = self.unique.get(&node) {
            return idx;
        }
        let idx = self.nodes.len() as u32;
        self.nodes.push(node);
        self.unique.insert(node, idx);
        idx
    }

    /// Drops every cached operation result. The node store is untouched.
    pub fn clear_caches(&mut self) {
        self.apply_cache = FxHashMap::default();
        self.ite_cache = FxHashMap::default();
    }

    pub fn mark(&self) -> Mark {
        Mark(self.nodes.len() as u32)
    }

    /// Removes every node created after `mark` and clears the operation caches.
    ///
    /// Handles created after `mark` become invalid and must not be used again.
    pub fn rollback(&mut self, mark: Mark) {
        let keep = mark.0 as usize;
        if keep >= self.nodes.len() {
            return;
        }
        for node in self.nodes.drain(keep..) {
            self.unique.remove(&node);
        }
        self.apply_cache.clear();
        self.ite_cache.clear();
    }

    /// Rebuilds the node store so that it holds only the nodes reachable from
    /// `roots`, and returns the roots' new handles in the same order.
    ///
    /// Every other handle of this manager, including marks, becomes invalid;
    /// the manager takes a fresh identity so stale handles are rejected.
    pub fn compact(&mut self, roots: &[Bdd]) -> Result<Vec<Bdd>, BddError> {
        let old_roots = roots.iter().map(|&f| self.check(f)).collect::<Result<Vec<_>, _>>()?;
        let mut remap = vec![u32::MAX; self.nodes.len()];
        remap[FALSE_IDX as usize] = FALSE_IDX;
        remap[TRUE_IDX as usize] = TRUE_IDX;
        let mut live = Vec::new();
        let mut stack = old_roots.clone();
        while let Some(idx) = stack.pop() {
            if remap[idx as usize] != u32::MAX {
                continue;
            }
            remap[idx as usize] = 0;
            live.push(idx);
            let n = self.nodes[idx as usize];
            stack.push(n.low);
            stack.push(n.high);
        }
        // Children always have smaller indices than their parents.
        live.sort_unstable();
        let mut nodes = Vec::with_capacity(live.len() + 2);
        nodes.extend_from_slice(&self.nodes[..2]);
        let mut unique = FxHashMap::default();
        unique.reserve(live.len());
        for idx in live {
            let n = self.nodes[idx as usize];
            let node = Node {
                var: n.var,
                low: remap[n.low as usize],
                high: remap[n.high as usize],
            };
            let new_idx = nodes.len() as u32;
            nodes.push(node);
            unique.insert(node, new_idx);
            remap[idx as usize] = new_idx;
        }
        self.nodes = nodes;
        self.unique = unique;
        self.clear_caches();
        self.id = NEXT_MANAGER_ID.fetch_add(1, Ordering::Relaxed);
        Ok(old_roots.into_iter().map(|r| self.handle(remap[r as usize])).collect())
    }

    /// Checks the structural invariants of every node in the store: reduction,
    /// strict level ordering along edges, and unique-table consistency.
    pub fn audit(&self) -> Result<(), String> {
        for (idx, node) in self.nodes.iter().enumerate().skip(2) {
            if node.low == node.high {
                return Err(format!("node {idx} is redundant (low == high)"));
            }
            if node.var as usize >= self.order.len() {
                return Err(format!("node {idx} has unknown level {}", node.var));
            }
            for child in [node.low, node.high] {
                if child as usize >= idx {
                    return Err(format!("node {idx} points forward to {child}"));
                }
                if self.level(child) <= node.var {
                    return Err(format!("node {idx} violates the variable order"));
                }
            }
            if self.unique.get(node) != Some(&(idx as u32)) {
                return Err(format!("node {idx} is not hash-consed"));
            }
        }
        if self.unique.len() != self.nodes.len() - 2 {
            return Err("unique table and node store disagree".into());
        }
        Ok(())
    }
}
