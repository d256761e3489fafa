use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

use crate::manager::{Bdd, BddError, BddManager, Var, FALSE_IDX, TERMINAL_LEVEL, TRUE_IDX};

impl BddManager {
    /// Evaluates `f` under a total assignment indexed by variable level.
    pub fn eval(&self, f: Bdd, assignment: &[bool]) -> bool {
        let mut cur = self.owned(f);
        while cur > TRUE_IDX {
            let n = self.node(cur);
            cur = if assignment[n.var as usize] { n.high } else { n.low };
        }
        cur == TRUE_IDX
    }

    /// Number of distinct internal (non-terminal) nodes reachable from `f`.
    pub fn node_count(&self, f: Bdd) -> usize {
        let root = self.owned(f);
        let mut seen = FxHashSet::default();
        let mut stack = vec![root];
        while let Some(idx) = stack.pop() {
            if idx <= TRUE_IDX || !seen.insert(idx) {
                continue;
            }
            let n = self.node(idx);
            stack.push(n.low);
            stack.push(n.high);
        }
        seen.len()
    }

    /// Variables `f` depends on, in order.
    pub fn support(&self, f: Bdd) -> Vec<Var> {
        let mut flags = vec![false; self.var_count()];
        self.mark_support(self.owned(f), &mut flags);
        flags
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| Var(i as u32))
            .collect()
    }

    fn mark_support(&self, root: u32, flags: &mut [bool]) {
        let mut seen = FxHashSet::default();
        let mut stack = vec![root];
        while let Some(idx) = stack.pop() {
            if idx <= TRUE_IDX || !seen.insert(idx) {
                continue;
            }
            let n = self.node(idx);
            flags[n.var as usize] = true;
            stack.push(n.low);
            stack.push(n.high);
        }
    }

    /// Picks a satisfying total assignment (indexed by level) with a seeded
    /// random descent, or `None` when `f` is unsatisfiable.
    pub fn pick_sat(&self, f: Bdd, seed: u64) -> Option<Vec<bool>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.pick_sat_with(f, &mut rng)
    }

    /// As [`pick_sat`](Self::pick_sat) but drawing from a caller-owned generator.
    ///
    /// Support variables skipped along the chosen path get a random value;
    /// variables outside the support are set to `false`.
    pub fn pick_sat_with<R: Rng + ?Sized>(&self, f: Bdd, rng: &mut R) -> Option<Vec<bool>> {
        let root = self.owned(f);
        if root == FALSE_IDX {
            return None;
        }
        let mut in_support = vec![false; self.var_count()];
        self.mark_support(root, &mut in_support);
        let mut assignment = vec![false; self.var_count()];
        let mut cur = root;
        for level in 0..self.var_count() as u32 {
            let node = self.node(cur);
            if node.var == level {
                let take_high = if node.low == FALSE_IDX {
                    true
                } else if node.high == FALSE_IDX {
                    false
                } else {
                    rng.random_bool(0.5)
                };
                assignment[level as usize] = take_high;
                cur = if take_high { node.high } else { node.low };
            } else if in_support[level as usize] {
                assignment[level as usize] = rng.random_bool(0.5);
            }
        }
        debug_assert_eq!(cur, TRUE_IDX);
        Some(assignment)
    }

    /// All satisfying assignments of `f`, projected onto `vars` (listed in any
    /// order; each assignment is aligned with `vars`). The support of `f` must be
    /// contained in `vars`.
    pub fn sat_assignments(&self, f: Bdd, vars: &[Var]) -> Result<Vec<Vec<bool>>, BddError> {
        let root = self.check(f)?;
        let mut position = vec![usize::MAX; self.var_count()];
        for (i, &v) in vars.iter().enumerate() {
            self.check_var(v)?;
            position[v.level()] = i;
        }
        for v in self.support(f) {
            if position[v.level()] == usize::MAX {
                return Err(BddError::SupportOutsideVars(self.var_name(v).to_string()));
            }
        }
        let mut sorted: Vec<u32> = vars.iter().map(|v| v.0).collect();
        sorted.sort_unstable();
        sorted.dedup();
        let mut out = Vec::new();
        let mut current = vec![false; vars.len()];
        self.enumerate(root, &sorted, 0, &position, &mut current, &mut out);
        Ok(out)
    }

    fn enumerate(
        &self,
        f: u32,
        levels: &[u32],
        at: usize,
        position: &[usize],
        current: &mut Vec<bool>,
        out: &mut Vec<Vec<bool>>,
    ) {
        if f == FALSE_IDX {
            return;
        }
        if at == levels.len() {
            debug_assert_eq!(f, TRUE_IDX);
            out.push(current.clone());
            return;
        }
        let level = levels[at];
        let n = self.node(f);
        let slot = position[level as usize];
        let (low, high) = if n.var == level && n.var != TERMINAL_LEVEL {
            (n.low, n.high)
        } else {
            (f, f)
        };
        current[slot] = false;
        self.enumerate(low, levels, at + 1, position, current, out);
        current[slot] = true;
        self.enumerate(high, levels, at + 1, position, current, out);
        current[slot] = false;
    }
}
