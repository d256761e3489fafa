use crate::manager::{Bdd, BddError, BddManager, Var, FALSE_IDX, TERMINAL_LEVEL, TRUE_IDX};
use crate::memo::DenseMemo;

/// Binary boolean connectives supported by [`BddManager::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    And,
    Or,
    Xor,
    Implies,
}

impl Op {
    fn eval(self, a: bool, b: bool) -> bool {
        match self {
            Op::And => a && b,
            Op::Or => a || b,
            Op::Xor => a != b,
            Op::Implies => !a || b,
        }
    }

    fn commutative(self) -> bool {
        !matches!(self, Op::Implies)
    }

    /// Shortcut results that need no recursion.
    fn terminal_case(self, f: u32, g: u32) -> Option<u32> {
        if f <= TRUE_IDX && g <= TRUE_IDX {
            return Some(self.eval(f == TRUE_IDX, g == TRUE_IDX) as u32);
        }
        match self {
            Op::And => {
                if f == FALSE_IDX || g == FALSE_IDX {
                    Some(FALSE_IDX)
                } else if f == TRUE_IDX || f == g {
                    Some(g)
                } else if g == TRUE_IDX {
                    Some(f)
                } else {
                    None
                }
            }
            Op::Or => {
                if f == TRUE_IDX || g == TRUE_IDX {
                    Some(TRUE_IDX)
                } else if f == FALSE_IDX || f == g {
                    Some(g)
                } else if g == FALSE_IDX {
                    Some(f)
                } else {
                    None
                }
            }
            Op::Xor => {
                if f == g {
                    Some(FALSE_IDX)
                } else if f == FALSE_IDX {
                    Some(g)
                } else if g == FALSE_IDX {
                    Some(f)
                } else {
                    None
                }
            }
            Op::Implies => {
                if f == FALSE_IDX || g == TRUE_IDX || f == g {
                    Some(TRUE_IDX)
                } else if f == TRUE_IDX {
                    Some(g)
                } else {
                    None
                }
            }
        }
    }
}

impl BddManager {
    /// Checked binary apply; fails when either handle comes from another manager.
    pub fn apply(&mut self, op: Op, f: Bdd, g: Bdd) -> Result<Bdd, BddError> {
        let (f, g) = (self.check(f)?, self.check(g)?);
        let r = self.apply_rec(op, f, g);
        Ok(self.handle(r))
    }

    pub fn and(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let (f, g) = (self.owned(f), self.owned(g));
        let r = self.apply_rec(Op::And, f, g);
        self.handle(r)
    }

    pub fn or(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let (f, g) = (self.owned(f), self.owned(g));
        let r = self.apply_rec(Op::Or, f, g);
        self.handle(r)
    }

    pub fn xor(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let (f, g) = (self.owned(f), self.owned(g));
        let r = self.apply_rec(Op::Xor, f, g);
        self.handle(r)
    }

    pub fn implies(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let (f, g) = (self.owned(f), self.owned(g));
        let r = self.apply_rec(Op::Implies, f, g);
        self.handle(r)
    }

    /// Negation, computed as `ite(f, false, true)`.
    pub fn not(&mut self, f: Bdd) -> Bdd {
        let f = self.owned(f);
        let r = self.ite_rec(f, FALSE_IDX, TRUE_IDX);
        self.handle(r)
    }

    pub fn ite(&mut self, f: Bdd, g: Bdd, h: Bdd) -> Bdd {
        let (f, g, h) = (self.owned(f), self.owned(g), self.owned(h));
        let r = self.ite_rec(f, g, h);
        self.handle(r)
    }

    /// Conjunction of many functions, combined pairwise in a balanced tree.
    pub fn and_all<I: IntoIterator<Item = Bdd>>(&mut self, fs: I) -> Bdd {
        self.reduce_balanced(Op::And, fs.into_iter().collect())
    }

    /// Disjunction of many functions, combined pairwise in a balanced tree.
    pub fn or_all<I: IntoIterator<Item = Bdd>>(&mut self, fs: I) -> Bdd {
        self.reduce_balanced(Op::Or, fs.into_iter().collect())
    }

    fn reduce_balanced(&mut self, op: Op, mut layer: Vec<Bdd>) -> Bdd {
        let (unit, zero) = match op {
            Op::And => (TRUE_IDX, FALSE_IDX),
            _ => (FALSE_IDX, TRUE_IDX),
        };
        if layer.is_empty() {
            return self.handle(unit);
        }
        while layer.len() > 1 {
            let mut next = Vec::with_capacity(layer.len().div_ceil(2));
            for pair in layer.chunks(2) {
                let r = match pair {
                    [f, g] => {
                        let (f, g) = (self.owned(*f), self.owned(*g));
                        self.apply_rec(op, f, g)
                    }
                    [f] => self.owned(*f),
                    _ => unreachable!(),
                };
                if r == zero {
                    return self.handle(zero);
                }
                next.push(self.handle(r));
            }
            layer = next;
        }
        self.owned(layer[0]);
        layer[0]
    }

    /// Conjunction of literals, built bottom-up without calls to `apply`.
    /// Contradictory literals yield `false`.
    pub fn cube(&mut self, literals: &[(Var, bool)]) -> Bdd {
        let mut lits = literals.to_vec();
        lits.sort_unstable_by_key(|l| std::cmp::Reverse(l.0));
        let mut acc = TRUE_IDX;
        let mut prev: Option<(Var, bool)> = None;
        for (var, value) in lits {
            if let Some((pv, pval)) = prev {
                if pv == var {
                    if pval != value {
                        return self.constant(false);
                    }
                    continue;
                }
            }
            acc = if value {
                self.mk(var.0, FALSE_IDX, acc)
            } else {
                self.mk(var.0, acc, FALSE_IDX)
            };
            prev = Some((var, value));
        }
        self.handle(acc)
    }

    pub(crate) fn apply_rec(&mut self, op: Op, f: u32, g: u32) -> u32 {
        if let Some(r) = op.terminal_case(f, g) {
            return r;
        }
        let key = if op.commutative() && g < f {
            (op, g, f)
        } else {
            (op, f, g)
        };
        if let Some(&r) = self.apply_cache.get(&key) {
            return r;
        }
        let (fv, gv) = (self.level(f), self.level(g));
        let top = fv.min(gv);
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let low = self.apply_rec(op, f0, g0);
        let high = self.apply_rec(op, f1, g1);
        let r = self.mk(top, low, high);
        self.apply_cache.insert(key, r);
        r
    }

    pub(crate) fn ite_rec(&mut self, f: u32, g: u32, h: u32) -> u32 {
        if f == TRUE_IDX {
            return g;
        }
        if f == FALSE_IDX {
            return h;
        }
        if g == h {
            return g;
        }
        if g == TRUE_IDX && h == FALSE_IDX {
            return f;
        }
        if let Some(&r) = self.ite_cache.get(&(f, g, h)) {
            return r;
        }
        let top = self.level(f).min(self.level(g)).min(self.level(h));
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let (h0, h1) = self.cofactors(h, top);
        let low = self.ite_rec(f0, g0, h0);
        let high = self.ite_rec(f1, g1, h1);
        let r = self.mk(top, low, high);
        self.ite_cache.insert((f, g, h), r);
        r
    }

    #[inline]
    fn cofactors(&self, f: u32, level: u32) -> (u32, u32) {
        let n = self.node(f);
        if n.var == level {
            (n.low, n.high)
        } else {
            (f, f)
        }
    }

    /// Shannon cofactor of `f` with `var` fixed to `value`.
    pub fn restrict(&mut self, f: Bdd, var: Var, value: bool) -> Result<Bdd, BddError> {
        self.restrict_cube(f, &[(var, value)])
    }

    /// Simultaneous cofactor for several variables in one pass over `f`.
    pub fn restrict_cube(&mut self, f: Bdd, assignment: &[(Var, bool)]) -> Result<Bdd, BddError> {
        let root = self.check(f)?;
        // Per level: 0 = free, 1 = fixed false, 2 = fixed true.
        let mut fixed = vec![0u8; self.var_count()];
        let mut deepest = None;
        for &(v, val) in assignment {
            self.check_var(v)?;
            fixed[v.level()] = 1 + val as u8;
            deepest = deepest.max(Some(v.0));
        }
        let Some(deepest) = deepest else {
            return Ok(f);
        };
        let mut memo = std::mem::take(&mut self.memo);
        memo.begin(self.nodes.len());
        let r = self.restrict_rec(root, &fixed, deepest, &mut memo);
        self.memo = memo;
        Ok(self.handle(r))
    }

    fn restrict_rec(&mut self, f: u32, fixed: &[u8], deepest: u32, memo: &mut DenseMemo) -> u32 {
        let n = self.node(f);
        if n.var == TERMINAL_LEVEL || n.var > deepest {
            return f;
        }
        if let Some(r) = memo.get(f) {
            return r;
        }
        let r = match fixed[n.var as usize] {
            0 => {
                let low = self.restrict_rec(n.low, fixed, deepest, memo);
                let high = self.restrict_rec(n.high, fixed, deepest, memo);
                if low == n.low && high == n.high {
                    f
                } else {
                    self.mk(n.var, low, high)
                }
            }
            1 => self.restrict_rec(n.low, fixed, deepest, memo),
            _ => self.restrict_rec(n.high, fixed, deepest, memo),
        };
        memo.set(f, r);
        r
    }

    /// `∃vars. f` with `assignment` applied, in one pass over `f`.
    pub fn restrict_exists(&mut self, f: Bdd, assignment: &[(Var, bool)], vars: &[Var]) -> Result<Bdd, BddError> {
        let root = self.check(f)?;
        // Per level: 0 = free, 1 = fixed false, 2 = fixed true, 3 = quantified.
        let mut mode = vec![0u8; self.var_count()];
        let mut deepest = None;
        for &(v, val) in assignment {
            self.check_var(v)?;
            mode[v.level()] = 1 + val as u8;
            deepest = deepest.max(Some(v.0));
        }
        for &v in vars {
            self.check_var(v)?;
            mode[v.level()] = 3;
            deepest = deepest.max(Some(v.0));
        }
        let Some(deepest) = deepest else {
            return Ok(f);
        };
        let mut memo = std::mem::take(&mut self.memo);
        memo.begin(self.nodes.len());
        let r = self.restrict_exists_rec(root, &mode, deepest, &mut memo);
        self.memo = memo;
        Ok(self.handle(r))
    }

    fn restrict_exists_rec(&mut self, f: u32, mode: &[u8], deepest: u32, memo: &mut DenseMemo) -> u32 {
        let n = self.node(f);
        if n.var == TERMINAL_LEVEL || n.var > deepest {
            return f;
        }
        if let Some(r) = memo.get(f) {
            return r;
        }
        let r = match mode[n.var as usize] {
            0 => {
                let low = self.restrict_exists_rec(n.low, mode, deepest, memo);
                let high = self.restrict_exists_rec(n.high, mode, deepest, memo);
                if low == n.low && high == n.high {
                    f
                } else {
                    self.mk(n.var, low, high)
                }
            }
            1 => self.restrict_exists_rec(n.low, mode, deepest, memo),
            2 => self.restrict_exists_rec(n.high, mode, deepest, memo),
            _ => {
                let low = self.restrict_exists_rec(n.low, mode, deepest, memo);
                if low == TRUE_IDX {
                    TRUE_IDX
                } else {
                    let high = self.restrict_exists_rec(n.high, mode, deepest, memo);
                    self.apply_rec(Op::Or, low, high)
                }
            }
        };
        memo.set(f, r);
        r
    }

    /// `f ∧ ¬g` without building `¬g`.
    pub fn diff(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let (f, g) = (self.owned(f), self.owned(g));
        let r = self.ite_rec(g, FALSE_IDX, f);
        self.handle(r)
    }

    /// Existential quantification over `vars`.
    pub fn exists(&mut self, f: Bdd, vars: &[Var]) -> Result<Bdd, BddError> {
        let root = self.check(f)?;
        let mut quantified = vec![false; self.var_count()];
        let mut deepest = None;
        for &v in vars {
            self.check_var(v)?;
            quantified[v.level()] = true;
            deepest = deepest.max(Some(v.0));
        }
        let Some(deepest) = deepest else {
            return Ok(f);
        };
        let mut memo = std::mem::take(&mut self.memo);
        memo.begin(self.nodes.len());
        let r = self.exists_rec(root, &quantified, deepest, &mut memo);
        self.memo = memo;
        Ok(self.handle(r))
    }

    fn exists_rec(&mut self, f: u32, quantified: &[bool], deepest: u32, memo: &mut DenseMemo) -> u32 {
        let level = self.level(f);
        if level == TERMINAL_LEVEL || level > deepest {
            return f;
        }
        if let Some(r) = memo.get(f) {
            return r;
        }
        let n = self.node(f);
        let low = self.exists_rec(n.low, quantified, deepest, memo);
        let r = if quantified[level as usize] {
            if low == TRUE_IDX {
                TRUE_IDX
            } else {
                let high = self.exists_rec(n.high, quantified, deepest, memo);
                self.apply_rec(Op::Or, low, high)
            }
        } else {
            let high = self.exists_rec(n.high, quantified, deepest, memo);
            self.mk(level, low, high)
        };
        memo.set(f, r);
        r
    }
}
