use std::fmt;

pub type Var = u32;

/// A literal: variable plus sign, packed as `2*var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(v: Var) -> Lit {
        Lit(v << 1)
    }

    pub fn neg(v: Var) -> Lit {
        Lit((v << 1) | 1)
    }

    pub fn var(self) -> Var {
        self.0 >> 1
    }

    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_neg() {
            write!(f, "-{}", self.var() + 1)
        } else {
            write!(f, "{}", self.var() + 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
    /// The decision cap was exhausted before an answer was found.
    DecisionCap,
}

const UNSET: u8 = 2;

fn lit_value(assign: &[u8], l: Lit) -> u8 {
    let a = assign[l.var() as usize];
    if a == UNSET {
        UNSET
    } else {
        a ^ (l.is_neg() as u8)
    }
}

#[derive(Clone)]
pub struct Solver {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
    /// watches[lit] = clauses currently watching `lit`
    watches: Vec<Vec<u32>>,
    /// truth value per variable: 0 false, 1 true, 2 unset
    assign: Vec<u8>,
    /// saved phase per variable, used as the decision polarity
    phase: Vec<bool>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    /// false once a contradiction is derived at the root level
    ok: bool,
    model: Vec<u8>,
    seen: Vec<bool>,
    /// decision scan hint, reset on backtrack
    next_var: u32,
    pub decisions: u64,
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            num_vars: 0,
            clauses: Vec::new(),
            watches: Vec::new(),
            assign: Vec::new(),
            phase: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            ok: true,
            model: Vec::new(),
            seen: Vec::new(),
            next_var: 0,
            decisions: 0,
        }
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.num_vars;
        self.num_vars += 1;
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.assign.push(UNSET);
        self.phase.push(false);
        self.level.push(0);
        self.reason.push(None);
        self.model.push(UNSET);
        self.seen.push(false);
        v
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Default decision polarity for a variable.
    pub fn set_polarity(&mut self, v: Var, value: bool) {
        self.phase[v as usize] = value;
    }

    fn value_lit(&self, l: Lit) -> u8 {
        lit_value(&self.assign, l)
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    /// Add a clause. Must be called with the solver at the root level.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        debug_assert_eq!(self.decision_level(), 0);
        if !self.ok {
            return;
        }
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort();
        c.dedup();
        // tautology?
        for w in c.windows(2) {
            if w[0].var() == w[1].var() {
                return;
            }
        }
        // drop literals already false at the root, skip satisfied clauses
        c.retain(|&l| {
            if self.value_lit(l) == 0 && self.level[l.var() as usize] == 0 {
                false
            } else {
                true
            }
        });
        if c.iter().any(|&l| self.value_lit(l) == 1 && self.level[l.var() as usize] == 0) {
            return;
        }
        match c.len() {
            0 => self.ok = false,
            1 => {
                if self.value_lit(c[0]) == 0 {
                    self.ok = false;
                } else if self.value_lit(c[0]) == UNSET {
                    self.enqueue(c[0], None);
                    if self.propagate().is_some() {
                        self.ok = false;
                    }
                }
            }
            _ => {
                let ci = self.clauses.len() as u32;
                self.watches[c[0].index()].push(ci);
                self.watches[c[1].index()].push(ci);
                self.clauses.push(c);
            }
        }
    }

    fn enqueue(&mut self, l: Lit, reason: Option<u32>) {
        let v = l.var() as usize;
        debug_assert_eq!(self.assign[v], UNSET);
        self.assign[v] = !l.is_neg() as u8;
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p.negate();
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut i = 0;
            let mut j = 0;
            'clauses: while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let clause = &mut self.clauses[ci as usize];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                debug_assert_eq!(clause[1], false_lit);
                let first = clause[0];
                if lit_value(&self.assign, first) == 1 {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                for k in 2..clause.len() {
                    if lit_value(&self.assign, clause[k]) != 0 {
                        clause.swap(1, k);
                        let moved = clause[1];
                        self.watches[moved.index()].push(ci);
                        continue 'clauses;
                    }
                }
                // unit or conflicting
                ws[j] = ci;
                j += 1;
                if self.value_lit(first) == 0 {
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    ws.truncate(j);
                    self.watches[false_lit.index()] = ws;
                    self.qhead = self.trail.len();
                    return Some(ci);
                }
                self.enqueue(first, Some(ci));
            }
            ws.truncate(j);
            self.watches[false_lit.index()] = ws;
        }
        None
    }

    fn backtrack(&mut self, target: usize) {
        while self.decision_level() > target {
            let lim = self.trail_lim.pop().unwrap();
            while self.trail.len() > lim {
                let l = self.trail.pop().unwrap();
                let v = l.var() as usize;
                self.phase[v] = !l.is_neg();
                self.assign[v] = UNSET;
                self.reason[v] = None;
            }
        }
        self.qhead = self.trail.len();
        self.next_var = 0;
    }

    /// First-UIP conflict analysis; returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, usize) {
        let current = self.decision_level() as u32;
        let mut learnt: Vec<Lit> = vec![Lit::pos(0)]; // placeholder
        let mut counter = 0usize;
        let mut index = self.trail.len();
        let mut p: Option<Lit> = None;
        loop {
            let clause = &self.clauses[confl as usize];
            for &q in clause {
                if let Some(p) = p {
                    if q == p.negate() || q == p {
                        continue;
                    }
                }
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            // next seen literal on the trail
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let pl = self.trail[index];
            let v = pl.var() as usize;
            self.seen[v] = false;
            counter -= 1;
            if counter == 0 {
                learnt[0] = pl.negate();
                break;
            }
            p = Some(pl);
            confl = self.reason[v].expect("non-decision literal has a reason");
        }
        for l in &learnt[1..] {
            self.seen[l.var() as usize] = false;
        }
        // backjump to the second-highest level in the clause
        let mut bt = 0usize;
        let mut max_i = 0usize;
        for (i, l) in learnt.iter().enumerate().skip(1) {
            let lv = self.level[l.var() as usize] as usize;
            if lv > bt {
                bt = lv;
                max_i = i;
            }
        }
        if max_i > 1 {
            learnt.swap(1, max_i);
        }
        (learnt, bt)
    }

    fn record_learnt(&mut self, learnt: Vec<Lit>) {
        let asserting = learnt[0];
        match learnt.len() {
            1 => {
                self.enqueue(asserting, None);
            }
            _ => {
                let ci = self.clauses.len() as u32;
                self.watches[learnt[0].index()].push(ci);
                self.watches[learnt[1].index()].push(ci);
                self.clauses.push(learnt);
                self.enqueue(asserting, Some(ci));
            }
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while (self.next_var as usize) < self.assign.len() {
            let v = self.next_var;
            if self.assign[v as usize] == UNSET {
                return Some(if self.phase[v as usize] { Lit::pos(v) } else { Lit::neg(v) });
            }
            self.next_var += 1;
        }
        None
    }

    /// Solve under the given assumptions, with at most `max_decisions`
    /// decisions. The model (on `Sat`) is read with [`Solver::model_value`].
    pub fn solve(&mut self, assumptions: &[Lit], max_decisions: u64) -> SolveResult {
        self.backtrack(0);
        if !self.ok {
            return SolveResult::Unsat;
        }
        if self.propagate().is_some() {
            self.ok = false;
            return SolveResult::Unsat;
        }
        self.decisions = 0;
        loop {
            if let Some(confl) = self.propagate() {
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SolveResult::Unsat;
                }
                let (learnt, mut bt) = self.analyze(confl);
                // never undo an assumption that is still consistent: jumping
                // into assumption levels is fine, the decide step restores them
                if bt >= self.decision_level() {
                    bt = self.decision_level() - 1;
                }
                self.backtrack(bt);
                self.record_learnt(learnt);
            } else if self.decision_level() < assumptions.len() {
                let p = assumptions[self.decision_level()];
                match self.value_lit(p) {
                    1 => self.trail_lim.push(self.trail.len()),
                    0 => {
                        self.backtrack(0);
                        return SolveResult::Unsat;
                    }
                    _ => {
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(p, None);
                    }
                }
            } else if let Some(next) = self.pick_branch() {
                self.decisions += 1;
                if self.decisions > max_decisions {
                    self.backtrack(0);
                    return SolveResult::DecisionCap;
                }
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, None);
            } else {
                self.model.copy_from_slice(&self.assign);
                self.backtrack(0);
                return SolveResult::Sat;
            }
        }
    }

    /// Value of a literal in the most recent model.
    pub fn model_value(&self, l: Lit) -> bool {
        let a = self.model[l.var() as usize];
        debug_assert_ne!(a, UNSET, "variable unassigned in model");
        (a == 1) != l.is_neg()
    }
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}
