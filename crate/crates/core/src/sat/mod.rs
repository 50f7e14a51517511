//! Incremental CDCL SAT solver with assumptions and final-conflict cores.
//!
//! Two watched literals, first-UIP learning with basic clause minimization,
//! VSIDS branching, phase saving (initially false), Luby restarts and
//! LBD/activity based reduction of the learnt clause database.

mod heap;

use std::time::Instant;

use thiserror::Error;

use crate::cnf::{Clause, Lit, Model, Var};
use crate::encodings::ClauseSink;
use heap::VarHeap;

const NO_REASON: u32 = u32::MAX;
const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;

/// Result of a completed SAT call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Model),
    /// A subset of the assumptions that is unsatisfiable together with the
    /// clause database. Empty when the database alone is unsatisfiable.
    Unsat(Vec<Lit>),
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SatError {
    #[error("literal {0} is outside the {1} allocated variables")]
    VarOutOfRange(Lit, usize),
    #[error("no model: the last call was not satisfiable")]
    NoModel,
}

/// The deadline passed before the call completed.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("SAT call interrupted by deadline")]
pub struct Interrupted;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SatStats {
    pub solves: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

#[derive(Clone, Debug)]
struct ClauseData {
    lits: Vec<u32>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f64,
}

#[derive(Clone, Copy, Debug)]
struct Watcher {
    cref: u32,
    blocker: u32,
}

enum SearchStatus {
    Sat,
    Unsat,
    Restart,
    Interrupted,
}

#[derive(Clone, Debug)]
pub struct Solver {
    n_vars: usize,
    clauses: Vec<ClauseData>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    assign: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    model: Option<Model>,
    max_learnts: f64,
    deadline: Option<Instant>,
    stats: SatStats,
    minimize_cores: bool,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

fn lit_value(assign: &[i8], code: u32) -> i8 {
    let a = assign[(code >> 1) as usize];
    if code & 1 == 1 {
        -a
    } else {
        a
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0i32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            n_vars: 0,
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assign: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            polarity: Vec::new(),
            seen: Vec::new(),
            ok: true,
            model: None,
            max_learnts: 0.0,
            deadline: None,
            stats: SatStats::default(),
            minimize_cores: false,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n_vars
    }

    pub fn stats(&self) -> SatStats {
        self.stats
    }

    /// Enables deletion-based core minimization after each unsatisfiable call.
    pub fn set_minimize_cores(&mut self, on: bool) {
        self.minimize_cores = on;
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    /// Preferred polarity for the next decision on `var`.
    pub fn set_phase(&mut self, var: Var, value: bool) {
        self.reserve_vars(var.index() as usize);
        self.polarity[var.slot()] = value;
    }

    pub fn new_var(&mut self) -> Var {
        self.reserve_vars(self.n_vars + 1);
        Var::new(self.n_vars as u32)
    }

    /// Makes variables `1..=n` available.
    pub fn reserve_vars(&mut self, n: usize) {
        if n <= self.n_vars {
            return;
        }
        self.assign.resize(n, UNDEF);
        self.level.resize(n, 0);
        self.reason.resize(n, NO_REASON);
        self.activity.resize(n, 0.0);
        self.polarity.resize(n, false);
        self.seen.resize(n, false);
        self.watches.resize(2 * n, Vec::new());
        self.heap.grow(n);
        for v in self.n_vars..n {
            self.heap.insert(v as u32, &self.activity);
        }
        self.n_vars = n;
    }

    /// False once the database is unsatisfiable without assumptions.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.iter().filter(|c| !c.learnt && !c.deleted).count()
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn check_range(&self, lit: Lit) -> Result<u32, SatError> {
        if lit.var().slot() >= self.n_vars {
            Err(SatError::VarOutOfRange(lit, self.n_vars))
        } else {
            Ok(lit.code() as u32)
        }
    }

    pub fn add_clause(&mut self, clause: &Clause) -> Result<(), SatError> {
        self.add_lits(clause.lits())
    }

    /// Adds a clause given as literals. Duplicates and tautologies are tolerated.
    pub fn add_lits(&mut self, lits: &[Lit]) -> Result<(), SatError> {
        let mut codes = lits
            .iter()
            .map(|&l| self.check_range(l))
            .collect::<Result<Vec<u32>, _>>()?;
        if !self.ok {
            return Ok(());
        }
        debug_assert_eq!(self.decision_level(), 0);
        codes.sort_unstable();
        codes.dedup();
        if codes.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return Ok(());
        }
        if codes.iter().any(|&c| lit_value(&self.assign, c) == TRUE) {
            return Ok(());
        }
        codes.retain(|&c| lit_value(&self.assign, c) != FALSE);
        match codes.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(codes[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach_new(codes, false, 0);
            }
        }
        Ok(())
    }

    fn attach_new(&mut self, lits: Vec<u32>, learnt: bool, lbd: u32) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0] as usize].push(Watcher {
            cref,
            blocker: lits[1],
        });
        self.watches[lits[1] as usize].push(Watcher {
            cref,
            blocker: lits[0],
        });
        self.clauses.push(ClauseData {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn enqueue(&mut self, code: u32, reason: u32) {
        let v = (code >> 1) as usize;
        debug_assert_eq!(self.assign[v], UNDEF);
        self.assign[v] = if code & 1 == 1 { FALSE } else { TRUE };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(code);
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_value(&self.assign, w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let lits = &mut self.clauses[w.cref as usize].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if first != w.blocker && lit_value(&self.assign, first) == TRUE {
                    ws[j] = Watcher {
                        cref: w.cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if lit_value(&self.assign, lits[k]) != FALSE {
                        lits.swap(1, k);
                        let new_watch = lits[1];
                        self.watches[new_watch as usize].push(Watcher {
                            cref: w.cref,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                j += 1;
                if lit_value(&self.assign, first) == FALSE {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, mut confl: u32) -> (Vec<u32>, usize, u32) {
        let mut learnt: Vec<u32> = vec![0];
        let mut path = 0usize;
        let mut p: Option<u32> = None;
        let mut index = self.trail.len();
        let current = self.decision_level() as u32;
        loop {
            self.bump_clause(confl);
            let start = usize::from(p.is_some());
            let n = self.clauses[confl as usize].lits.len();
            for k in start..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = (q >> 1) as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[(self.trail[index] >> 1) as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            let v = (lit >> 1) as usize;
            confl = self.reason[v];
            self.seen[v] = false;
            p = Some(lit);
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = p.expect("conflict analysis visits at least one literal") ^ 1;

        // Drop literals whose reason is subsumed by the rest of the clause.
        let marked: Vec<u32> = learnt.clone();
        let mut keep = vec![learnt[0]];
        for &q in &learnt[1..] {
            let v = (q >> 1) as usize;
            let r = self.reason[v];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..].iter().all(|&x| {
                    let xv = (x >> 1) as usize;
                    self.seen[xv] || self.level[xv] == 0
                });
            if !redundant {
                keep.push(q);
            }
        }
        for &q in &marked {
            self.seen[(q >> 1) as usize] = false;
        }
        let mut learnt = keep;

        let mut bt = 0usize;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[(learnt[k] >> 1) as usize] > self.level[(learnt[max_i] >> 1) as usize]
                {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[(learnt[1] >> 1) as usize] as usize;
        }
        let mut levels: Vec<u32> = learnt.iter().map(|&q| self.level[(q >> 1) as usize]).collect();
        levels.sort_unstable();
        levels.dedup();
        (learnt, bt, levels.len() as u32)
    }

    /// Collects the assumptions responsible for `p` (an assumption) being false.
    fn analyze_final(&mut self, p: u32) -> Vec<u32> {
        let mut core = vec![p];
        if self.decision_level() == 0 {
            return core;
        }
        let pv = (p >> 1) as usize;
        self.seen[pv] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let x = self.trail[i];
            let v = (x >> 1) as usize;
            if !self.seen[v] {
                continue;
            }
            let r = self.reason[v];
            if r == NO_REASON {
                if self.level[v] > 0 {
                    core.push(x);
                }
            } else {
                for k in 1..self.clauses[r as usize].lits.len() {
                    let q = self.clauses[r as usize].lits[k];
                    let qv = (q >> 1) as usize;
                    if self.level[qv] > 0 {
                        self.seen[qv] = true;
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[pv] = false;
        core
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for i in (lim..self.trail.len()).rev() {
            let code = self.trail[i];
            let v = (code >> 1) as usize;
            self.polarity[v] = code & 1 == 0;
            self.assign[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<u32> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assign[v as usize] == UNDEF {
                let neg = !self.polarity[v as usize];
                return Some((v << 1) | u32::from(neg));
            }
        }
        None
    }

    fn locked(&self, cref: u32) -> bool {
        let c = &self.clauses[cref as usize];
        let v = (c.lits[0] >> 1) as usize;
        self.reason[v] == cref && lit_value(&self.assign, c.lits[0]) == TRUE
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<u32> = self
            .learnts
            .iter()
            .copied()
            .filter(|&c| self.clauses[c as usize].lbd > 2 && !self.locked(c))
            .collect();
        cands.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.partial_cmp(&cb.activity).unwrap_or(std::cmp::Ordering::Equal))
        });
        let n_remove = cands.len() / 2;
        if n_remove == 0 {
            return;
        }
        for &c in &cands[..n_remove] {
            let cd = &mut self.clauses[c as usize];
            cd.deleted = true;
            cd.lits = Vec::new();
        }
        for ws in &mut self.watches {
            ws.retain(|w| !self.clauses[w.cref as usize].deleted);
        }
        self.learnts.retain(|&c| !self.clauses[c as usize].deleted);
    }

    fn search(&mut self, budget: u64, assumps: &[u32], core: &mut Vec<u32>) -> SearchStatus {
        let mut local_conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                local_conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SearchStatus::Unsat;
                }
                let (learnt, bt, lbd) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let cref = self.attach_new(learnt, true, lbd);
                    self.bump_clause(cref);
                    self.enqueue(first, cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if self.stats.conflicts.is_multiple_of(64) {
                    if let Some(d) = self.deadline {
                        if Instant::now() >= d {
                            return SearchStatus::Interrupted;
                        }
                    }
                }
            } else {
                if local_conflicts >= budget {
                    self.cancel_until(0);
                    return SearchStatus::Restart;
                }
                if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                let mut next = None;
                while self.decision_level() < assumps.len() {
                    let p = assumps[self.decision_level()];
                    match lit_value(&self.assign, p) {
                        TRUE => self.trail_lim.push(self.trail.len()),
                        FALSE => {
                            *core = self.analyze_final(p);
                            return SearchStatus::Unsat;
                        }
                        _ => {
                            next = Some(p);
                            break;
                        }
                    }
                }
                let next = match next {
                    Some(p) => p,
                    None => {
                        self.stats.decisions += 1;
                        match self.pick_branch() {
                            Some(p) => p,
                            None => return SearchStatus::Sat,
                        }
                    }
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, NO_REASON);
            }
        }
    }

    /// Solves under `assumptions`, without a deadline.
    pub fn solve_under_assumptions(&mut self, assumptions: &[Lit]) -> SolveOutcome {
        let saved = self.deadline.take();
        let out = self.solve_limited(assumptions).expect("no deadline set");
        self.deadline = saved;
        out
    }

    pub fn solve(&mut self) -> SolveOutcome {
        self.solve_under_assumptions(&[])
    }

    /// Solves under `assumptions`, giving up once the deadline passes.
    pub fn solve_limited(&mut self, assumptions: &[Lit]) -> Result<SolveOutcome, Interrupted> {
        let out = self.solve_inner(assumptions)?;
        if self.minimize_cores {
            if let SolveOutcome::Unsat(core) = &out {
                if core.len() > 1 {
                    let core = self.minimize_core(core.clone())?;
                    return Ok(SolveOutcome::Unsat(core));
                }
            }
        }
        Ok(out)
    }

    fn solve_inner(&mut self, assumptions: &[Lit]) -> Result<SolveOutcome, Interrupted> {
        self.model = None;
        self.stats.solves += 1;
        if let Some(max) = assumptions.iter().map(|l| l.var().index() as usize).max() {
            self.reserve_vars(max);
        }
        if !self.ok {
            return Ok(SolveOutcome::Unsat(Vec::new()));
        }
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                return Err(Interrupted);
            }
        }
        let assumps: Vec<u32> = assumptions.iter().map(|l| l.code() as u32).collect();
        self.max_learnts = self.max_learnts.max(self.num_clauses() as f64 / 3.0).max(2000.0);
        let mut core = Vec::new();
        let mut restarts = 0u64;
        let status = loop {
            let budget = (luby(2.0, restarts) * 100.0) as u64;
            match self.search(budget, &assumps, &mut core) {
                SearchStatus::Restart => {
                    restarts += 1;
                    self.stats.restarts += 1;
                }
                other => break other,
            }
        };
        let out = match status {
            SearchStatus::Sat => {
                let values = self.assign.iter().map(|&a| a == TRUE).collect();
                let model = Model::new(values);
                self.model = Some(model.clone());
                Ok(SolveOutcome::Sat(model))
            }
            SearchStatus::Unsat => Ok(SolveOutcome::Unsat(
                core.into_iter().map(|c| Lit::from_code(c as usize)).collect(),
            )),
            SearchStatus::Interrupted => Err(Interrupted),
            SearchStatus::Restart => unreachable!(),
        };
        self.cancel_until(0);
        out
    }

    /// Deletion-based minimization: drops each literal whose removal keeps the core unsatisfiable.
    fn minimize_core(&mut self, mut core: Vec<Lit>) -> Result<Vec<Lit>, Interrupted> {
        let mut i = 0;
        while i < core.len() {
            let mut trial = core.clone();
            trial.remove(i);
            match self.solve_inner(&trial)? {
                SolveOutcome::Unsat(smaller) => {
                    core.retain(|l| smaller.contains(l));
                }
                SolveOutcome::Sat(_) => i += 1,
            }
        }
        self.model = None;
        Ok(core)
    }

    /// Value of `var` in the model of the last satisfiable call.
    pub fn model_value(&self, var: Var) -> Result<bool, SatError> {
        self.model
            .as_ref()
            .map(|m| m.value(var))
            .ok_or(SatError::NoModel)
    }

    pub fn model(&self) -> Option<&Model> {
        self.model.as_ref()
    }
}

impl ClauseSink for Solver {
    fn add_clause(&mut self, clause: Clause) {
        if let Some(v) = clause.max_var() {
            self.reserve_vars(v.index() as usize);
        }
        Solver::add_clause(self, &clause).expect("variables reserved above");
    }
}
