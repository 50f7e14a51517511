//! CNF data model: literals, clauses, weighted soft clauses and MaxSAT instances.

use std::fmt;
use std::ops::Not;

use thiserror::Error;

/// A propositional variable, 1-based as in DIMACS.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    /// Panics on index 0.
    pub fn new(index: u32) -> Var {
        assert!(index > 0, "variable indices are 1-based");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    /// Zero-based position, used for array indexing.
    pub fn slot(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 as i32)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit(-(self.0 as i32))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A literal in signed-integer DIMACS form. Never zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn from_dimacs(value: i32) -> Option<Lit> {
        if value == 0 || value == i32::MIN {
            None
        } else {
            Some(Lit(value))
        }
    }

    pub fn new(var: Var, positive: bool) -> Lit {
        if positive {
            var.pos()
        } else {
            var.neg()
        }
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Dense code `2 * slot + (negative as usize)`, used by the SAT engine.
    pub fn code(self) -> usize {
        (self.var().slot() << 1) | usize::from(self.0 < 0)
    }

    pub fn from_code(code: usize) -> Lit {
        let var = Var((code >> 1) as u32 + 1);
        Lit::new(var, code & 1 == 0)
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClauseError {
    #[error("clause contains both {0} and its negation")]
    Tautology(Lit),
}

/// A disjunction of literals with no duplicates and no complementary pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Deduplicates while keeping first-occurrence order; rejects tautologies.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Clause, ClauseError> {
        let mut out: Vec<Lit> = Vec::new();
        for lit in lits {
            if out.contains(&!lit) {
                return Err(ClauseError::Tautology(lit));
            }
            if !out.contains(&lit) {
                out.push(lit);
            }
        }
        Ok(Clause { lits: out })
    }

    /// Builds a clause from DIMACS integers. Panics on a zero literal.
    pub fn from_dimacs(values: &[i32]) -> Result<Clause, ClauseError> {
        Clause::new(
            values
                .iter()
                .map(|&v| Lit::from_dimacs(v).expect("zero is not a literal")),
        )
    }

    /// For encoder output that is duplicate- and tautology-free by construction.
    pub(crate) fn from_vec_unchecked(lits: Vec<Lit>) -> Clause {
        debug_assert!(Clause::new(lits.iter().copied()).map(|c| c.len()) == Ok(lits.len()));
        Clause { lits }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.contains(&lit)
    }

    /// Distinct variables, in literal order.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.lits.iter().map(|l| l.var())
    }

    pub fn max_var(&self) -> Option<Var> {
        self.vars().max()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for lit in &self.lits {
            write!(f, "{lit} ")?;
        }
        write!(f, "0")
    }
}

/// Outcome of resolving two clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolvent {
    Clause(Clause),
    Tautology,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("clauses do not clash on variable {0}")]
pub struct ResolveError(pub Var);

/// Resolves `c1` and `c2` on `var`, which must occur with opposite signs in the two clauses.
pub fn resolve(c1: &Clause, c2: &Clause, var: Var) -> Result<Resolvent, ResolveError> {
    let clash = (c1.contains(var.pos()) && c2.contains(var.neg()))
        || (c1.contains(var.neg()) && c2.contains(var.pos()));
    if !clash {
        return Err(ResolveError(var));
    }
    let rest = c1
        .lits()
        .iter()
        .chain(c2.lits())
        .copied()
        .filter(|l| l.var() != var);
    match Clause::new(rest) {
        Ok(c) => Ok(Resolvent::Clause(c)),
        Err(ClauseError::Tautology(_)) => Ok(Resolvent::Tautology),
    }
}

/// A soft clause with its weight and partition label (0 = unassigned).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SoftClause {
    pub clause: Clause,
    pub weight: u64,
    pub partition: u32,
}

impl SoftClause {
    pub fn new(clause: Clause, weight: u64) -> SoftClause {
        SoftClause {
            clause,
            weight,
            partition: 0,
        }
    }

    pub fn with_partition(mut self, partition: u32) -> SoftClause {
        self.partition = partition;
        self
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("literal {lit} exceeds n_vars = {n_vars}")]
    VarOutOfRange { lit: Lit, n_vars: u32 },
    #[error("soft clause {index} has weight {weight}, must be in [1, top)")]
    BadWeight { index: usize, weight: u64 },
    #[error("soft clause {index} has partition label {label} outside [1, {n_part}]")]
    BadPartition { index: usize, label: u32, n_part: u32 },
    #[error("weight sum overflows 64 bits")]
    WeightOverflow,
}

/// Hard clauses plus weighted soft clauses.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MaxSatInstance {
    pub n_vars: u32,
    pub hard: Vec<Clause>,
    pub soft: Vec<SoftClause>,
    pub top: u64,
}

impl MaxSatInstance {
    /// Checks variable range and weight bounds.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let check = |c: &Clause| -> Result<(), InstanceError> {
            match c.lits().iter().find(|l| l.var().index() > self.n_vars) {
                Some(&lit) => Err(InstanceError::VarOutOfRange {
                    lit,
                    n_vars: self.n_vars,
                }),
                None => Ok(()),
            }
        };
        for c in &self.hard {
            check(c)?;
        }
        for (index, s) in self.soft.iter().enumerate() {
            check(&s.clause)?;
            if s.weight == 0 || s.weight >= self.top {
                return Err(InstanceError::BadWeight {
                    index,
                    weight: s.weight,
                });
            }
        }
        self.total_soft_weight().map(|_| ())
    }

    pub fn total_soft_weight(&self) -> Result<u64, InstanceError> {
        self.soft.iter().try_fold(0u64, |acc, s| {
            acc.checked_add(s.weight).ok_or(InstanceError::WeightOverflow)
        })
    }

    pub fn is_unweighted(&self) -> bool {
        self.soft.iter().all(|s| s.weight == self.soft[0].weight)
    }

    pub fn num_clauses(&self) -> usize {
        self.hard.len() + self.soft.len()
    }

    /// All clauses, hard first then soft, in input order.
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> + '_ {
        self.hard.iter().chain(self.soft.iter().map(|s| &s.clause))
    }

    pub fn hard_satisfied(&self, model: &Model) -> bool {
        self.hard.iter().all(|c| model.satisfies(c))
    }

    /// Total weight of soft clauses falsified by `model`.
    pub fn cost(&self, model: &Model) -> u64 {
        self.soft
            .iter()
            .filter(|s| !model.satisfies(&s.clause))
            .map(|s| s.weight)
            .sum()
    }
}

/// A MaxSAT instance whose soft clauses all carry labels in `1..=n_part`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionedInstance {
    pub base: MaxSatInstance,
    pub n_part: u32,
    /// Labels of hard clauses as read from a pwcnf file. Advisory only.
    pub hard_labels: Vec<u32>,
}

impl PartitionedInstance {
    pub fn new(base: MaxSatInstance, n_part: u32) -> Result<PartitionedInstance, InstanceError> {
        for (index, s) in base.soft.iter().enumerate() {
            if s.partition == 0 || s.partition > n_part {
                return Err(InstanceError::BadPartition {
                    index,
                    label: s.partition,
                    n_part,
                });
            }
        }
        Ok(PartitionedInstance {
            base,
            n_part,
            hard_labels: Vec::new(),
        })
    }

    /// Checks the base instance and every soft label.
    pub fn validate(&self) -> Result<(), InstanceError> {
        self.base.validate()?;
        match self
            .base
            .soft
            .iter()
            .position(|s| s.partition == 0 || s.partition > self.n_part)
        {
            Some(index) => Err(InstanceError::BadPartition {
                index,
                label: self.base.soft[index].partition,
                n_part: self.n_part,
            }),
            None => Ok(()),
        }
    }

    /// Every soft clause in one block.
    pub fn single(mut base: MaxSatInstance) -> PartitionedInstance {
        for s in &mut base.soft {
            s.partition = 1;
        }
        PartitionedInstance {
            base,
            n_part: 1,
            hard_labels: Vec::new(),
        }
    }

    /// Soft clause indices per label; entry `i` holds label `i + 1`.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.n_part as usize];
        for (i, s) in self.base.soft.iter().enumerate() {
            blocks[(s.partition - 1) as usize].push(i);
        }
        blocks
    }

    /// Number of non-empty partitions.
    pub fn nonempty_blocks(&self) -> usize {
        self.blocks().iter().filter(|b| !b.is_empty()).count()
    }
}

/// Hands out fresh variable indices above the instance's own variables.
#[derive(Clone, Debug)]
pub struct VarAllocator {
    next: u32,
}

impl VarAllocator {
    /// Fresh variables start at `n_vars + 1`.
    pub fn new(n_vars: u32) -> VarAllocator {
        VarAllocator { next: n_vars + 1 }
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var(self.next);
        self.next += 1;
        v
    }

    pub fn fresh_lit(&mut self) -> Lit {
        self.fresh().pos()
    }

    /// The highest index handed out so far (or the starting `n_vars`).
    pub fn max_var(&self) -> u32 {
        self.next - 1
    }
}

/// A total assignment, indexed by variable slot.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn new(values: Vec<bool>) -> Model {
        Model { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Variables beyond the stored range read as false.
    pub fn value(&self, var: Var) -> bool {
        self.values.get(var.slot()).copied().unwrap_or(false)
    }

    pub fn lit(&self, lit: Lit) -> bool {
        self.value(lit.var()) == lit.is_positive()
    }

    pub fn satisfies(&self, clause: &Clause) -> bool {
        clause.lits().iter().any(|&l| self.lit(l))
    }

    /// Keeps the first `n_vars` variables.
    pub fn truncated(&self, n_vars: u32) -> Model {
        let mut values = self.values.clone();
        values.resize(n_vars as usize, false);
        Model { values }
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// One signed literal per variable.
    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &b)| Lit::new(Var(i as u32 + 1), b))
    }
}
