use std::collections::BTreeMap;

use super::ClauseSink;
use crate::cnf::{Clause, Lit, VarAllocator};

/// Generalized totalizer: each node has one output per reachable weight sum.
///
/// An output with value `v` is implied whenever the true inputs below the node
/// contain a subset of weight `v`. Enforcing `sum <= W` therefore means
/// falsifying every root output with value above `W`.
#[derive(Clone, Debug)]
pub struct WeightedTotalizer {
    root: BTreeMap<u64, Lit>,
    total: u64,
    inputs: Vec<(Lit, u64)>,
}

/// Builds a generalized totalizer over `(literal, weight)` pairs.
pub fn build_generalized_totalizer(
    weighted_inputs: &[(Lit, u64)],
    alloc: &mut VarAllocator,
) -> (WeightedTotalizer, Vec<Clause>) {
    let mut clauses = Vec::new();
    let gte = WeightedTotalizer::new(weighted_inputs, alloc, &mut clauses);
    (gte, clauses)
}

impl WeightedTotalizer {
    /// Panics on empty input or a zero weight.
    pub fn new(
        weighted_inputs: &[(Lit, u64)],
        alloc: &mut VarAllocator,
        sink: &mut impl ClauseSink,
    ) -> WeightedTotalizer {
        assert!(!weighted_inputs.is_empty(), "totalizer needs at least one input");
        assert!(weighted_inputs.iter().all(|&(_, w)| w > 0), "weights must be positive");
        let root = build(weighted_inputs, alloc, sink);
        WeightedTotalizer {
            root,
            total: weighted_inputs.iter().map(|&(_, w)| w).sum(),
            inputs: weighted_inputs.to_vec(),
        }
    }

    /// Joins two structures under a fresh root.
    pub fn merge(
        left: WeightedTotalizer,
        right: WeightedTotalizer,
        alloc: &mut VarAllocator,
        sink: &mut impl ClauseSink,
    ) -> WeightedTotalizer {
        let root = combine(&left.root, &right.root, alloc, sink);
        let mut inputs = left.inputs;
        inputs.extend(right.inputs);
        WeightedTotalizer {
            root,
            total: left.total + right.total,
            inputs,
        }
    }

    pub fn add_inputs(
        self,
        weighted_inputs: &[(Lit, u64)],
        alloc: &mut VarAllocator,
        sink: &mut impl ClauseSink,
    ) -> WeightedTotalizer {
        if weighted_inputs.is_empty() {
            return self;
        }
        let other = WeightedTotalizer::new(weighted_inputs, alloc, sink);
        WeightedTotalizer::merge(self, other, alloc, sink)
    }

    /// Sum of all input weights.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn inputs(&self) -> &[(Lit, u64)] {
        &self.inputs
    }

    /// Reachable sums, ascending.
    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.root.keys().copied()
    }

    pub fn output(&self, value: u64) -> Option<Lit> {
        self.root.get(&value).copied()
    }

    /// Smallest reachable sum strictly above `bound`.
    pub fn next_value_above(&self, bound: u64) -> Option<u64> {
        self.root.range(bound + 1..).next().map(|(&v, _)| v)
    }

    /// Assumptions enforcing `sum <= bound`.
    pub fn at_most(&self, bound: u64) -> Vec<Lit> {
        self.root.range(bound + 1..).map(|(_, &o)| !o).collect()
    }
}

fn build(
    inputs: &[(Lit, u64)],
    alloc: &mut VarAllocator,
    sink: &mut impl ClauseSink,
) -> BTreeMap<u64, Lit> {
    if inputs.len() == 1 {
        let (lit, w) = inputs[0];
        return BTreeMap::from([(w, lit)]);
    }
    let mid = inputs.len() / 2;
    let left = build(&inputs[..mid], alloc, sink);
    let right = build(&inputs[mid..], alloc, sink);
    combine(&left, &right, alloc, sink)
}

fn combine(
    left: &BTreeMap<u64, Lit>,
    right: &BTreeMap<u64, Lit>,
    alloc: &mut VarAllocator,
    sink: &mut impl ClauseSink,
) -> BTreeMap<u64, Lit> {
    let mut out: BTreeMap<u64, Lit> = BTreeMap::new();
    let mut output = |v: u64, alloc: &mut VarAllocator| *out.entry(v).or_insert_with(|| alloc.fresh_lit());
    for (&a, &la) in left {
        let o = output(a, alloc);
        sink.add_clause(Clause::from_vec_unchecked(vec![!la, o]));
    }
    for (&b, &lb) in right {
        let o = output(b, alloc);
        sink.add_clause(Clause::from_vec_unchecked(vec![!lb, o]));
    }
    for (&a, &la) in left {
        for (&b, &lb) in right {
            let o = output(a + b, alloc);
            sink.add_clause(Clause::from_vec_unchecked(vec![!la, !lb, o]));
        }
    }
    out
}
