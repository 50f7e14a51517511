use super::ClauseSink;
use crate::cnf::{Clause, Lit, VarAllocator};

#[derive(Clone, Debug)]
struct Node {
    /// Unary outputs: `outputs[j]` is implied once `j + 1` inputs below are true.
    outputs: Vec<Lit>,
    /// Number of inputs below this node.
    size: usize,
    /// Largest output index (1-based) whose implying clauses are encoded.
    encoded: usize,
    children: Option<(usize, usize)>,
}

/// Incremental totalizer over unweighted inputs.
///
/// Only the upward direction (inputs imply outputs) is encoded, which is all
/// that is needed to enforce upper bounds. Outputs are materialized lazily up
/// to the current limit so that a bound `k` only costs outputs up to `k + 1`.
#[derive(Clone, Debug)]
pub struct Totalizer {
    nodes: Vec<Node>,
    root: usize,
    limit: usize,
}

/// Builds a totalizer with all `n` outputs materialized.
pub fn build_totalizer(inputs: &[Lit], alloc: &mut VarAllocator) -> (Totalizer, Vec<Clause>) {
    let mut clauses = Vec::new();
    let tot = Totalizer::new(inputs, inputs.len(), alloc, &mut clauses);
    (tot, clauses)
}

impl Totalizer {
    /// Builds a totalizer with outputs materialized up to `limit`.
    ///
    /// Panics on empty input.
    pub fn new(
        inputs: &[Lit],
        limit: usize,
        alloc: &mut VarAllocator,
        sink: &mut impl ClauseSink,
    ) -> Totalizer {
        assert!(!inputs.is_empty(), "totalizer needs at least one input");
        let mut tot = Totalizer {
            nodes: Vec::with_capacity(2 * inputs.len()),
            root: 0,
            limit: 0,
        };
        tot.root = tot.build_tree(inputs);
        tot.extend(limit, alloc, sink);
        tot
    }

    fn build_tree(&mut self, inputs: &[Lit]) -> usize {
        if inputs.len() == 1 {
            self.nodes.push(Node {
                outputs: vec![inputs[0]],
                size: 1,
                encoded: 1,
                children: None,
            });
            return self.nodes.len() - 1;
        }
        let mid = inputs.len() / 2;
        let left = self.build_tree(&inputs[..mid]);
        let right = self.build_tree(&inputs[mid..]);
        self.nodes.push(Node {
            outputs: Vec::new(),
            size: inputs.len(),
            encoded: 0,
            children: Some((left, right)),
        });
        self.nodes.len() - 1
    }

    /// Joins two totalizers under a fresh root. The result keeps the larger limit.
    pub fn merge(
        mut left: Totalizer,
        right: Totalizer,
        alloc: &mut VarAllocator,
        sink: &mut impl ClauseSink,
    ) -> Totalizer {
        let offset = left.nodes.len();
        left.nodes.extend(right.nodes.into_iter().map(|mut n| {
            if let Some((a, b)) = n.children {
                n.children = Some((a + offset, b + offset));
            }
            n
        }));
        let (l, r) = (left.root, right.root + offset);
        let size = left.nodes[l].size + left.nodes[r].size;
        left.nodes.push(Node {
            outputs: Vec::new(),
            size,
            encoded: 0,
            children: Some((l, r)),
        });
        left.root = left.nodes.len() - 1;
        let limit = left.limit.max(right.limit);
        left.limit = 0;
        left.extend(limit, alloc, sink);
        left
    }

    /// Appends new inputs by merging with a totalizer over them.
    pub fn add_inputs(
        self,
        inputs: &[Lit],
        alloc: &mut VarAllocator,
        sink: &mut impl ClauseSink,
    ) -> Totalizer {
        if inputs.is_empty() {
            return self;
        }
        let limit = self.limit;
        let other = Totalizer::new(inputs, limit, alloc, sink);
        Totalizer::merge(self, other, alloc, sink)
    }

    /// Materializes outputs up to `limit` (capped at the input count).
    pub fn extend(&mut self, limit: usize, alloc: &mut VarAllocator, sink: &mut impl ClauseSink) {
        if limit <= self.limit && self.nodes[self.root].encoded >= limit.min(self.size()) {
            return;
        }
        self.extend_node(self.root, limit, alloc, sink);
        self.limit = self.limit.max(limit);
    }

    fn extend_node(
        &mut self,
        idx: usize,
        limit: usize,
        alloc: &mut VarAllocator,
        sink: &mut impl ClauseSink,
    ) {
        let Some((l, r)) = self.nodes[idx].children else {
            return;
        };
        let target = limit.min(self.nodes[idx].size);
        if self.nodes[idx].encoded >= target {
            return;
        }
        self.extend_node(l, limit, alloc, sink);
        self.extend_node(r, limit, alloc, sink);
        while self.nodes[idx].outputs.len() < target {
            let o = alloc.fresh_lit();
            self.nodes[idx].outputs.push(o);
        }
        let done = self.nodes[idx].encoded;
        let left_out = self.nodes[l].outputs.clone();
        let right_out = self.nodes[r].outputs.clone();
        let out = &self.nodes[idx].outputs;
        for i in 0..=left_out.len() {
            for j in 0..=right_out.len() {
                let sum = i + j;
                if sum <= done || sum > target {
                    continue;
                }
                let mut lits = Vec::with_capacity(3);
                if i > 0 {
                    lits.push(!left_out[i - 1]);
                }
                if j > 0 {
                    lits.push(!right_out[j - 1]);
                }
                lits.push(out[sum - 1]);
                sink.add_clause(Clause::from_vec_unchecked(lits));
            }
        }
        self.nodes[idx].encoded = target;
    }

    pub fn size(&self) -> usize {
        self.nodes[self.root].size
    }

    /// Materialized outputs of the root.
    pub fn outputs(&self) -> &[Lit] {
        &self.nodes[self.root].outputs
    }

    /// Output `j` (1-based), true whenever at least `j` inputs are true.
    pub fn output(&self, j: usize) -> Option<Lit> {
        j.checked_sub(1)
            .and_then(|i| self.nodes[self.root].outputs.get(i).copied())
    }

    /// The assumption enforcing `sum <= k`, if the bound is not vacuous.
    pub fn at_most(
        &mut self,
        k: usize,
        alloc: &mut VarAllocator,
        sink: &mut impl ClauseSink,
    ) -> Option<Lit> {
        if k >= self.size() {
            return None;
        }
        self.extend(k + 1, alloc, sink);
        self.output(k + 1).map(|o| !o)
    }

    /// All input literals, left to right.
    pub fn inputs(&self) -> Vec<Lit> {
        let mut out = Vec::new();
        self.collect_inputs(self.root, &mut out);
        out
    }

    fn collect_inputs(&self, idx: usize, out: &mut Vec<Lit>) {
        match self.nodes[idx].children {
            None => out.push(self.nodes[idx].outputs[0]),
            Some((l, r)) => {
                self.collect_inputs(l, out);
                self.collect_inputs(r, out);
            }
        }
    }
}
