//! Cardinality encodings.
//!
//! The sequential counter is used for hard cardinality constraints in problem
//! encoders. The totalizer and its weighted generalization back the bounds of
//! the core-guided algorithms, where outputs are enforced through assumptions
//! and the structures grow as more soft clauses get relaxed.

mod gte;
mod seq;
mod totalizer;

pub use gte::{build_generalized_totalizer, WeightedTotalizer};
pub use seq::{encode_at_least_k, encode_at_most_k, encode_exactly_one};
pub use totalizer::{build_totalizer, Totalizer};

use crate::cnf::Clause;

/// Receiver of clauses produced by an encoding.
pub trait ClauseSink {
    fn add_clause(&mut self, clause: Clause);
}

impl ClauseSink for Vec<Clause> {
    fn add_clause(&mut self, clause: Clause) {
        self.push(clause);
    }
}
