//! Partition-aware MaxSAT.
//!
//! Reads and writes DIMACS `wcnf` and the partition-annotated `pwcnf` format,
//! derives soft-clause partitions from graph representations of a formula,
//! and solves with core-guided algorithms that solve partitions separately
//! before merging them into a global optimum.

pub mod bench;
pub mod cnf;
pub mod encoders;
pub mod encodings;
pub mod formats;
pub mod graphs;
pub mod maxsat;
pub mod sat;

#[cfg(test)]
mod testutil;

pub use cnf::{Clause, Lit, MaxSatInstance, Model, PartitionedInstance, SoftClause, Var, VarAllocator};
