//! MaxSAT algorithms and the partition-merge driver.
//!
//! All algorithms share one incremental SAT solver per solve. Soft clause `i`
//! is attached to a guard literal `g_i` through the clause `s_i | g_i`, and the
//! core-guided algorithms assume `!g_i` until the clause is relaxed.

mod engine;
mod lsu;
mod msu3;
mod oll;
mod wbo;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cnf::{InstanceError, MaxSatInstance, Model, PartitionedInstance};
use engine::{Engine, Stop};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgorithmKind {
    Lsu,
    Msu3,
    Oll,
    Wbo,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 4] = [
        AlgorithmKind::Lsu,
        AlgorithmKind::Msu3,
        AlgorithmKind::Oll,
        AlgorithmKind::Wbo,
    ];

    /// Whether the algorithm can run on partitions.
    pub fn is_core_guided(self) -> bool {
        self != AlgorithmKind::Lsu
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgorithmKind::Lsu => "lsu",
            AlgorithmKind::Msu3 => "msu3",
            AlgorithmKind::Oll => "oll",
            AlgorithmKind::Wbo => "wbo",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown algorithm `{0}` (expected lsu, msu3, oll or wbo)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for AlgorithmKind {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lsu" => Ok(AlgorithmKind::Lsu),
            "msu3" => Ok(AlgorithmKind::Msu3),
            "oll" => Ok(AlgorithmKind::Oll),
            "wbo" => Ok(AlgorithmKind::Wbo),
            _ => Err(UnknownAlgorithm(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// `cost` is the proven optimum.
    Optimum,
    /// Budget exhausted; `cost` is the best incumbent, if any.
    Timeout,
    /// The hard clauses alone are unsatisfiable.
    HardUnsat,
}

/// Optimum of one initial partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionCost {
    pub label: u32,
    pub softs: usize,
    pub cost: u64,
}

/// One merge of two partitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeStep {
    pub left: u32,
    pub right: u32,
    /// Label kept by the merged partition.
    pub label: u32,
    pub softs: usize,
    /// Sum of the two parts' optima; the merged solve starts here.
    pub lower_bound: u64,
    pub cost: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub sat_calls: u64,
    pub cores: u64,
    pub wall_time: Duration,
    pub partitions: usize,
    pub partition_costs: Vec<PartitionCost>,
    pub merges: Vec<MergeStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub status: Status,
    pub cost: Option<u64>,
    /// Assignment over the original variables.
    pub model: Option<Model>,
    /// Proven lower bound on the optimum.
    pub lower_bound: u64,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimum
    }
}

/// Resource limits and options for one solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub deadline: Option<Instant>,
    /// Seed decision phases with each partition's model before later solves.
    pub seed_phases: bool,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn with_timeout(timeout: Duration) -> Budget {
        Budget {
            deadline: Some(Instant::now() + timeout),
            seed_phases: false,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("{0} is not core-guided and cannot solve partitions")]
    UnsupportedAlgorithm(AlgorithmKind),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

pub(crate) struct Solved {
    pub cost: u64,
    pub model: Model,
}

/// A core-guided algorithm whose state can absorb another partition's state.
pub(crate) trait CoreGuided: Sized {
    fn new(engine: &mut Engine<'_>, softs: &[usize]) -> Self;
    fn merge(engine: &mut Engine<'_>, a: Self, b: Self) -> Self;
    /// Proven lower bound on the cost over `softs()`.
    fn lower_bound(&self) -> u64;
    fn softs(&self) -> &[usize];
    fn solve(&mut self, engine: &mut Engine<'_>) -> Result<Solved, Stop>;
}

pub fn solve_lsu(inst: &MaxSatInstance, budget: Budget) -> Result<SolveResult, SolveError> {
    solve(inst, AlgorithmKind::Lsu, budget)
}

pub fn solve_msu3(inst: &MaxSatInstance, budget: Budget) -> Result<SolveResult, SolveError> {
    solve(inst, AlgorithmKind::Msu3, budget)
}

pub fn solve_oll(inst: &MaxSatInstance, budget: Budget) -> Result<SolveResult, SolveError> {
    solve(inst, AlgorithmKind::Oll, budget)
}

pub fn solve_wbo(inst: &MaxSatInstance, budget: Budget) -> Result<SolveResult, SolveError> {
    solve(inst, AlgorithmKind::Wbo, budget)
}

/// Solves `inst` ignoring partitions.
pub fn solve(
    inst: &MaxSatInstance,
    alg: AlgorithmKind,
    budget: Budget,
) -> Result<SolveResult, SolveError> {
    inst.validate()?;
    let start = Instant::now();
    let mut engine = Engine::new(inst, budget.deadline);
    let softs: Vec<usize> = (0..inst.soft.len()).collect();
    let run = match alg {
        AlgorithmKind::Lsu => Run::from_result(lsu::solve(&mut engine, &softs), 0),
        AlgorithmKind::Msu3 => plain::<msu3::Msu3>(&mut engine, &softs),
        AlgorithmKind::Oll => plain::<oll::Oll>(&mut engine, &softs),
        AlgorithmKind::Wbo => plain::<wbo::Wbo>(&mut engine, &softs),
    };
    Ok(finish(&engine, run, start, 1))
}

/// Solves `pinst` by solving every partition and merging the two smallest
/// partitions until one remains.
pub fn solve_partitioned(
    pinst: &PartitionedInstance,
    alg: AlgorithmKind,
    budget: Budget,
) -> Result<SolveResult, SolveError> {
    if !alg.is_core_guided() {
        return Err(SolveError::UnsupportedAlgorithm(alg));
    }
    pinst.validate()?;
    let blocks: Vec<(u32, Vec<usize>)> = pinst
        .blocks()
        .into_iter()
        .enumerate()
        .filter(|(_, b)| !b.is_empty())
        .map(|(i, b)| (i as u32 + 1, b))
        .collect();
    if pinst.n_part <= 1 || blocks.len() <= 1 {
        return solve(&pinst.base, alg, budget);
    }
    let inst = &pinst.base;
    let start = Instant::now();
    let mut engine = Engine::new(inst, budget.deadline);
    let mut trace = Trace::default();
    let run = match alg {
        AlgorithmKind::Msu3 => {
            partitioned::<msu3::Msu3>(&mut engine, &blocks, budget.seed_phases, &mut trace)
        }
        AlgorithmKind::Oll => {
            partitioned::<oll::Oll>(&mut engine, &blocks, budget.seed_phases, &mut trace)
        }
        AlgorithmKind::Wbo => {
            partitioned::<wbo::Wbo>(&mut engine, &blocks, budget.seed_phases, &mut trace)
        }
        AlgorithmKind::Lsu => unreachable!("rejected above"),
    };
    let mut result = finish(&engine, run, start, blocks.len());
    result.stats.partition_costs = trace.partitions;
    result.stats.merges = trace.merges;
    if result.status == Status::Optimum {
        let cost = result.cost.expect("optimum has a cost");
        for m in &result.stats.merges {
            assert!(m.lower_bound <= cost, "partition lower bound exceeds the optimum");
        }
    }
    Ok(result)
}

/// Picks the two partitions with the fewest soft clauses, ties by lowest
/// label. Input is `(label, soft count)`; output is the two labels, smaller
/// partition first.
pub fn select_partitions(parts: &[(u32, usize)]) -> Option<(u32, u32)> {
    let mut sorted: Vec<(usize, u32)> = parts.iter().map(|&(l, s)| (s, l)).collect();
    sorted.sort_unstable();
    match sorted.as_slice() {
        [a, b, ..] => Some((a.1, b.1)),
        _ => None,
    }
}

enum Run {
    Done(Solved),
    Stopped { stop: Stop, lower_bound: u64 },
}

impl Run {
    fn from_result(r: Result<Solved, Stop>, lower_bound: u64) -> Run {
        match r {
            Ok(s) => Run::Done(s),
            Err(stop) => Run::Stopped { stop, lower_bound },
        }
    }
}

#[derive(Default)]
struct Trace {
    partitions: Vec<PartitionCost>,
    merges: Vec<MergeStep>,
}

fn plain<A: CoreGuided>(engine: &mut Engine<'_>, softs: &[usize]) -> Run {
    let mut state = A::new(engine, softs);
    let r = state.solve(engine);
    Run::from_result(r, state.lower_bound())
}

fn partitioned<A: CoreGuided>(
    engine: &mut Engine<'_>,
    blocks: &[(u32, Vec<usize>)],
    seed: bool,
    trace: &mut Trace,
) -> Run {
    let mut active: Vec<(u32, A)> = Vec::with_capacity(blocks.len());
    for (label, softs) in blocks {
        let mut state = A::new(engine, softs);
        match state.solve(engine) {
            Ok(solved) => {
                trace.partitions.push(PartitionCost {
                    label: *label,
                    softs: softs.len(),
                    cost: solved.cost,
                });
                if seed {
                    engine.seed_phases(&solved.model);
                }
                active.push((*label, state));
            }
            Err(stop) => {
                let lb = active.iter().map(|(_, s)| s.lower_bound()).sum::<u64>()
                    + state.lower_bound();
                return Run::Stopped { stop, lower_bound: lb };
            }
        }
    }
    loop {
        let sizes: Vec<(u32, usize)> = active.iter().map(|(l, s)| (*l, s.softs().len())).collect();
        let Some((x, y)) = select_partitions(&sizes) else {
            unreachable!("at least two partitions remain")
        };
        let (lx, sx) = take(&mut active, x);
        let (ly, sy) = take(&mut active, y);
        let lower_bound = sx.lower_bound() + sy.lower_bound();
        let label = lx.min(ly);
        let mut merged = A::merge(engine, sx, sy);
        let result = merged.solve(engine);
        match result {
            Ok(solved) => {
                trace.merges.push(MergeStep {
                    left: lx,
                    right: ly,
                    label,
                    softs: merged.softs().len(),
                    lower_bound,
                    cost: solved.cost,
                });
                if active.is_empty() {
                    return Run::Done(solved);
                }
                if seed {
                    engine.seed_phases(&solved.model);
                }
                active.push((label, merged));
            }
            Err(stop) => {
                let lb = active.iter().map(|(_, s)| s.lower_bound()).sum::<u64>()
                    + merged.lower_bound();
                return Run::Stopped { stop, lower_bound: lb };
            }
        }
    }
}

fn take<A>(active: &mut Vec<(u32, A)>, label: u32) -> (u32, A) {
    let pos = active
        .iter()
        .position(|(l, _)| *l == label)
        .expect("selected label is active");
    active.remove(pos)
}

fn finish(engine: &Engine<'_>, run: Run, start: Instant, partitions: usize) -> SolveResult {
    let stats = SolveStats {
        sat_calls: engine.sat_calls,
        cores: engine.cores,
        wall_time: start.elapsed(),
        partitions,
        ..SolveStats::default()
    };
    let inst = engine.inst;
    match run {
        Run::Done(solved) => {
            assert!(inst.hard_satisfied(&solved.model), "model violates a hard clause");
            assert_eq!(inst.cost(&solved.model), solved.cost, "reported cost disagrees with model");
            SolveResult {
                status: Status::Optimum,
                cost: Some(solved.cost),
                lower_bound: solved.cost,
                model: Some(solved.model),
                stats,
            }
        }
        Run::Stopped {
            stop: Stop::HardUnsat,
            ..
        } => SolveResult {
            status: Status::HardUnsat,
            cost: None,
            model: None,
            lower_bound: 0,
            stats,
        },
        Run::Stopped {
            stop: Stop::Timeout,
            lower_bound,
        } => {
            let best = engine.incumbent().cloned();
            SolveResult {
                status: Status::Timeout,
                cost: best.as_ref().map(|(c, _)| *c),
                model: best.map(|(_, m)| m),
                lower_bound,
                stats,
            }
        }
    }
}
