//! Partition strategies, run records and benchmark reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::cnf::PartitionedInstance;
use crate::formats::Input;
use crate::graphs::{partition_by_graph, random_partition, Representation, DEFAULT_PAIR_CAP};
use crate::maxsat::{solve, solve_partitioned, AlgorithmKind, Budget, SolveError, SolveResult, Status};

/// Environment variable consulted when no seed is given.
pub const SEED_ENV: &str = "UPMAX_SEED";

/// `explicit`, else `UPMAX_SEED`, else 0.
pub fn resolve_seed(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()))
        .unwrap_or(0)
}

/// How soft clauses are split before solving.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    None,
    User,
    Graph(Representation),
    Random(u32),
}

impl Strategy {
    /// The six strategies of the evaluation matrix, random with k = 16.
    pub const MATRIX: [Strategy; 6] = [
        Strategy::None,
        Strategy::User,
        Strategy::Graph(Representation::Vig),
        Strategy::Graph(Representation::Cvig),
        Strategy::Graph(Representation::Res),
        Strategy::Random(16),
    ];
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("unknown strategy `{0}` (expected none, user, vig, cvig, res or random:<k>)")]
    Unknown(String),
    #[error("the user strategy needs a pwcnf input with partition labels")]
    UserNeedsPwcnf,
}

impl FromStr for Strategy {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "none" => Ok(Strategy::None),
            "user" => Ok(Strategy::User),
            "vig" => Ok(Strategy::Graph(Representation::Vig)),
            "cvig" => Ok(Strategy::Graph(Representation::Cvig)),
            "res" => Ok(Strategy::Graph(Representation::Res)),
            _ => lower
                .strip_prefix("random:")
                .and_then(|k| k.parse::<u32>().ok())
                .filter(|&k| k >= 1)
                .map(Strategy::Random)
                .ok_or_else(|| StrategyError::Unknown(s.to_string())),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::None => f.write_str("none"),
            Strategy::User => f.write_str("user"),
            Strategy::Graph(g) => write!(f, "{g}"),
            Strategy::Random(k) => write!(f, "random:{k}"),
        }
    }
}

/// Partitions `input` by `strategy`. Warnings are returned, not logged.
pub fn apply_strategy(
    input: &Input,
    strategy: Strategy,
    seed: u64,
    pair_cap: usize,
) -> Result<(PartitionedInstance, Vec<String>), StrategyError> {
    let inst = input.instance();
    let mut warnings = Vec::new();
    let p = match strategy {
        Strategy::None => PartitionedInstance::single(inst.clone()),
        Strategy::User => match input {
            Input::Pwcnf(p) => p.clone(),
            Input::Wcnf(_) => return Err(StrategyError::UserNeedsPwcnf),
        },
        Strategy::Graph(g) => match partition_by_graph(inst, g, seed, pair_cap) {
            Ok(p) => p,
            Err(e) => {
                warnings.push(format!("{e}; solving without partitions"));
                PartitionedInstance::single(inst.clone())
            }
        },
        Strategy::Random(k) => random_partition(inst, k, seed),
    };
    Ok((p, warnings))
}

/// Solves one configuration. LSU is not core-guided, so it ignores the
/// partitions and solves the whole instance.
pub fn solve_config(
    pinst: &PartitionedInstance,
    alg: AlgorithmKind,
    budget: Budget,
) -> Result<SolveResult, SolveError> {
    if alg.is_core_guided() {
        solve_partitioned(pinst, alg, budget)
    } else {
        solve(&pinst.base, alg, budget)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RunStatus {
    Optimum,
    Timeout,
    HardUnsat,
    Error,
    Oom,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Optimum => "optimum",
            RunStatus::Timeout => "timeout",
            RunStatus::HardUnsat => "hard-unsat",
            RunStatus::Error => "error",
            RunStatus::Oom => "oom",
        }
    }
}

impl From<Status> for RunStatus {
    fn from(s: Status) -> RunStatus {
        match s {
            Status::Optimum => RunStatus::Optimum,
            Status::Timeout => RunStatus::Timeout,
            Status::HardUnsat => RunStatus::HardUnsat,
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RunStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "optimum" => Ok(RunStatus::Optimum),
            "timeout" => Ok(RunStatus::Timeout),
            "hard-unsat" => Ok(RunStatus::HardUnsat),
            "error" => Ok(RunStatus::Error),
            "oom" => Ok(RunStatus::Oom),
            _ => Err(format!("unknown status `{s}`")),
        }
    }
}

/// One (instance, algorithm, strategy) run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub alg: String,
    pub strategy: String,
    pub status: RunStatus,
    pub cost: Option<u64>,
    pub time_s: f64,
    pub sat_calls: u64,
    pub cores: u64,
}

impl RunRecord {
    pub fn from_result(instance: &str, alg: AlgorithmKind, strategy: Strategy, r: &SolveResult) -> RunRecord {
        RunRecord {
            instance: instance.to_string(),
            alg: alg.to_string(),
            strategy: strategy.to_string(),
            status: r.status.into(),
            cost: r.cost,
            time_s: r.stats.wall_time.as_secs_f64(),
            sat_calls: r.stats.sat_calls,
            cores: r.stats.cores,
        }
    }

    pub fn failed(instance: &str, alg: &str, strategy: &str, status: RunStatus, time_s: f64) -> RunRecord {
        RunRecord {
            instance: instance.to_string(),
            alg: alg.to_string(),
            strategy: strategy.to_string(),
            status,
            cost: None,
            time_s,
            sat_calls: 0,
            cores: 0,
        }
    }

    /// `alg/strategy`, the key of a benchmark cell.
    pub fn config(&self) -> String {
        format!("{}/{}", self.alg, self.strategy)
    }
}

/// Partitions and solves one instance under one configuration, in process.
pub fn run_one(
    name: &str,
    input: &Input,
    alg: AlgorithmKind,
    strategy: Strategy,
    seed: u64,
    timeout: Duration,
) -> RunRecord {
    let budget = Budget::with_timeout(timeout);
    let start = std::time::Instant::now();
    let outcome = apply_strategy(input, strategy, seed, DEFAULT_PAIR_CAP)
        .map_err(|e| e.to_string())
        .and_then(|(p, _)| solve_config(&p, alg, budget).map_err(|e| e.to_string()));
    match outcome {
        Ok(r) => {
            let mut rec = RunRecord::from_result(name, alg, strategy, &r);
            rec.time_s = start.elapsed().as_secs_f64();
            rec
        }
        Err(e) => {
            log::warn!("{name} {alg} {strategy}: {e}");
            RunRecord::failed(
                name,
                &alg.to_string(),
                &strategy.to_string(),
                RunStatus::Error,
                start.elapsed().as_secs_f64(),
            )
        }
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "instance", "alg", "strategy", "status", "cost", "time_s", "sat_calls", "cores",
];

/// Writes the header and one row per record.
pub fn write_csv<W: io::Write>(records: &[RunRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        write_row(&mut w, r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_row<W: io::Write>(w: &mut csv::Writer<W>, r: &RunRecord) -> csv::Result<()> {
    w.write_record([
        r.instance.clone(),
        r.alg.clone(),
        r.strategy.clone(),
        r.status.to_string(),
        r.cost.map(|c| c.to_string()).unwrap_or_default(),
        format!("{:.6}", r.time_s),
        r.sat_calls.to_string(),
        r.cores.to_string(),
    ])
}

/// One CSV row without header, as sent by worker processes.
pub fn record_to_row(r: &RunRecord) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    write_row(&mut w, r).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: {message}")]
    Field { row: usize, message: String },
}

fn parse_row(row: usize, rec: &csv::StringRecord) -> Result<RunRecord, ReadError> {
    let field = |i: usize| rec.get(i).unwrap_or("");
    let bad = |message: String| ReadError::Field { row, message };
    if rec.len() != CSV_HEADER.len() {
        return Err(bad(format!("expected {} fields, got {}", CSV_HEADER.len(), rec.len())));
    }
    let num = |i: usize| -> Result<u64, ReadError> {
        field(i)
            .parse()
            .map_err(|_| bad(format!("invalid {} `{}`", CSV_HEADER[i], field(i))))
    };
    Ok(RunRecord {
        instance: field(0).to_string(),
        alg: field(1).to_string(),
        strategy: field(2).to_string(),
        status: field(3).parse().map_err(bad)?,
        cost: if field(4).is_empty() { None } else { Some(num(4)?) },
        time_s: field(5)
            .parse()
            .map_err(|_| bad(format!("invalid time_s `{}`", field(5))))?,
        sat_calls: num(6)?,
        cores: num(7)?,
    })
}

/// Reads CSV produced by [`write_csv`] (`has_header`) or worker rows.
pub fn read_csv<R: io::Read>(input: R, has_header: bool) -> Result<Vec<RunRecord>, ReadError> {
    let mut r = csv::ReaderBuilder::new().has_headers(has_header).from_reader(input);
    r.records()
        .enumerate()
        .map(|(i, rec)| parse_row(i + 1, &rec?))
        .collect()
}

/// Solved counts per algorithm (rows) and strategy (columns), in first-seen order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    pub algs: Vec<String>,
    pub strategies: Vec<String>,
    /// `counts[a][s]`: records with status optimum.
    pub counts: Vec<Vec<usize>>,
    pub totals: Vec<Vec<usize>>,
}

fn first_seen<'a>(items: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    items
        .filter(|s| seen.insert(s.to_string()))
        .map(str::to_string)
        .collect()
}

pub fn summarize(records: &[RunRecord]) -> Summary {
    let algs = first_seen(records.iter().map(|r| r.alg.as_str()));
    let strategies = first_seen(records.iter().map(|r| r.strategy.as_str()));
    let mut counts = vec![vec![0; strategies.len()]; algs.len()];
    let mut totals = counts.clone();
    for r in records {
        let a = algs.iter().position(|x| *x == r.alg).expect("seen");
        let s = strategies.iter().position(|x| *x == r.strategy).expect("seen");
        totals[a][s] += 1;
        if r.status == RunStatus::Optimum {
            counts[a][s] += 1;
        }
    }
    Summary {
        algs,
        strategies,
        counts,
        totals,
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.strategies.iter().map(|s| s.len()).max().unwrap_or(0).max(9);
        write!(f, "{:<6}", "alg")?;
        for s in &self.strategies {
            write!(f, " {s:>width$}")?;
        }
        writeln!(f)?;
        for (a, alg) in self.algs.iter().enumerate() {
            write!(f, "{alg:<6}")?;
            for s in 0..self.strategies.len() {
                let cell = format!("{}/{}", self.counts[a][s], self.totals[a][s]);
                write!(f, " {cell:>width$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Sorted solve times of optimum records per configuration:
/// CSV `config,solved,time_s`.
pub fn cactus_csv(records: &[RunRecord]) -> String {
    let mut by_config: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.status == RunStatus::Optimum) {
        by_config.entry(r.config()).or_default().push(r.time_s);
    }
    let mut out = String::from("config,solved,time_s\n");
    for (config, mut times) in by_config {
        times.sort_by(f64::total_cmp);
        for (i, t) in times.iter().enumerate() {
            out.push_str(&format!("{config},{},{t:.6}\n", i + 1));
        }
    }
    out
}

/// Per-instance time pairs for two `alg/strategy` configurations; unsolved
/// runs are charged `penalty` seconds. CSV `instance,<a>,<b>`.
pub fn scatter_csv(records: &[RunRecord], a: &str, b: &str, penalty: f64) -> String {
    let time = |r: &RunRecord| {
        if r.status == RunStatus::Optimum {
            r.time_s
        } else {
            penalty
        }
    };
    let pick = |config: &str| -> BTreeMap<&str, f64> {
        records
            .iter()
            .filter(|r| r.config() == config)
            .map(|r| (r.instance.as_str(), time(r)))
            .collect()
    };
    let (ta, tb) = (pick(a), pick(b));
    let mut out = format!("instance,{a},{b}\n");
    for (inst, x) in &ta {
        if let Some(y) = tb.get(inst) {
            out.push_str(&format!("{inst},{x:.6},{y:.6}\n"));
        }
    }
    out
}
