mod harness;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use upmax::bench::{apply_strategy, resolve_seed, solve_config, Strategy};
use upmax::encoders::{generate_corpus, GenKind, MscParams, Problem, SchemeChoice, SeatingParams};
use upmax::formats::{parse_auto, write_pwcnf, write_solution, Input};
use upmax::graphs::DEFAULT_PAIR_CAP;
use upmax::maxsat::{AlgorithmKind, Budget, SolveResult};

#[derive(Parser)]
#[command(name = "upmax", version, about = "Partition-aware MaxSAT solving")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a wcnf or pwcnf file.
    Solve(SolveArgs),
    /// Split the soft clauses of a formula and print it as pwcnf.
    Partition(PartitionArgs),
    /// Encode a coloring or seating problem file as pwcnf.
    Encode(EncodeArgs),
    /// Generate random coloring or seating problems.
    Gen(GenArgs),
    /// Run every algorithm and strategy over a corpus directory.
    Bench(harness::BenchArgs),
    /// Solve one configuration and print a CSV record.
    #[command(hide = true)]
    Worker(harness::WorkerArgs),
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, default_value = "oll")]
    alg: AlgorithmKind,
    /// none, user, vig, cvig, res or random:<k>.
    #[arg(long, default_value = "none")]
    strategy: Strategy,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Seed for graph and random partitioning (falls back to UPMAX_SEED).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PartitionArgs {
    file: PathBuf,
    /// vig, cvig, res or random:<k>.
    #[arg(long, default_value = "vig")]
    strategy: Strategy,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    problem: PathBuf,
    /// none, vertex or color for coloring; none, tags or tables for seating.
    #[arg(long, default_value = "none")]
    scheme: SchemeChoice,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// msc or seating.
    #[arg(long)]
    kind: GenKind,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Partition scheme of the written pwcnf files; vertex for coloring and
    /// tables for seating by default.
    #[arg(long)]
    scheme: Option<SchemeChoice>,
    /// Directory receiving the problems, pwcnf files and manifest.txt.
    #[arg(long)]
    out: PathBuf,
}

/// An error that should be reported as a usage error (exit status 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(String);

pub fn read_input(path: &Path) -> anyhow::Result<Input> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let parsed = parse_auto(&bytes).map_err(|d| anyhow::anyhow!("{}: {d}", path.display()))?;
    for w in &parsed.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(parsed.value)
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("cannot write to stdout"),
    }
}

fn partitioned(input: &Input, strategy: Strategy, seed: u64) -> anyhow::Result<upmax::PartitionedInstance> {
    let (p, warnings) =
        apply_strategy(input, strategy, seed, DEFAULT_PAIR_CAP).map_err(|e| UsageError(e.to_string()))?;
    for w in warnings {
        log::warn!("{w}");
    }
    Ok(p)
}

fn stats_lines(result: &SolveResult, alg: AlgorithmKind, strategy: Strategy) -> String {
    let s = &result.stats;
    let mut out = format!("c algorithm {alg} strategy {strategy}\n");
    out += &format!("c partitions {}\n", s.partitions);
    for m in &s.merges {
        out += &format!(
            "c merge {} + {} -> {} softs {} lower bound {} cost {}\n",
            m.left, m.right, m.label, m.softs, m.lower_bound, m.cost
        );
    }
    out += &format!(
        "c sat calls {} cores {} lower bound {} time {:.3}s\n",
        s.sat_calls,
        s.cores,
        result.lower_bound,
        s.wall_time.as_secs_f64()
    );
    out
}

fn cmd_solve(args: SolveArgs) -> anyhow::Result<()> {
    let input = read_input(&args.file)?;
    let seed = resolve_seed(args.seed);
    let pinst = partitioned(&input, args.strategy, seed)?;
    let budget = match args.timeout {
        Some(t) if t.is_finite() && t >= 0.0 => Budget::with_timeout(Duration::from_secs_f64(t)),
        Some(t) => bail!(UsageError(format!("invalid timeout {t}"))),
        None => Budget::unlimited(),
    };
    let result = solve_config(&pinst, args.alg, budget)?;
    let text = stats_lines(&result, args.alg, args.strategy) + &write_solution(&result);
    write_output(None, &text)
}

fn cmd_partition(args: PartitionArgs) -> anyhow::Result<()> {
    if matches!(args.strategy, Strategy::None | Strategy::User) {
        bail!(UsageError(format!(
            "partition needs an automatic strategy (vig, cvig, res or random:<k>), got {}",
            args.strategy
        )));
    }
    let input = read_input(&args.file)?;
    let pinst = partitioned(&input, args.strategy, resolve_seed(args.seed))?;
    write_output(args.output.as_deref(), &write_pwcnf(&pinst)?)
}

fn cmd_encode(args: EncodeArgs) -> anyhow::Result<()> {
    let path = &args.problem;
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let problem = Problem::parse(&text).with_context(|| format!("{}", path.display()))?;
    let pinst = problem.encode(args.scheme).map_err(|e| UsageError(e.to_string()))?;
    write_output(args.output.as_deref(), &write_pwcnf(&pinst)?)
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<()> {
    let scheme = args.scheme.unwrap_or(match args.kind {
        GenKind::Msc => SchemeChoice::MscVertex,
        GenKind::Seating => SchemeChoice::SeatTables,
    });
    let seed = resolve_seed(args.seed);
    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let corpus = generate_corpus(args.kind, args.count, seed, &MscParams::default(), &SeatingParams::default());
    let mut manifest = String::new();
    for mut entry in corpus {
        let pinst = entry.problem.encode(scheme).map_err(|e| UsageError(e.to_string()))?;
        fs::write(args.out.join(format!("{}.{}", entry.name, args.kind)), entry.problem.to_text())?;
        fs::write(args.out.join(format!("{}.pwcnf", entry.name)), write_pwcnf(&pinst)?)?;
        entry.manifest.push("scheme", scheme);
        manifest += &format!("{}\n", entry.manifest);
    }
    fs::write(args.out.join("manifest.txt"), manifest)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Partition(a) => cmd_partition(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => harness::run(a),
        Command::Worker(a) => harness::worker(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("upmax: error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
