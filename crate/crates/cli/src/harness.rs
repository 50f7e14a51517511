//! Benchmark harness: one worker process per run.

use std::collections::VecDeque;
use std::fs::{self, File};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::Args;

use upmax::bench::{
    cactus_csv, read_csv, record_to_row, resolve_seed, run_one, scatter_csv, summarize, write_csv,
    RunRecord, RunStatus, Strategy, CSV_HEADER,
};
use upmax::maxsat::AlgorithmKind;

use crate::{read_input, UsageError};

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of .wcnf and .pwcnf files.
    pub corpus: PathBuf,
    /// Comma-separated algorithms.
    #[arg(long, default_value = "msu3,oll,wbo")]
    pub algs: String,
    /// Comma-separated strategies.
    #[arg(long, default_value = "none,user,vig,cvig,res,random:16")]
    pub strategies: String,
    /// Per-run limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    /// Seconds a worker may overrun before it is killed.
    #[arg(long, default_value_t = 5.0)]
    pub grace: f64,
    /// Worker processes; the number of CPUs by default.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Address-space limit per worker in MiB (unix only).
    #[arg(long)]
    pub mem_mb: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Two `alg/strategy` configurations for scatter.csv.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub scatter: Option<Vec<String>>,
    /// Output directory for results.csv, summary.txt, cactus.csv and scatter.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct WorkerArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub name: String,
    #[arg(long)]
    pub alg: AlgorithmKind,
    #[arg(long)]
    pub strategy: Strategy,
    #[arg(long)]
    pub timeout: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub mem_mb: Option<u64>,
}

#[derive(Clone)]
struct Job {
    index: usize,
    name: String,
    file: PathBuf,
    alg: AlgorithmKind,
    strategy: Strategy,
}

fn split_list<T: std::str::FromStr>(list: &str, what: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| UsageError(format!("{what}: {e}")).into()))
        .collect()
}

fn corpus_files(dir: &Path) -> anyhow::Result<Vec<(String, PathBuf)>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot read {}", dir.display()))? {
        let path = entry?.path();
        let ext = path.extension().and_then(|e| e.to_str());
        if matches!(ext, Some("wcnf" | "pwcnf")) {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            files.push((stem, path));
        }
    }
    files.sort();
    Ok(files)
}

/// Solves one run in process and prints its CSV row.
pub fn worker(args: WorkerArgs) -> anyhow::Result<()> {
    if let Some(mb) = args.mem_mb {
        limit_memory(mb);
    }
    let input = read_input(&args.file)?;
    let timeout = Duration::from_secs_f64(args.timeout.max(0.0));
    let record = run_one(&args.name, &input, args.alg, args.strategy, args.seed, timeout);
    print!("{}", record_to_row(&record));
    Ok(())
}

#[cfg(unix)]
fn limit_memory(mb: u64) {
    let bytes = mb.saturating_mul(1 << 20) as libc::rlim_t;
    let limit = libc::rlimit {
        rlim_cur: bytes,
        rlim_max: bytes,
    };
    // SAFETY: setrlimit only reads the struct passed by reference.
    if unsafe { libc::setrlimit(libc::RLIMIT_AS, &limit) } != 0 {
        log::warn!("could not set a memory limit of {mb} MiB");
    }
}

#[cfg(not(unix))]
fn limit_memory(mb: u64) {
    log::warn!("memory limits are not supported here; ignoring {mb} MiB");
}

fn drain(mut pipe: impl Read + Send + 'static) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut s = String::new();
        let _ = pipe.read_to_string(&mut s);
        s
    })
}

fn wait_with_limit(child: &mut Child, limit: Duration) -> std::io::Result<Option<std::process::ExitStatus>> {
    let start = Instant::now();
    loop {
        if let Some(status) = child.try_wait()? {
            return Ok(Some(status));
        }
        if start.elapsed() >= limit {
            child.kill()?;
            child.wait()?;
            return Ok(None);
        }
        thread::sleep(Duration::from_millis(5));
    }
}

fn looks_like_oom(status: std::process::ExitStatus, stderr: &str) -> bool {
    if stderr.contains("memory allocation") || stderr.contains("out of memory") {
        return true;
    }
    #[cfg(unix)]
    {
        use std::os::unix::process::ExitStatusExt;
        status.signal() == Some(libc::SIGKILL)
    }
    #[cfg(not(unix))]
    {
        let _ = status;
        false
    }
}

fn run_job(job: &Job, args: &BenchArgs, seed: u64) -> RunRecord {
    let failed = |status, t: f64| {
        RunRecord::failed(&job.name, &job.alg.to_string(), &job.strategy.to_string(), status, t)
    };
    let start = Instant::now();
    let exe = match std::env::current_exe() {
        Ok(e) => e,
        Err(e) => {
            log::error!("cannot locate the upmax executable: {e}");
            return failed(RunStatus::Error, 0.0);
        }
    };
    let mut cmd = Command::new(exe);
    cmd.arg("worker")
        .arg(&job.file)
        .args(["--name", &job.name])
        .args(["--alg", &job.alg.to_string()])
        .args(["--strategy", &job.strategy.to_string()])
        .args(["--timeout", &args.timeout.to_string()])
        .args(["--seed", &seed.to_string()])
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    if let Some(mb) = args.mem_mb {
        cmd.args(["--mem-mb", &mb.to_string()]);
    }
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => {
            log::error!("{}: cannot start worker: {e}", job.name);
            return failed(RunStatus::Error, 0.0);
        }
    };
    let out = drain(child.stdout.take().expect("piped stdout"));
    let err = drain(child.stderr.take().expect("piped stderr"));
    let limit = Duration::from_secs_f64((args.timeout + args.grace).max(0.0));
    let waited = wait_with_limit(&mut child, limit);
    let elapsed = start.elapsed().as_secs_f64();
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();
    match waited {
        Ok(None) => failed(RunStatus::Timeout, elapsed.min(limit.as_secs_f64())),
        Ok(Some(status)) if status.success() => match read_csv(stdout.as_bytes(), false) {
            Ok(mut rows) if rows.len() == 1 => rows.pop().expect("one row"),
            _ => {
                log::error!("{}: unreadable worker output `{}`", job.name, stdout.trim());
                failed(RunStatus::Error, elapsed)
            }
        },
        Ok(Some(status)) => {
            let kind = if looks_like_oom(status, &stderr) {
                RunStatus::Oom
            } else {
                RunStatus::Error
            };
            log::warn!("{} {}/{}: worker {status}: {}", job.name, job.alg, job.strategy, stderr.trim());
            failed(kind, elapsed)
        }
        Err(e) => {
            log::error!("{}: waiting for worker failed: {e}", job.name);
            failed(RunStatus::Error, elapsed)
        }
    }
}

pub fn run(args: BenchArgs) -> anyhow::Result<()> {
    if !(args.timeout.is_finite() && args.timeout >= 0.0 && args.grace.is_finite() && args.grace >= 0.0) {
        bail!(UsageError("timeout and grace must be non-negative seconds".into()));
    }
    let algs: Vec<AlgorithmKind> = split_list(&args.algs, "--algs")?;
    let strategies: Vec<Strategy> = split_list(&args.strategies, "--strategies")?;
    let files = corpus_files(&args.corpus)?;
    if files.is_empty() {
        bail!(UsageError(format!("no .wcnf or .pwcnf files in {}", args.corpus.display())));
    }
    let seed = resolve_seed(args.seed);
    let mut jobs = VecDeque::new();
    for (name, file) in &files {
        for &alg in &algs {
            for &strategy in &strategies {
                jobs.push_back(Job {
                    index: jobs.len(),
                    name: name.clone(),
                    file: file.clone(),
                    alg,
                    strategy,
                });
            }
        }
    }
    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let total = jobs.len();
    let workers = args
        .jobs
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, total.max(1));
    let queue = Mutex::new(jobs);
    let mut log_file = File::create(args.out.join("runs.csv"))?;
    writeln!(log_file, "{}", CSV_HEADER.join(","))?;
    let sink = Mutex::new((Vec::with_capacity(total), log_file));
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let Some(job) = queue.lock().expect("queue lock").pop_front() else {
                    break;
                };
                let record = run_job(&job, &args, seed);
                let mut guard = sink.lock().expect("sink lock");
                let _ = guard.1.write_all(record_to_row(&record).as_bytes());
                guard.0.push((job.index, record));
            });
        }
    });
    let mut records = sink.into_inner().expect("sink lock").0;
    records.sort_by_key(|r| r.0);
    let records: Vec<RunRecord> = records.into_iter().map(|r| r.1).collect();
    write_results(&args, &algs, &strategies, &records)
}

fn write_results(
    args: &BenchArgs,
    algs: &[AlgorithmKind],
    strategies: &[Strategy],
    records: &[RunRecord],
) -> anyhow::Result<()> {
    write_csv(records, File::create(args.out.join("results.csv"))?)?;
    let summary = summarize(records).to_string();
    fs::write(args.out.join("summary.txt"), &summary)?;
    fs::write(args.out.join("cactus.csv"), cactus_csv(records))?;
    let pair = match &args.scatter {
        Some(v) => Some((v[0].clone(), v[1].clone())),
        None => match (algs.first(), strategies) {
            (Some(a), [s1, s2, ..]) => Some((format!("{a}/{s1}"), format!("{a}/{s2}"))),
            _ => None,
        },
    };
    if let Some((a, b)) = pair {
        fs::write(args.out.join("scatter.csv"), scatter_csv(records, &a, &b, args.timeout))?;
    }
    print!("{summary}");
    Ok(())
}
