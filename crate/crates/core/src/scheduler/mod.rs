//! Parallel execution of independent per-column tasks.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sparse::CscMatrix;
use crate::submatrix::{solve_submatrix, MethodConfig, MethodError, SubmatrixTask};

/// How columns are distributed across workers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Contiguous blocks of `⌈n/w⌉` or `⌊n/w⌋` columns.
    Static,
    /// A seeded random permutation dealt out round-robin.
    Shuffled { seed: u64 },
    /// Workers pull chunks of `chunk` consecutive columns from a shared counter.
    Dynamic { chunk: usize },
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Static => f.write_str("static"),
            Strategy::Shuffled { .. } => f.write_str("shuffled"),
            Strategy::Dynamic { .. } => f.write_str("dynamic"),
        }
    }
}

impl FromStr for Strategy {
    type Err = MethodError;

    /// Parses the name only; seed and chunk take their defaults.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "static" => Ok(Strategy::Static),
            "shuffled" => Ok(Strategy::Shuffled { seed: 0 }),
            "dynamic" => Ok(Strategy::Dynamic { chunk: 1 }),
            other => Err(MethodError::InvalidConfig(format!("unknown strategy '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchedulerConfig {
    workers: usize,
    strategy: Strategy,
}

impl SchedulerConfig {
    pub fn new(workers: usize, strategy: Strategy) -> Result<Self, MethodError> {
        if workers == 0 {
            return Err(MethodError::InvalidConfig("workers must be at least 1".into()));
        }
        if let Strategy::Dynamic { chunk: 0 } = strategy {
            return Err(MethodError::InvalidConfig("chunk must be at least 1".into()));
        }
        Ok(SchedulerConfig { workers, strategy })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }
}

/// Columns assigned to each worker, in processing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub per_worker: Vec<Vec<usize>>,
}

impl Assignment {
    pub fn workers(&self) -> usize {
        self.per_worker.len()
    }

    /// True if every column in `0..n` appears exactly once.
    pub fn is_partition(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for &c in self.per_worker.iter().flatten() {
            if c >= n || seen[c] {
                return false;
            }
            seen[c] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

/// Worker `i` gets the contiguous range starting at `i·⌊n/w⌋ + min(i, n mod w)`;
/// the first `n mod w` workers take one extra column.
pub fn plan_static(n: usize, workers: usize) -> Assignment {
    assert!(workers > 0);
    let base = n / workers;
    let extra = n % workers;
    let mut start = 0;
    let per_worker = (0..workers)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let range = (start..start + len).collect();
            start += len;
            range
        })
        .collect();
    Assignment { per_worker }
}

/// Seeded Fisher–Yates permutation of `0..n`.
pub fn shuffled_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

/// Worker `i` gets `perm[i], perm[i + w], perm[i + 2w], …`.
pub fn plan_shuffled(n: usize, workers: usize, seed: u64) -> Assignment {
    assert!(workers > 0);
    let mut per_worker = vec![Vec::with_capacity(n / workers + 1); workers];
    for (k, c) in shuffled_permutation(n, seed).into_iter().enumerate() {
        per_worker[k % workers].push(c);
    }
    Assignment { per_worker }
}

/// Timing of one pipeline run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimingReport {
    pub workers: usize,
    /// Time each worker spent inside the dense kernel.
    pub per_worker_busy: Vec<Duration>,
    pub tasks_per_worker: Vec<usize>,
    pub wall_time: Duration,
    /// Index-set construction and extraction, summed over workers.
    pub build: Duration,
    /// Kernel time, summed over workers.
    pub solve: Duration,
    pub assemble: Duration,
    pub max_submatrix_dim: usize,
    /// Columns whose submatrix is larger than `n/2`.
    pub oversized_columns: Vec<usize>,
}

impl TimingReport {
    /// `max(busy) / mean(busy)`; 1 is perfect balance.
    pub fn imbalance(&self) -> f64 {
        let busy: Vec<f64> = self.per_worker_busy.iter().map(Duration::as_secs_f64).collect();
        let mean = busy.iter().sum::<f64>() / busy.len().max(1) as f64;
        if mean == 0.0 {
            return 1.0;
        }
        busy.iter().cloned().fold(0.0, f64::max) / mean
    }
}

/// Per-task timings returned by the work function of [`execute`].
#[derive(Clone, Copy, Debug, Default)]
pub struct TaskTiming {
    pub build: Duration,
    pub solve: Duration,
}

/// Aggregated result of [`execute`].
#[derive(Clone, Debug, Default)]
pub struct ExecStats {
    pub per_worker_busy: Vec<Duration>,
    pub tasks_per_worker: Vec<usize>,
    pub build: Duration,
    pub solve: Duration,
    pub wall_time: Duration,
}

/// Runs `work(j)` for every `j` in `0..n` on exactly `cfg.workers()` threads.
///
/// Results are returned indexed by `j`, independent of the strategy. The first
/// error stops all workers after their current task and is returned.
pub fn execute<T, E, F>(n: usize, cfg: &SchedulerConfig, work: F) -> Result<(Vec<T>, ExecStats), E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<(T, TaskTiming), E> + Sync,
{
    let w = cfg.workers();
    let plan = match cfg.strategy() {
        Strategy::Static => Some(plan_static(n, w)),
        Strategy::Shuffled { seed } => Some(plan_shuffled(n, w, seed)),
        Strategy::Dynamic { .. } => None,
    };
    let chunk = match cfg.strategy() {
        Strategy::Dynamic { chunk } => chunk,
        _ => 1,
    };
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let failure: Mutex<Option<E>> = Mutex::new(None);

    let start = Instant::now();
    let per_worker: Vec<WorkerOutput<T>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..w)
            .map(|i| {
                let own = plan.as_ref().map(|p| p.per_worker[i].as_slice());
                let (work, next, abort, failure) = (&work, &next, &abort, &failure);
                s.spawn(move || {
                    let mut out = WorkerOutput::default();
                    let mut run = |j: usize| -> bool {
                        if abort.load(Ordering::Relaxed) {
                            return false;
                        }
                        match work(j) {
                            Ok((value, timing)) => {
                                out.results.push((j, value));
                                out.build += timing.build;
                                out.solve += timing.solve;
                                true
                            }
                            Err(e) => {
                                abort.store(true, Ordering::Relaxed);
                                let mut slot = failure.lock().unwrap();
                                if slot.is_none() {
                                    *slot = Some(e);
                                }
                                false
                            }
                        }
                    };
                    match own {
                        Some(cols) => {
                            for &j in cols {
                                if !run(j) {
                                    break;
                                }
                            }
                        }
                        None => 'outer: loop {
                            let lo = next.fetch_add(chunk, Ordering::Relaxed);
                            if lo >= n {
                                break;
                            }
                            for j in lo..(lo + chunk).min(n) {
                                if !run(j) {
                                    break 'outer;
                                }
                            }
                        },
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect()
    });
    let wall_time = start.elapsed();

    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }

    let mut stats = ExecStats {
        wall_time,
        ..ExecStats::default()
    };
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    for out in per_worker {
        stats.per_worker_busy.push(out.solve);
        stats.tasks_per_worker.push(out.results.len());
        stats.build += out.build;
        stats.solve += out.solve;
        for (j, value) in out.results {
            slots[j] = Some(value);
        }
    }
    let results = slots
        .into_iter()
        .map(|s| s.expect("every column is processed exactly once"))
        .collect();
    Ok((results, stats))
}

struct WorkerOutput<T> {
    results: Vec<(usize, T)>,
    build: Duration,
    solve: Duration,
}

impl<T> Default for WorkerOutput<T> {
    fn default() -> Self {
        WorkerOutput {
            results: Vec::new(),
            build: Duration::ZERO,
            solve: Duration::ZERO,
        }
    }
}

/// Computes the result column of every submatrix task in parallel.
pub fn run_parallel(
    a: &CscMatrix,
    cfg: &MethodConfig,
    sched: &SchedulerConfig,
) -> Result<(Vec<Vec<f64>>, TimingReport), MethodError> {
    let n = a.n();
    let (columns, stats) = execute(n, sched, |j| {
        let t0 = Instant::now();
        let task = SubmatrixTask::new(a, j)?;
        let t1 = Instant::now();
        let col = solve_submatrix(&task, cfg)?;
        let timing = TaskTiming {
            build: t1 - t0,
            solve: t1.elapsed(),
        };
        Ok::<_, MethodError>((col, timing))
    })?;

    let max_submatrix_dim = (0..n).map(|j| a.column_nnz(j)).max().unwrap_or(0);
    let oversized_columns = (0..n).filter(|&j| 2 * a.column_nnz(j) > n).collect();
    let report = TimingReport {
        workers: sched.workers(),
        per_worker_busy: stats.per_worker_busy,
        tasks_per_worker: stats.tasks_per_worker,
        wall_time: stats.wall_time,
        build: stats.build,
        solve: stats.solve,
        assemble: Duration::ZERO,
        max_submatrix_dim,
        oversized_columns,
    };
    Ok((columns, report))
}
