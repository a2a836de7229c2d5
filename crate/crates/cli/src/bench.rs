//! Scaling sweeps.

use std::time::Instant;

use submatrix_core::kernels::{lu_factor, lu_invert};
use submatrix_core::sparse::{generate_sparse_spd, GeneratorSpec, MatrixKind};
use submatrix_core::{
    residual_norm, submatrix_inverse_proot, CscMatrix, MethodConfig, SchedulerConfig, Strategy,
    TimingReport,
};

use crate::report::{Record, RunReport, SUMMARY_HEADER};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum BenchMode {
    /// One matrix, varying worker count.
    Cores,
    /// Varying n at constant density.
    SizesFixedD,
    /// Varying n with `d = 0.16·1024/n`, so nonzeros per column stay constant.
    SizesLinearD,
}

impl BenchMode {
    pub fn name(self) -> &'static str {
        match self {
            BenchMode::Cores => "cores",
            BenchMode::SizesFixedD => "sizes-fixed-d",
            BenchMode::SizesLinearD => "sizes-linear-d",
        }
    }
}

/// Density of the linear-d sweep at size `n`.
pub fn linear_density(n: usize) -> f64 {
    (0.16 * 1024.0 / n as f64).min(1.0)
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub mode: BenchMode,
    pub sizes: Vec<usize>,
    pub workers: Vec<usize>,
    pub n: usize,
    pub density: f64,
    pub kappa: f64,
    pub kind: MatrixKind,
    pub seed: u64,
    pub method: MethodConfig,
    pub strategy: Strategy,
    pub repeats: usize,
    pub residual: bool,
    pub dense_baseline: bool,
}

pub struct BenchOutcome {
    pub reports: Vec<RunReport>,
    pub summary: Record,
}

pub fn matrix_id(kind: MatrixKind, n: usize, d: f64, kappa: f64, seed: u64) -> String {
    format!("{kind}-n{n}-d{d}-k{kappa}-s{seed}")
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchOutcome, CliError> {
    if cfg.repeats == 0 {
        return Err(CliError::InvalidArgs("repeats must be at least 1".into()));
    }
    let mut reports = Vec::new();
    let mut summary = Record::new(SUMMARY_HEADER);
    summary.push("mode", cfg.mode.name());
    match cfg.mode {
        BenchMode::Cores => {
            let a = generate(cfg, cfg.n, cfg.density)?;
            let id = matrix_id(cfg.kind, cfg.n, cfg.density, cfg.kappa, cfg.seed);
            for &w in &cfg.workers {
                let sched = scheduler(w, cfg.strategy)?;
                reports.push(measure(&a, &id, &cfg.method, &sched, cfg.repeats, cfg.residual, cfg.dense_baseline)?);
            }
            let base = reports
                .iter()
                .find(|r| r.workers == 1)
                .or(reports.first())
                .map(|r| r.wall_time_ms);
            if let Some(base) = base {
                for r in &mut reports {
                    r.speedup = Some(base / r.wall_time_ms);
                }
            }
            let monotone = reports.windows(2).all(|w| w[1].wall_time_ms <= w[0].wall_time_ms);
            summary.push("monotone_nonincreasing", monotone);
        }
        BenchMode::SizesFixedD | BenchMode::SizesLinearD => {
            let w = cfg.workers.first().copied().unwrap_or(1);
            let sched = scheduler(w, cfg.strategy)?;
            for &n in &cfg.sizes {
                let d = match cfg.mode {
                    BenchMode::SizesLinearD => linear_density(n),
                    _ => cfg.density,
                };
                let a = generate(cfg, n, d)?;
                let id = matrix_id(cfg.kind, n, d, cfg.kappa, cfg.seed);
                reports.push(measure(&a, &id, &cfg.method, &sched, cfg.repeats, cfg.residual, cfg.dense_baseline)?);
            }
            let points: Vec<(f64, f64)> = reports.iter().map(|r| (r.n as f64, r.wall_time_ms)).collect();
            if points.len() >= 2 {
                summary.push("loglog_slope", loglog_slope(&points));
            }
        }
    }
    Ok(BenchOutcome { reports, summary })
}

fn scheduler(workers: usize, strategy: Strategy) -> Result<SchedulerConfig, CliError> {
    SchedulerConfig::new(workers, strategy).map_err(|e| CliError::InvalidArgs(e.to_string()))
}

fn generate(cfg: &BenchConfig, n: usize, d: f64) -> Result<CscMatrix, CliError> {
    let spec = GeneratorSpec::new(n, d, cfg.kappa, cfg.kind, cfg.seed);
    spec.validate().map_err(|e| CliError::InvalidArgs(e.to_string()))?;
    Ok(generate_sparse_spd(&spec)?)
}

/// Runs the method `repeats` times and reports min/median/max wall time.
/// Phase times and busy times come from the median run.
pub fn measure(
    a: &CscMatrix,
    id: &str,
    method: &MethodConfig,
    sched: &SchedulerConfig,
    repeats: usize,
    residual: bool,
    dense_baseline: bool,
) -> Result<RunReport, CliError> {
    let mut runs: Vec<(f64, TimingReport)> = Vec::with_capacity(repeats);
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let t = Instant::now();
        let (x, timing) = submatrix_inverse_proot(a, method, sched)?;
        runs.push((ms(t.elapsed()), timing));
        last = Some(x);
    }
    runs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let min = runs[0].0;
    let max = runs[runs.len() - 1].0;
    let (median, timing) = runs[(runs.len() - 1) / 2].clone();
    let residual_norm = if residual {
        Some(residual_norm(a, last.as_ref().unwrap(), method.p()))
    } else {
        None
    };
    let dense_baseline_ms = if dense_baseline {
        Some(dense_inverse_ms(a)?)
    } else {
        None
    };
    Ok(run_report(a, id, method, sched, repeats, (min, median, max), &timing, residual_norm, dense_baseline_ms))
}

#[allow(clippy::too_many_arguments)]
pub fn run_report(
    a: &CscMatrix,
    id: &str,
    method: &MethodConfig,
    sched: &SchedulerConfig,
    repeats: usize,
    (min, median, max): (f64, f64, f64),
    timing: &TimingReport,
    residual_norm: Option<f64>,
    dense_baseline_ms: Option<f64>,
) -> RunReport {
    RunReport {
        matrix_id: id.to_string(),
        n: a.n(),
        nnz: a.nnz(),
        density: a.density(),
        p: method.p(),
        kernel: method.kernel().to_string(),
        strategy: sched.strategy().to_string(),
        workers: sched.workers(),
        repeats,
        wall_time_ms: median,
        wall_time_ms_min: min,
        wall_time_ms_max: max,
        build_ms: ms(timing.build),
        solve_ms: ms(timing.solve),
        assemble_ms: ms(timing.assemble),
        per_worker_busy_ms: timing.per_worker_busy.iter().map(|d| ms(*d)).collect(),
        max_submatrix_dim: timing.max_submatrix_dim,
        oversized_columns: timing.oversized_columns.len(),
        residual_norm,
        speedup: None,
        dense_baseline_ms,
    }
}

/// Wall time of a dense LU inversion of the whole matrix with the same kernels.
pub fn dense_inverse_ms(a: &CscMatrix) -> Result<f64, CliError> {
    let d = a.to_dense();
    let t = Instant::now();
    let f = lu_factor(&d)?;
    lu_invert(&f)?;
    Ok(ms(t.elapsed()))
}

pub fn ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}
