//! Command-line front end: generation, inversion, preconditioning, fetching
//! and benchmarking.

pub mod args;
pub mod bench;
pub mod fetch;
pub mod report;

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use submatrix_core::apps::{
    cg_solve, cg_solve_preconditioned, cg_solve_split_preconditioned, default_max_iter, ilu0,
    make_sm_preconditioner, AppError, CgReport,
};
use submatrix_core::kernels::KernelError;
use submatrix_core::sparse::{
    estimate_condition, generate_sparse_spd, read_matrix_market, write_matrix_market, GeneratorSpec,
};
use submatrix_core::{
    residual_norm, submatrix_inverse_proot, CscMatrix, MethodConfig, MethodError, SchedulerConfig,
    SparseError,
};

use args::{BenchArgs, Cli, Command, FetchArgs, GenArgs, InvrootArgs, PrecondArgs, PreconditionerArg};
use bench::{run_bench, BenchConfig};
use report::join_records;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid arguments: {0}")]
    InvalidArgs(String),
    #[error("network error: {0}")]
    Network(String),
    #[error("corrupt download: {0}")]
    Corrupt(String),
    #[error("malformed report: {0}")]
    Report(String),
    #[error("{path}: {source}")]
    Read { path: String, source: SparseError },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Method(#[from] MethodError),
    #[error(transparent)]
    App(#[from] AppError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl CliError {
    /// 2 for invalid flags, 3 for network failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidArgs(_) => 2,
            CliError::Network(_) => 3,
            _ => 1,
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Invroot(a) => cmd_invroot(&a, out),
        Command::Precond(a) => cmd_precond(&a, out),
        Command::Fetch(a) => cmd_fetch(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    }
}

pub fn read_matrix(path: &Path) -> Result<CscMatrix, CliError> {
    let read = || -> Result<CscMatrix, SparseError> {
        let f = fs::File::open(path)?;
        read_matrix_market(BufReader::new(f))
    };
    read().map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn matrix_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::InvalidArgs(e.to_string())
}

pub fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = GeneratorSpec::new(a.n, a.density, a.kappa, a.kind.into(), a.seed);
    spec.validate().map_err(invalid)?;
    let m = generate_sparse_spd(&spec)?;
    fs::write(&a.out, write_matrix_market(&m))?;
    let kappa = estimate_condition(&m)?;
    writeln!(
        out,
        "wrote {}: n={} nnz={} density={} kappa_est={}",
        a.out.display(),
        m.n(),
        m.nnz(),
        m.density(),
        kappa
    )?;
    Ok(())
}

fn method_config(p: u32, kernel: Option<args::KernelArg>, refine_tol: Option<f64>, refine_max_iter: usize) -> Result<MethodConfig, CliError> {
    let mut cfg = MethodConfig::new(p).map_err(invalid)?;
    if let Some(k) = kernel {
        cfg = cfg.with_kernel(k.into()).map_err(invalid)?;
    }
    if let Some(tol) = refine_tol {
        if !(tol > 0.0) {
            return Err(invalid("refine tolerance must be positive"));
        }
        cfg = cfg.with_refinement(tol, refine_max_iter);
    }
    Ok(cfg)
}

pub fn cmd_invroot(a: &InvrootArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = method_config(a.p, a.kernel, a.refine_tol, a.refine_max_iter)?;
    let sched = SchedulerConfig::new(a.workers, a.strategy.to_strategy(a.seed, a.chunk)).map_err(invalid)?;
    let m = read_matrix(&a.input)?;

    let start = std::time::Instant::now();
    let (mut x, timing) = submatrix_inverse_proot(&m, &cfg, &sched)?;
    let wall = bench::ms(start.elapsed());
    if a.symmetrize {
        x = x.symmetrize()?;
    }
    if let Some(path) = &a.out {
        fs::write(path, write_matrix_market(&x))?;
    }
    let residual = a.residual.then(|| residual_norm(&m, &x, cfg.p()));
    let report = bench::run_report(
        &m,
        &matrix_name(&a.input),
        &cfg,
        &sched,
        1,
        (wall, wall, wall),
        &timing,
        residual,
        None,
    );
    match &a.report {
        Some(path) => fs::write(path, report.to_string())?,
        None => write!(out, "{report}")?,
    }
    Ok(())
}

pub fn cmd_precond(a: &PrecondArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !(a.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let sched = SchedulerConfig::new(a.workers, submatrix_core::Strategy::Static).map_err(invalid)?;
    let m = read_matrix(&a.input)?;
    let n = m.n();
    let max_iter = a.maxiter.unwrap_or_else(|| default_max_iter(n));
    let b = vec![1.0; n];

    let result: Result<CgReport, AppError> = match a.preconditioner {
        PreconditionerArg::None => cg_solve(&m, &b, a.tol, max_iter),
        PreconditionerArg::Sm => {
            let k = make_sm_preconditioner(&m, &sched)?;
            cg_solve_split_preconditioned(&m, &b, &k, a.tol, max_iter)
        }
        PreconditionerArg::Ilu0 => ilu0(&m).and_then(|f| cg_solve_preconditioned(&m, &b, &f, a.tol, max_iter)),
    };
    let kappa = if a.no_kappa {
        "skipped".to_string()
    } else {
        estimate_condition(&m).map_or_else(|e| format!("unavailable ({e})"), |k| k.to_string())
    };
    let (iterations, status) = match &result {
        Ok(r) if r.converged => (r.iterations.to_string(), "converged".to_string()),
        Ok(_) => ("DNC".to_string(), "max_iter".to_string()),
        Err(AppError::Breakdown { iteration, .. }) => ("DNC".to_string(), format!("breakdown@{iteration}")),
        Err(AppError::ZeroPivot { column }) => ("DNC".to_string(), format!("zero_pivot@{column}")),
        Err(_) => return Err(result.unwrap_err().into()),
    };
    writeln!(
        out,
        "matrix={} n={} kappa={} preconditioner={} iterations={} status={}",
        matrix_name(&a.input),
        n,
        kappa,
        a.preconditioner.name(),
        iterations,
        status
    )?;
    Ok(())
}

pub fn cmd_fetch(a: &FetchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let base = fetch::resolve_base_url(a.base_url.as_deref());
    let path = fetch::fetch_matrix(&a.group, &a.name, &a.cache_dir, &base)?;
    writeln!(out, "{}", path.display())?;
    Ok(())
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = BenchConfig {
        mode: a.mode,
        sizes: a.sizes_list.clone(),
        workers: a.workers_list.clone(),
        n: a.n,
        density: a.density,
        kappa: a.kappa,
        kind: a.kind.into(),
        seed: a.seed,
        method: method_config(a.p, a.kernel, None, 0)?,
        strategy: a.strategy.to_strategy(a.shuffle_seed, a.chunk),
        repeats: a.repeats,
        residual: a.residual,
        dense_baseline: a.dense_baseline,
    };
    if cfg.workers.is_empty() || cfg.workers.contains(&0) {
        return Err(invalid("workers list must contain positive counts"));
    }
    if cfg.mode != bench::BenchMode::Cores && cfg.sizes.is_empty() {
        return Err(invalid("sizes list is empty"));
    }
    let outcome = run_bench(&cfg)?;
    let mut records: Vec<_> = outcome.reports.iter().map(|r| r.to_record()).collect();
    records.push(outcome.summary);
    let text = join_records(&records);
    match &a.report {
        Some(path) => fs::write(path, &text)?,
        None => write!(out, "{text}")?,
    }
    Ok(())
}
