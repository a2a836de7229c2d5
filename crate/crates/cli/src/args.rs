use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use submatrix_core::sparse::MatrixKind;
use submatrix_core::submatrix::KernelKind;
use submatrix_core::Strategy;

use crate::bench::BenchMode;

#[derive(Debug, Parser)]
#[command(name = "submatrix", version, about = "Sparse approximate inverse p-th roots by the submatrix method")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random sparse SPD matrix in Matrix Market format.
    Gen(GenArgs),
    /// Compute X ≈ A^{-1/p} and write a run report.
    Invroot(InvrootArgs),
    /// Solve A x = 1 with CG and print the iteration count.
    Precond(PrecondArgs),
    /// Download a matrix from the SuiteSparse collection into a local cache.
    Fetch(FetchArgs),
    /// Run scaling sweeps.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Balanced,
    Unbalanced,
}

impl From<KindArg> for MatrixKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Balanced => MatrixKind::Balanced,
            KindArg::Unbalanced => MatrixKind::Unbalanced,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Lu,
    Eig,
}

impl From<KernelArg> for KernelKind {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Lu => KernelKind::Lu,
            KernelArg::Eig => KernelKind::Eig,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Static,
    Shuffled,
    Dynamic,
}

impl StrategyArg {
    pub fn to_strategy(self, seed: u64, chunk: usize) -> Strategy {
        match self {
            StrategyArg::Static => Strategy::Static,
            StrategyArg::Shuffled => Strategy::Shuffled { seed },
            StrategyArg::Dynamic => Strategy::Dynamic { chunk },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PreconditionerArg {
    None,
    Sm,
    Ilu0,
}

impl PreconditionerArg {
    pub fn name(self) -> &'static str {
        match self {
            PreconditionerArg::None => "none",
            PreconditionerArg::Sm => "sm",
            PreconditionerArg::Ilu0 => "ilu0",
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub density: f64,
    #[arg(long, default_value_t = 2.0)]
    pub kappa: f64,
    #[arg(long, value_enum, default_value_t = KindArg::Balanced)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InvrootArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Static)]
    pub strategy: StrategyArg,
    /// Columns per work package for the dynamic strategy.
    #[arg(long, default_value_t = 1)]
    pub chunk: usize,
    /// Permutation seed for the shuffled strategy.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dense kernel; defaults to lu for p = 1 and eig otherwise.
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    /// Newton-refine every submatrix result to this residual.
    #[arg(long)]
    pub refine_tol: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub refine_max_iter: usize,
    /// Replace X by (X + Xᵀ)/2 before writing.
    #[arg(long)]
    pub symmetrize: bool,
    /// Compute ‖X^p·A − I‖₂ and include it in the report.
    #[arg(long)]
    pub residual: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report file; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PrecondArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = PreconditionerArg::None)]
    pub preconditioner: PreconditionerArg,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Defaults to 2n.
    #[arg(long)]
    pub maxiter: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Skip the condition number estimate.
    #[arg(long)]
    pub no_kappa: bool,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub name: String,
    #[arg(long, default_value = "suitesparse-cache")]
    pub cache_dir: PathBuf,
    /// Overrides SM_SUITESPARSE_URL and the default collection host.
    #[arg(long)]
    pub base_url: Option<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub mode: BenchMode,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub workers_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1024,2048,4096,8192,16384")]
    pub sizes_list: Vec<usize>,
    /// Matrix size for cores mode.
    #[arg(long, default_value_t = 8192)]
    pub n: usize,
    /// Density for cores and sizes-fixed-d modes.
    #[arg(long, default_value_t = 0.01)]
    pub density: f64,
    #[arg(long, default_value_t = 2.0)]
    pub kappa: f64,
    #[arg(long, value_enum, default_value_t = KindArg::Balanced)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub p: u32,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Static)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 1)]
    pub chunk: usize,
    #[arg(long, default_value_t = 0)]
    pub shuffle_seed: u64,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long)]
    pub residual: bool,
    /// Also time a dense LU inversion of each matrix.
    #[arg(long)]
    pub dense_baseline: bool,
    #[arg(long)]
    pub report: Option<PathBuf>,
}
