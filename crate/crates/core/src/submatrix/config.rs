use std::fmt;
use std::str::FromStr;

use super::MethodError;

/// Dense kernel used on each submatrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// LU with partial pivoting; inverse only (`p = 1`).
    Lu,
    /// Jacobi eigendecomposition; any `p`.
    Eig,
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::Lu => "lu",
            KernelKind::Eig => "eig",
        })
    }
}

impl FromStr for KernelKind {
    type Err = MethodError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lu" => Ok(KernelKind::Lu),
            "eig" => Ok(KernelKind::Eig),
            other => Err(MethodError::InvalidConfig(format!("unknown kernel '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineConfig {
    pub tol: f64,
    pub max_iter: usize,
}

/// Which root to take, with which kernel, and whether to polish each
/// submatrix result with Newton refinement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodConfig {
    p: u32,
    kernel: KernelKind,
    refine: Option<RefineConfig>,
}

impl MethodConfig {
    /// Defaults to LU for `p = 1`, eigendecomposition otherwise.
    pub fn new(p: u32) -> Result<Self, MethodError> {
        if p == 0 {
            return Err(MethodError::InvalidConfig("p must be at least 1".into()));
        }
        let kernel = if p == 1 { KernelKind::Lu } else { KernelKind::Eig };
        Ok(MethodConfig {
            p,
            kernel,
            refine: None,
        })
    }

    pub fn with_kernel(mut self, kernel: KernelKind) -> Result<Self, MethodError> {
        if kernel == KernelKind::Lu && self.p != 1 {
            return Err(MethodError::InvalidConfig(format!(
                "the LU kernel only computes inverses, got p = {}",
                self.p
            )));
        }
        self.kernel = kernel;
        Ok(self)
    }

    pub fn with_refinement(mut self, tol: f64, max_iter: usize) -> Self {
        self.refine = Some(RefineConfig { tol, max_iter });
        self
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn kernel(&self) -> KernelKind {
        self.kernel
    }

    pub fn refine(&self) -> Option<RefineConfig> {
        self.refine
    }
}
