//! Random sparse symmetric positive definite test matrices.
//!
//! A symmetric off-diagonal pattern `B` is drawn with a prescribed per-column
//! degree sequence (configuration model), then `A = I + t·B` where `t` is set
//! from the extreme eigenvalues of `B` so that `λ_max(A)/λ_min(A)` hits the
//! requested condition number.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::norm::lanczos_extremes;
use super::{CscMatrix, SparseError};

/// Column fill layout of a generated matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    /// Every column has roughly the same number of nonzeros.
    Balanced,
    /// Contiguous column blocks with very different fill.
    Unbalanced,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::Balanced => "balanced",
            MatrixKind::Unbalanced => "unbalanced",
        })
    }
}

impl FromStr for MatrixKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "balanced" => Ok(MatrixKind::Balanced),
            "unbalanced" => Ok(MatrixKind::Unbalanced),
            other => Err(format!("unknown matrix kind '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub n: usize,
    /// Target fraction of nonzeros, in `(0, 1]`.
    pub density: f64,
    /// Target condition number, `≥ 1`.
    pub kappa: f64,
    pub kind: MatrixKind,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(n: usize, density: f64, kappa: f64, kind: MatrixKind, seed: u64) -> Self {
        GeneratorSpec {
            n,
            density,
            kappa,
            kind,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), SparseError> {
        let fail = |msg: String| Err(SparseError::InfeasibleSpec(msg));
        if self.n == 0 {
            return fail("n must be positive".into());
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return fail(format!("density {} outside (0, 1]", self.density));
        }
        if !(self.kappa >= 1.0) || !self.kappa.is_finite() {
            return fail(format!("condition number {} must be finite and >= 1", self.kappa));
        }
        if self.density * (self.n as f64) < 1.0 {
            return fail(format!(
                "density {} leaves less than one nonzero per column at n = {}",
                self.density, self.n
            ));
        }
        Ok(())
    }
}

/// Fill multipliers of the unbalanced layout: evenly spaced, mean 1.
const UNBALANCED_BLOCKS: usize = 8;
const MULTIPLIER_SPREAD: (f64, f64) = (0.3, 1.7);

/// Smallest condition number targeted; `κ = 1` would require zero off-diagonals.
const MIN_KAPPA: f64 = 1.0 + 1e-3;

pub fn generate_sparse_spd(spec: &GeneratorSpec) -> Result<CscMatrix, SparseError> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mean_degree = (spec.density * n as f64 - 1.0).clamp(0.0, (n - 1) as f64);
    let degrees = degree_sequence(n, mean_degree, spec.kind, &mut rng);
    let edges = if spec.kind == MatrixKind::Balanced && mean_degree > 0.5 * (n - 1) as f64 {
        let complement: Vec<usize> = degrees.iter().map(|&d| n - 1 - d).collect();
        let removed: HashSet<(usize, usize)> =
            configuration_model(&complement, &mut rng).into_iter().collect();
        let mut kept = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if !removed.contains(&(i, j)) {
                    kept.push((i, j));
                }
            }
        }
        kept
    } else {
        configuration_model(&degrees, &mut rng)
    };

    let mut off = Vec::with_capacity(2 * edges.len());
    for &(i, j) in &edges {
        let magnitude = rng.random_range(0.1..1.0);
        let v = if rng.random_bool(0.5) { magnitude } else { -magnitude };
        off.push((i, j, v));
        off.push((j, i, v));
    }
    let b = CscMatrix::from_triplets(&off, n)?;

    let scale = if edges.is_empty() {
        0.0
    } else {
        let (lo, hi) = lanczos_extremes(&b, 96, spec.seed ^ 0x9e37_79b9_7f4a_7c15);
        let kappa = spec.kappa.max(MIN_KAPPA);
        // (1 + t·hi) / (1 + t·lo) = κ
        (kappa - 1.0) / (hi - kappa * lo)
    };

    let mut entries = off;
    for e in entries.iter_mut() {
        e.2 *= scale;
    }
    entries.retain(|e| e.2 != 0.0);
    entries.extend((0..n).map(|i| (i, i, 1.0)));
    CscMatrix::from_triplets(&entries, n)
}

fn stochastic_round(x: f64, rng: &mut ChaCha8Rng) -> usize {
    let base = x.floor();
    let frac = x - base;
    base as usize + usize::from(frac > 0.0 && rng.random_bool(frac))
}

fn degree_sequence(n: usize, mean: f64, kind: MatrixKind, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut degrees: Vec<usize> = match kind {
        MatrixKind::Balanced => (0..n).map(|_| stochastic_round(mean, rng)).collect(),
        MatrixKind::Unbalanced => {
            let blocks = UNBALANCED_BLOCKS.min(n);
            let (lo, hi) = MULTIPLIER_SPREAD;
            let mut multipliers: Vec<f64> = (0..blocks)
                .map(|k| {
                    if blocks == 1 {
                        1.0
                    } else {
                        lo + (hi - lo) * k as f64 / (blocks - 1) as f64
                    }
                })
                .collect();
            multipliers.shuffle(rng);
            (0..n)
                .map(|j| {
                    let block = j * blocks / n;
                    stochastic_round(mean * multipliers[block], rng)
                })
                .collect()
        }
    };
    for d in degrees.iter_mut() {
        *d = (*d).min(n - 1);
    }
    if degrees.iter().sum::<usize>() % 2 == 1 {
        if let Some(d) = degrees.iter_mut().find(|d| **d > 0) {
            *d -= 1;
        }
    }
    degrees
}

/// Random simple graph approximately realizing `degrees`; edges as `(i, j)`
/// with `i < j`. Stubs that keep colliding after the retry rounds are dropped.
fn configuration_model(degrees: &[usize], rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(node, &d)| std::iter::repeat_n(node, d))
        .collect();
    let mut seen: HashSet<(usize, usize)> = HashSet::with_capacity(stubs.len() / 2);
    let mut edges = Vec::with_capacity(stubs.len() / 2);
    for _ in 0..64 {
        if stubs.len() < 2 {
            break;
        }
        stubs.shuffle(rng);
        let mut leftover = Vec::new();
        for pair in stubs.chunks(2) {
            if pair.len() < 2 {
                leftover.push(pair[0]);
                continue;
            }
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                leftover.extend_from_slice(pair);
            } else {
                edges.push((u, v));
            }
        }
        stubs = leftover;
    }
    edges
}
