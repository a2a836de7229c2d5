use std::ops::{Index, IndexMut};

use super::SparseError;

/// Small dense square matrix stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    m: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Wraps column-major data; rejects wrong lengths and non-finite entries.
    pub fn new(m: usize, data: Vec<f64>) -> Result<Self, SparseError> {
        if data.len() != m * m {
            return Err(SparseError::InvalidStructure(format!(
                "dense data has length {}, expected {}",
                data.len(),
                m * m
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(SparseError::NonFinite {
                row: pos % m,
                col: pos / m,
            });
        }
        Ok(DenseMatrix { m, data })
    }

    /// Builds from row-major nested rows, which reads naturally in tests.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, SparseError> {
        let m = rows.len();
        let mut data = vec![0.0; m * m];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(SparseError::InvalidStructure(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                data[j * m + i] = v;
            }
        }
        DenseMatrix::new(m, data)
    }

    pub fn zeros(m: usize) -> Self {
        DenseMatrix {
            m,
            data: vec![0.0; m * m],
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut d = DenseMatrix::zeros(m);
        for i in 0..m {
            d.data[i * m + i] = 1.0;
        }
        d
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut d = DenseMatrix::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            d[(i, i)] = v;
        }
        d
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.m..(j + 1) * self.m]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.m..(j + 1) * self.m]
    }

    pub fn transpose(&self) -> DenseMatrix {
        let m = self.m;
        let mut t = DenseMatrix::zeros(m);
        for j in 0..m {
            for i in 0..m {
                t.data[i * m + j] = self.data[j * m + i];
            }
        }
        t
    }

    /// `self · rhs`, accumulated column by column.
    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.m, rhs.m, "dimension mismatch");
        let m = self.m;
        let mut out = DenseMatrix::zeros(m);
        for j in 0..m {
            let out_col = &mut out.data[j * m..(j + 1) * m];
            for k in 0..m {
                let b = rhs.data[j * m + k];
                if b == 0.0 {
                    continue;
                }
                let a_col = &self.data[k * m..(k + 1) * m];
                for (o, &a) in out_col.iter_mut().zip(a_col) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^p` by repeated squaring; `p = 0` gives the identity.
    pub fn pow(&self, p: u32) -> DenseMatrix {
        let mut result = DenseMatrix::identity(self.m);
        let mut base = self.clone();
        let mut e = p;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { result.matmul(&base) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        let m = self.m;
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for (yi, &a) in y.iter_mut().zip(&self.data[j * m..(j + 1) * m]) {
                *yi += a * xj;
            }
        }
    }

    pub fn mul_vec_transpose(&self, x: &[f64], y: &mut [f64]) {
        let m = self.m;
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = self.data[j * m..(j + 1) * m]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum();
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    /// `self − other`
    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.m, other.m);
        DenseMatrix {
            m: self.m,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `self − I`
    pub fn sub_identity(&self) -> DenseMatrix {
        let mut d = self.clone();
        for i in 0..self.m {
            d[(i, i)] -= 1.0;
        }
        d
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for j in 0..self.m {
            for i in (j + 1)..self.m {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.m + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.m + i]
    }
}
