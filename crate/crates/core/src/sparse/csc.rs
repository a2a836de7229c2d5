use super::{DenseMatrix, SparseError};

/// Square sparse matrix in compressed sparse column form.
///
/// ```text
///  col_ptr.len() = n + 1,  col_ptr[0] = 0,  col_ptr[n] = nnz
///  row_ind[col_ptr[j]..col_ptr[j+1]]  strictly increasing rows of column j
///  val[col_ptr[j]..col_ptr[j+1]]      the matching values
/// ```
///
/// The `symmetric` flag is derived from the data at construction and is only
/// set when every stored `(i, j, v)` has a stored mirror `(j, i, v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CscMatrix {
    n: usize,
    col_ptr: Vec<usize>,
    row_ind: Vec<usize>,
    val: Vec<f64>,
    symmetric: bool,
}

impl CscMatrix {
    /// Builds a matrix from raw CSC arrays, validating the structure.
    pub fn new(
        n: usize,
        col_ptr: Vec<usize>,
        row_ind: Vec<usize>,
        val: Vec<f64>,
    ) -> Result<Self, SparseError> {
        validate_parts(n, &col_ptr, &row_ind, &val)?;
        let mut m = CscMatrix {
            n,
            col_ptr,
            row_ind,
            val,
            symmetric: false,
        };
        m.symmetric = m.check_symmetric();
        Ok(m)
    }

    /// Builds a canonical CSC matrix from `(row, col, value)` triplets.
    ///
    /// Duplicate coordinates are rejected rather than summed.
    pub fn from_triplets(entries: &[(usize, usize, f64)], n: usize) -> Result<Self, SparseError> {
        for &(row, col, _) in entries {
            if row >= n || col >= n {
                return Err(SparseError::IndexOutOfRange { row, col, n });
            }
        }
        let mut counts = vec![0usize; n + 1];
        for &(_, col, _) in entries {
            counts[col + 1] += 1;
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut row_ind = vec![0usize; entries.len()];
        let mut val = vec![0.0; entries.len()];
        for &(row, col, v) in entries {
            let k = next[col];
            row_ind[k] = row;
            val[k] = v;
            next[col] += 1;
        }
        for j in 0..n {
            let (start, end) = (col_ptr[j], col_ptr[j + 1]);
            let mut pairs: Vec<(usize, f64)> = row_ind[start..end]
                .iter()
                .copied()
                .zip(val[start..end].iter().copied())
                .collect();
            pairs.sort_by_key(|&(r, _)| r);
            for w in pairs.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(SparseError::DuplicateEntry { row: w[0].0, col: j });
                }
            }
            for (k, (r, v)) in pairs.into_iter().enumerate() {
                row_ind[start + k] = r;
                val[start + k] = v;
            }
        }
        CscMatrix::new(n, col_ptr, row_ind, val)
    }

    pub fn identity(n: usize) -> Self {
        CscMatrix {
            n,
            col_ptr: (0..=n).collect(),
            row_ind: (0..n).collect(),
            val: vec![1.0; n],
            symmetric: true,
        }
    }

    pub fn zeros(n: usize) -> Self {
        CscMatrix {
            n,
            col_ptr: vec![0; n + 1],
            row_ind: Vec::new(),
            val: Vec::new(),
            symmetric: true,
        }
    }

    /// Diagonal matrix; zero diagonal entries are not stored.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let entries: Vec<_> = diag
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, i, v))
            .collect();
        CscMatrix::from_triplets(&entries, diag.len()).expect("diagonal triplets are valid")
    }

    /// Sparse copy of a dense matrix, storing exactly the entries that are not `0.0`.
    pub fn from_dense(d: &DenseMatrix) -> Self {
        let n = d.dim();
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_ind = Vec::new();
        let mut val = Vec::new();
        col_ptr.push(0);
        for j in 0..n {
            for (i, &v) in d.column(j).iter().enumerate() {
                if v != 0.0 {
                    row_ind.push(i);
                    val.push(v);
                }
            }
            col_ptr.push(row_ind.len());
        }
        CscMatrix::new(n, col_ptr, row_ind, val).expect("dense scan yields canonical CSC")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_ind(&self) -> &[usize] {
        &self.row_ind
    }

    pub fn values(&self) -> &[f64] {
        &self.val
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Fraction of stored entries, `nnz / n²`.
    pub fn density(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.nnz() as f64 / (self.n as f64 * self.n as f64)
    }

    /// Row indices and values of column `j`.
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.row_ind[s..e], &self.val[s..e])
    }

    pub fn column_nnz(&self, j: usize) -> usize {
        self.col_ptr[j + 1] - self.col_ptr[j]
    }

    /// Stored value at `(i, j)`, or `None` if the position is not in the pattern.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (rows, vals) = self.column(j);
        rows.binary_search(&i).ok().map(|k| vals[k])
    }

    /// Same pattern, new values. Panics if the length does not match `nnz`.
    pub fn with_values(&self, val: Vec<f64>) -> Self {
        assert_eq!(val.len(), self.nnz(), "value array must match the pattern");
        let mut m = CscMatrix {
            n: self.n,
            col_ptr: self.col_ptr.clone(),
            row_ind: self.row_ind.clone(),
            val,
            symmetric: false,
        };
        m.symmetric = m.check_symmetric();
        m
    }

    /// Re-checks the structural invariants.
    pub fn validate(&self) -> Result<(), SparseError> {
        validate_parts(self.n, &self.col_ptr, &self.row_ind, &self.val)?;
        if self.symmetric && !self.check_symmetric() {
            return Err(SparseError::InvalidStructure(
                "symmetric flag set on an asymmetric matrix".into(),
            ));
        }
        Ok(())
    }

    /// True when the pattern and values are exactly mirrored across the diagonal.
    pub fn check_symmetric(&self) -> bool {
        for j in 0..self.n {
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                if i == j {
                    continue;
                }
                match self.get(j, i) {
                    Some(w) if w == v => {}
                    _ => return false,
                }
            }
        }
        true
    }

    pub fn same_pattern(&self, other: &CscMatrix) -> bool {
        self.n == other.n && self.col_ptr == other.col_ptr && self.row_ind == other.row_ind
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.n {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                y[i] += v * xj;
            }
        }
    }

    /// `y = Aᵀ x`
    pub fn mul_vec_transpose(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (j, yj) in y.iter_mut().enumerate() {
            let (rows, vals) = self.column(j);
            *yj = rows.iter().zip(vals).map(|(&i, &v)| v * x[i]).sum();
        }
    }

    pub fn transpose(&self) -> CscMatrix {
        let n = self.n;
        let mut counts = vec![0usize; n + 1];
        for &i in &self.row_ind {
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut row_ind = vec![0usize; self.nnz()];
        let mut val = vec![0.0; self.nnz()];
        for j in 0..n {
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                let k = next[i];
                row_ind[k] = j;
                val[k] = v;
                next[i] += 1;
            }
        }
        CscMatrix {
            n,
            col_ptr,
            row_ind,
            val,
            symmetric: self.symmetric,
        }
    }

    /// Sparse product `self · rhs` (Gustavson, column by column).
    ///
    /// Entries that cancel to exactly zero are dropped.
    pub fn matmul(&self, rhs: &CscMatrix) -> Result<CscMatrix, SparseError> {
        if self.n != rhs.n {
            return Err(SparseError::SizeMismatch {
                left: self.n,
                right: rhs.n,
            });
        }
        let n = self.n;
        let mut acc = vec![0.0; n];
        let mut marker = vec![usize::MAX; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_ind = Vec::new();
        let mut val = Vec::new();
        col_ptr.push(0);
        for j in 0..n {
            touched.clear();
            let (brows, bvals) = rhs.column(j);
            for (&k, &bkj) in brows.iter().zip(bvals) {
                let (arows, avals) = self.column(k);
                for (&i, &aik) in arows.iter().zip(avals) {
                    if marker[i] != j {
                        marker[i] = j;
                        acc[i] = 0.0;
                        touched.push(i);
                    }
                    acc[i] += aik * bkj;
                }
            }
            touched.sort_unstable();
            for &i in &touched {
                if acc[i] != 0.0 {
                    row_ind.push(i);
                    val.push(acc[i]);
                }
            }
            col_ptr.push(row_ind.len());
        }
        CscMatrix::new(n, col_ptr, row_ind, val)
    }

    /// Symmetric permutation `P·A·Pᵀ`, where row/column `i` moves to `perm[i]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> CscMatrix {
        assert_eq!(perm.len(), self.n);
        let entries: Vec<_> = (0..self.n)
            .flat_map(|j| {
                let (rows, vals) = self.column(j);
                rows.iter()
                    .zip(vals)
                    .map(move |(&i, &v)| (perm[i], perm[j], v))
                    .collect::<Vec<_>>()
            })
            .collect();
        CscMatrix::from_triplets(&entries, self.n).expect("permutation of a valid matrix")
    }

    /// `(X + Xᵀ)/2` restricted to the pattern of `self`.
    ///
    /// Requires a structurally symmetric pattern so every mirror exists.
    pub fn symmetrize(&self) -> Result<CscMatrix, SparseError> {
        let mut val = Vec::with_capacity(self.nnz());
        for j in 0..self.n {
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                let mirror = self.get(j, i).ok_or_else(|| {
                    SparseError::InvalidStructure(format!(
                        "pattern is not structurally symmetric at ({i}, {j})"
                    ))
                })?;
                val.push(0.5 * (v + mirror));
            }
        }
        Ok(self.with_values(val))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.get(j, j).unwrap_or(0.0)).collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n);
        for j in 0..self.n {
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                d[(i, j)] = v;
            }
        }
        d
    }
}

fn validate_parts(
    n: usize,
    col_ptr: &[usize],
    row_ind: &[usize],
    val: &[f64],
) -> Result<(), SparseError> {
    let bad = |msg: String| Err(SparseError::InvalidStructure(msg));
    if col_ptr.len() != n + 1 {
        return bad(format!("col_ptr has length {}, expected {}", col_ptr.len(), n + 1));
    }
    if col_ptr[0] != 0 {
        return bad("col_ptr[0] must be 0".into());
    }
    if row_ind.len() != val.len() {
        return bad("row_ind and val lengths differ".into());
    }
    if col_ptr[n] != row_ind.len() {
        return bad(format!("col_ptr[n] = {} but nnz = {}", col_ptr[n], row_ind.len()));
    }
    for j in 0..n {
        let (s, e) = (col_ptr[j], col_ptr[j + 1]);
        if s > e {
            return bad(format!("col_ptr decreases at column {j}"));
        }
        let rows = &row_ind[s..e];
        for (k, &i) in rows.iter().enumerate() {
            if i >= n {
                return Err(SparseError::IndexOutOfRange { row: i, col: j, n });
            }
            if k > 0 && rows[k - 1] >= i {
                return bad(format!("row indices of column {j} are not strictly increasing"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_to_canonical_layout() {
        let a = CscMatrix::from_triplets(&[(0, 0, 2.0), (1, 0, 1.0), (0, 1, 1.0), (1, 1, 2.0)], 2)
            .unwrap();
        assert_eq!(a.col_ptr(), &[0, 2, 4]);
        assert_eq!(a.row_ind(), &[0, 1, 0, 1]);
        assert_eq!(a.values(), &[2.0, 1.0, 1.0, 2.0]);
        assert!(a.is_symmetric());
    }

    #[test]
    fn unsorted_triplets_are_sorted_per_column() {
        let a = CscMatrix::from_triplets(&[(2, 0, 3.0), (0, 0, 1.0), (1, 1, 5.0)], 3).unwrap();
        assert_eq!(a.row_ind(), &[0, 2, 1]);
        assert_eq!(a.values(), &[1.0, 3.0, 5.0]);
        assert!(!a.is_symmetric());
    }

    #[test]
    fn empty_triplets_give_symmetric_zero_matrix() {
        let a = CscMatrix::from_triplets(&[], 3).unwrap();
        assert_eq!(a.col_ptr(), &[0, 0, 0, 0]);
        assert!(a.is_symmetric());
        a.validate().unwrap();
    }

    #[test]
    fn duplicate_and_out_of_range_are_rejected() {
        let err = CscMatrix::from_triplets(&[(0, 0, 1.0), (0, 0, 2.0)], 2).unwrap_err();
        assert!(matches!(err, SparseError::DuplicateEntry { row: 0, col: 0 }));
        let err = CscMatrix::from_triplets(&[(2, 0, 1.0)], 2).unwrap_err();
        assert!(matches!(err, SparseError::IndexOutOfRange { row: 2, col: 0, n: 2 }));
    }

    #[test]
    fn raw_constructor_checks_invariants() {
        assert!(CscMatrix::new(2, vec![0, 1], vec![0], vec![1.0]).is_err());
        assert!(CscMatrix::new(2, vec![1, 1, 1], vec![0], vec![1.0]).is_err());
        assert!(CscMatrix::new(2, vec![0, 2, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(CscMatrix::new(2, vec![0, 1, 1], vec![5], vec![1.0]).is_err());
        assert!(CscMatrix::new(2, vec![0, 1, 2], vec![0, 1], vec![1.0, 1.0]).is_ok());
    }

    #[test]
    fn value_asymmetry_clears_flag() {
        let a = CscMatrix::from_triplets(&[(0, 1, 1.0), (1, 0, 1.5)], 2).unwrap();
        assert!(!a.is_symmetric());
    }

    #[test]
    fn matvec_and_transpose() {
        let a = CscMatrix::from_triplets(&[(0, 0, 1.0), (0, 1, 2.0), (1, 1, 3.0)], 2).unwrap();
        let mut y = vec![0.0; 2];
        a.mul_vec(&[1.0, 1.0], &mut y);
        assert_eq!(y, vec![3.0, 3.0]);
        a.mul_vec_transpose(&[1.0, 1.0], &mut y);
        assert_eq!(y, vec![1.0, 5.0]);
        let t = a.transpose();
        assert_eq!(t.get(1, 0), Some(2.0));
        assert_eq!(t.get(0, 1), None);
    }

    #[test]
    fn sparse_product_matches_dense() {
        let a = CscMatrix::from_triplets(
            &[(0, 0, 1.0), (1, 0, 2.0), (0, 1, -1.0), (2, 2, 4.0), (0, 2, 0.5)],
            3,
        )
        .unwrap();
        let b = a.transpose();
        let c = a.matmul(&b).unwrap().to_dense();
        let expect = a.to_dense().matmul(&b.to_dense());
        for i in 0..3 {
            for j in 0..3 {
                assert!((c[(i, j)] - expect[(i, j)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn symmetrize_averages_mirrors() {
        let a = CscMatrix::from_triplets(&[(0, 0, 1.0), (1, 0, 2.0), (0, 1, 4.0)], 2).unwrap();
        let s = a.symmetrize().unwrap();
        assert!(s.is_symmetric());
        assert_eq!(s.get(1, 0), Some(3.0));
        assert!(a.same_pattern(&s));
    }
}
