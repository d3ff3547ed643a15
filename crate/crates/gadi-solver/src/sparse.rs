//! Compressed sparse row matrices and the kernels the solvers are built on:
//! tridiagonal and Kronecker-product assembly, matrix-vector and
//! matrix-matrix products, and the symmetric/antisymmetric split.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Real sparse matrix in CSR form.
///
/// Row offsets are nondecreasing with `row_ptr.len() == nrows + 1`; column
/// indices are strictly increasing within each row. Explicitly stored zeros
/// are allowed, duplicate (row, col) pairs are not.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Assembles from (row, col, value) triplets. Duplicate coordinates are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        if nrows == 0 || ncols == 0 {
            return Err(Error::InvalidDimension(format!(
                "matrix dimensions must be positive, got {}x{}",
                nrows, ncols
            )));
        }
        for &(r, c, _) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::DimensionMismatch(format!(
                    "triplet ({}, {}) outside {}x{}",
                    r, c, nrows, ncols
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(sorted.len());
        for (r, c, v) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }

        let mut row_ptr = vec![0usize; nrows + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx: merged.iter().map(|t| t.1).collect(),
            values: merged.iter().map(|t| t.2).collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// n-by-n matrix with constant sub-, main and super-diagonals.
    pub fn tridiag(n: usize, lower: f64, diag: f64, upper: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(
                "tridiagonal matrix needs n >= 1".into(),
            ));
        }
        let mut triplets = Vec::with_capacity(3 * n);
        for i in 0..n {
            if i > 0 {
                triplets.push((i, i - 1, lower));
            }
            triplets.push((i, i, diag));
            if i + 1 < n {
                triplets.push((i, i + 1, upper));
            }
        }
        Self::from_triplets(n, n, &triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Stored value at (i, j), zero if the coordinate is not in the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&c, &v)| (i, c, v))
        })
    }

    /// y = A x
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch(format!(
                "spmv: matrix is {}x{}, vector has length {}",
                self.nrows,
                self.ncols,
                x.len()
            )));
        }
        let mut y = vec![0.0; self.nrows];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[i] = acc;
        }
        Ok(y)
    }

    /// y = A' x without materializing the transpose.
    pub fn spmv_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.nrows {
            return Err(Error::DimensionMismatch(format!(
                "spmv_transpose: matrix is {}x{}, vector has length {}",
                self.nrows,
                self.ncols,
                x.len()
            )));
        }
        let mut y = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                y[c] += v * x[i];
            }
        }
        Ok(y)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let nnz = self.nnz();
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut col_idx = vec![0usize; nnz];
        let mut values = vec![0.0; nnz];
        let mut next = counts;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let slot = next[c];
                col_idx[slot] = i;
                values[slot] = v;
                next[c] += 1;
            }
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Kronecker product with block ordering (i_a * nrows_b + i_b).
    pub fn kron(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        let nrows = self
            .nrows
            .checked_mul(other.nrows)
            .ok_or_else(|| Error::Capacity("kron row count".into()))?;
        let ncols = self
            .ncols
            .checked_mul(other.ncols)
            .ok_or_else(|| Error::Capacity("kron column count".into()))?;
        let nnz = self
            .nnz()
            .checked_mul(other.nnz())
            .ok_or_else(|| Error::Capacity("kron nonzero count".into()))?;

        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for ia in 0..self.nrows {
            let (cols_a, vals_a) = self.row(ia);
            for ib in 0..other.nrows {
                let (cols_b, vals_b) = other.row(ib);
                for (&ca, &va) in cols_a.iter().zip(vals_a) {
                    for (&cb, &vb) in cols_b.iter().zip(vals_b) {
                        col_idx.push(ca * other.ncols + cb);
                        values.push(va * vb);
                    }
                }
                row_ptr.push(col_idx.len());
            }
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Entrywise linear combination a*self + b*other on the union pattern.
    /// Entries where values cancel stay stored.
    pub fn linear_combination(&self, a: f64, b: f64, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..self.nrows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let next_a = ca.get(p).copied().unwrap_or(usize::MAX);
                let next_b = cb.get(q).copied().unwrap_or(usize::MAX);
                if next_a < next_b {
                    col_idx.push(next_a);
                    values.push(a * va[p]);
                    p += 1;
                } else if next_b < next_a {
                    col_idx.push(next_b);
                    values.push(b * vb[q]);
                    q += 1;
                } else {
                    col_idx.push(next_a);
                    values.push(a * va[p] + b * vb[q]);
                    p += 1;
                    q += 1;
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.linear_combination(1.0, 1.0, other)
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.linear_combination(1.0, -1.0, other)
    }

    pub fn scale(&self, alpha: f64) -> SparseMatrix {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= alpha;
        }
        out
    }

    /// Splits a square matrix into its symmetric part H = (A + A')/2 and
    /// antisymmetric part S = (A - A')/2, both on the symmetrized pattern.
    pub fn hs_split(&self) -> Result<(SparseMatrix, SparseMatrix)> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        let at = self.transpose();
        let h = self.linear_combination(0.5, 0.5, &at)?;
        let s = self.linear_combination(0.5, -0.5, &at)?;
        Ok((h, s))
    }

    /// A * X for a dense X, column by column.
    pub fn mul_dense(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.nrows() != self.ncols {
            return Err(Error::DimensionMismatch(format!(
                "mul_dense: {}x{} times {}x{}",
                self.nrows,
                self.ncols,
                x.nrows(),
                x.ncols()
            )));
        }
        let mut out = DenseMatrix::zeros(self.nrows, x.ncols());
        for j in 0..x.ncols() {
            let col = self.spmv(x.col(j))?;
            out.col_mut(j).copy_from_slice(&col);
        }
        Ok(out)
    }

    /// X * A for a dense X; result column j accumulates A's rows scattered
    /// through X's columns.
    pub fn rmul_dense(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.ncols() != self.nrows {
            return Err(Error::DimensionMismatch(format!(
                "rmul_dense: {}x{} times {}x{}",
                x.nrows(),
                x.ncols(),
                self.nrows,
                self.ncols
            )));
        }
        let mut out = DenseMatrix::zeros(x.nrows(), self.ncols);
        for k in 0..self.nrows {
            let (cols, vals) = self.row(k);
            let xk = x.col(k);
            for (&j, &v) in cols.iter().zip(vals) {
                let out_col = out.col_mut(j);
                for (o, xi) in out_col.iter_mut().zip(xk) {
                    *o += v * xi;
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m.set(i, j, v);
        }
        m
    }

    /// Largest absolute stored value, 0 for an empty pattern.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Induced one-norm: the largest absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut col_sums = vec![0.0f64; self.ncols];
        for (_, j, v) in self.triplets() {
            col_sums[j] += v.abs();
        }
        col_sums.into_iter().fold(0.0, f64::max)
    }
}
