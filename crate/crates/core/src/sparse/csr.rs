use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::DenseMatrix;

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

/// Accumulates `(row, col, value)` contributions; duplicates are summed in
/// insertion order when the matrix is built.
#[derive(Debug, Clone)]
pub struct TripletBuilder<T> {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Real> TripletBuilder<T> {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, capacity: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::with_capacity(capacity),
        }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    pub fn build(mut self) -> CsrMatrix<T> {
        // Stable sort keeps the accumulation order of duplicates equal to the
        // insertion order, so mirrored contributions sum bit-identically.
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut values: Vec<T> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("entry present") += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.nrows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr,
            indices,
            values,
        }
    }
}

impl<T: Real> CsrMatrix<T> {
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut b = TripletBuilder::with_capacity(nrows, ncols, triplets.len());
        for &(r, c, v) in triplets {
            b.push(r, c, v);
        }
        b.build()
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::identity(diag.len());
        m.values.copy_from_slice(diag);
        m
    }

    pub fn from_dense(dense: &DenseMatrix<T>) -> Self {
        let mut b = TripletBuilder::new(dense.nrows(), dense.ncols());
        for i in 0..dense.nrows() {
            for j in 0..dense.ncols() {
                let v = dense[(i, j)];
                if v != T::zero() {
                    b.push(i, j, v);
                }
            }
        }
        b.build()
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

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Column indices and values of one row.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let range = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[range.clone()], &self.values[range])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`
    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols
                .iter()
                .zip(vals)
                .fold(T::zero(), |acc, (&j, &v)| acc + v * x[j]);
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y = A^T x`
    pub fn mul_transpose_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![T::zero(); self.ncols];
        for (i, &xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * xi;
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut indices = vec![0usize; self.nnz()];
        let mut values = vec![T::zero(); self.nnz()];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let p = next[j];
                indices[p] = i;
                values[p] = v;
                next[j] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            indptr: counts,
            indices,
            values,
        }
    }

    /// Extracts the submatrix with the given rows and columns (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut b = TripletBuilder::new(rows.len(), cols.len());
        for (new_r, &r) in rows.iter().enumerate() {
            let (cs, vs) = self.row(r);
            for (&c, &v) in cs.iter().zip(vs) {
                let nc = col_map[c];
                if nc != usize::MAX {
                    b.push(new_r, nc, v);
                }
            }
        }
        b.build()
    }

    /// `self + alpha * other`; both operands must have equal shape.
    pub fn add_scaled(&self, alpha: T, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut b = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for i in 0..self.nrows {
            let (c1, v1) = self.row(i);
            for (&j, &v) in c1.iter().zip(v1) {
                b.push(i, j, v);
            }
            let (c2, v2) = other.row(i);
            for (&j, &v) in c2.iter().zip(v2) {
                b.push(i, j, alpha * v);
            }
        }
        b.build()
    }

    /// Sparse product `self^T * diag(weights) * self`.
    pub fn transpose_weighted_product(&self, weights: &[T]) -> Self {
        assert_eq!(weights.len(), self.nrows);
        let mut b = TripletBuilder::new(self.ncols, self.ncols);
        for (k, &w) in weights.iter().enumerate() {
            let (cols, vals) = self.row(k);
            for (&i, &vi) in cols.iter().zip(vals) {
                for (&j, &vj) in cols.iter().zip(vals) {
                    b.push(i, j, vi * w * vj);
                }
            }
        }
        b.build()
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Largest `|A_ij - A_ji|`; `None` for rectangular matrices.
    pub fn symmetry_defect(&self) -> Option<T> {
        if self.nrows != self.ncols {
            return None;
        }
        let mut worst = T::zero();
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        Some(worst)
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[(i, j)] = v;
            }
        }
        d
    }

    /// Writes the matrix in Matrix Market coordinate format (1-based indices).
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(out, "{} {} {:.17e}", i + 1, j + 1, v.as_f64())?;
            }
        }
        Ok(())
    }

    /// Reads Matrix Market coordinate data (`general` or `symmetric`, real or integer).
    pub fn read_matrix_market<R: BufRead>(input: R) -> Result<Self> {
        let parse_err = |line: usize, message: &str| Error::Parse {
            line,
            message: message.to_string(),
        };
        let mut lines = input.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let header = header?.to_ascii_lowercase();
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[2] != "coordinate" {
            return Err(parse_err(1, "expected a MatrixMarket coordinate header"));
        }
        if fields[3] != "real" && fields[3] != "integer" {
            return Err(parse_err(1, "only real and integer fields are supported"));
        }
        let symmetric = match fields[4] {
            "general" => false,
            "symmetric" => true,
            _ => return Err(parse_err(1, "unsupported symmetry qualifier")),
        };

        let mut size: Option<(usize, usize, usize)> = None;
        let mut builder: Option<TripletBuilder<T>> = None;
        let mut seen = 0usize;
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('%') {
                continue;
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            match size {
                None => {
                    if parts.len() != 3 {
                        return Err(parse_err(lineno, "expected `rows cols nnz`"));
                    }
                    let nums: std::result::Result<Vec<usize>, _> =
                        parts.iter().map(|p| p.parse::<usize>()).collect();
                    let nums = nums.map_err(|_| parse_err(lineno, "invalid size line"))?;
                    size = Some((nums[0], nums[1], nums[2]));
                    builder = Some(TripletBuilder::with_capacity(nums[0], nums[1], nums[2]));
                }
                Some((nr, nc, _)) => {
                    if parts.len() != 3 {
                        return Err(parse_err(lineno, "expected `row col value`"));
                    }
                    let r: usize = parts[0]
                        .parse()
                        .map_err(|_| parse_err(lineno, "invalid row index"))?;
                    let c: usize = parts[1]
                        .parse()
                        .map_err(|_| parse_err(lineno, "invalid column index"))?;
                    let v: f64 = parts[2]
                        .parse()
                        .map_err(|_| parse_err(lineno, "invalid value"))?;
                    if r == 0 || c == 0 || r > nr || c > nc {
                        return Err(parse_err(lineno, "index out of range"));
                    }
                    let b = builder.as_mut().expect("builder initialised with size");
                    b.push(r - 1, c - 1, T::lit(v));
                    if symmetric && r != c {
                        b.push(c - 1, r - 1, T::lit(v));
                    }
                    seen += 1;
                }
            }
        }
        let (_, _, nnz) = size.ok_or_else(|| parse_err(2, "missing size line"))?;
        if seen != nnz {
            return Err(parse_err(0, "entry count does not match the size line"));
        }
        Ok(builder.expect("builder initialised with size").build())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix<f64> {
        CsrMatrix::from_triplets(
            3,
            3,
            &[
                (0, 0, 4.0),
                (0, 1, 1.0),
                (1, 0, 1.0),
                (1, 1, 3.0),
                (2, 2, 2.0),
                (1, 1, 0.5),
            ],
        )
    }

    #[test]
    fn duplicates_are_summed() {
        let a = sample();
        assert_eq!(a.nnz(), 5);
        assert_eq!(a.get(1, 1), 3.5);
        assert_eq!(a.get(2, 0), 0.0);
    }

    #[test]
    fn products_and_transpose() {
        let a = CsrMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0)]);
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 3.0]);
        assert_eq!(a.mul_transpose_vec(&[1.0, 2.0]), vec![1.0, 6.0, 2.0]);
        let t = a.transpose();
        assert_eq!(t.mul_vec(&[1.0, 2.0]), vec![1.0, 6.0, 2.0]);
        assert_eq!(t.transpose(), a);
    }

    #[test]
    fn weighted_product_matches_dense() {
        let b = CsrMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0), (1, 2, -1.0)]);
        let p = b.transpose_weighted_product(&[2.0, 0.5]);
        let x = [0.3f64, -1.2, 0.7];
        let bx = b.mul_vec(&x);
        let expected = b.mul_transpose_vec(&[2.0 * bx[0], 0.5 * bx[1]]);
        for (u, v) in p.mul_vec(&x).iter().zip(&expected) {
            assert!((u - v).abs() < 1e-15);
        }
        assert_eq!(p.symmetry_defect(), Some(0.0));
    }

    #[test]
    fn select_submatrix() {
        let a = sample();
        let s = a.select(&[1, 2], &[0, 1]);
        assert_eq!(s.to_dense().as_slice(), &[1.0, 3.5, 0.0, 0.0]);
    }

    #[test]
    fn matrix_market_roundtrip() {
        let a = sample();
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let b = CsrMatrix::<f64>::read_matrix_market(buf.as_slice()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn matrix_market_symmetric_input() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 4\n2 1 1\n";
        let a = CsrMatrix::<f64>::read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.get(1, 0), 1.0);
    }

    #[test]
    fn matrix_market_rejects_bad_index() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 4\n";
        assert!(matches!(
            CsrMatrix::<f64>::read_matrix_market(text.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
