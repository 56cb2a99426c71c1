//! Small dense matrices: Cholesky and Bunch-Kaufman symmetric indefinite factorizations.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![T::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self { nrows, ncols, data }
    }

    /// Builds a matrix column by column.
    pub fn from_columns(nrows: usize, columns: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(nrows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), nrows);
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.nrows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| crate::scalar::dot(self.row(i), x))
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let src = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn scaled(&self, alpha: T) -> Self {
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|&v| alpha * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-T::one()))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Replaces the matrix by its symmetric part `(A + A^T)/2`.
    pub fn symmetrize(&mut self) {
        assert_eq!(self.nrows, self.ncols);
        let half = T::lit(0.5);
        for i in 0..self.nrows {
            for j in 0..i {
                let v = half * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.ncols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.ncols + j]
    }
}

/// Dense Cholesky factor `A = L L^T`.
#[derive(Debug, Clone)]
pub struct DenseCholesky<T> {
    lower: DenseMatrix<T>,
}

impl<T: Real> DenseCholesky<T> {
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.ncols(),
            });
        }
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) {
                return Err(Error::NotPositiveDefinite {
                    pivot: j,
                    value: d.as_f64(),
                });
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let s = a[(i, j)] - crate::scalar::dot(&l.row(i)[..j], &l.row(j)[..j]);
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { lower: l })
    }

    pub fn lower(&self) -> &DenseMatrix<T> {
        &self.lower
    }

    /// Solves `L y = b` in place.
    pub fn forward(&self, b: &mut [T]) {
        let n = self.lower.nrows();
        for i in 0..n {
            let s = crate::scalar::dot(&self.lower.row(i)[..i], &b[..i]);
            b[i] = (b[i] - s) / self.lower[(i, i)];
        }
    }

    /// Solves `L^T x = y` in place.
    pub fn backward(&self, b: &mut [T]) {
        let n = self.lower.nrows();
        for i in (0..n).rev() {
            b[i] /= self.lower[(i, i)];
            let bi = b[i];
            for k in 0..i {
                b[k] -= self.lower[(i, k)] * bi;
            }
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.forward(&mut x);
        self.backward(&mut x);
        x
    }
}

/// Bunch-Kaufman factorization `P A P^T = L D L^T` of a dense symmetric matrix,
/// with `D` block diagonal (1x1 and 2x2 blocks).
#[derive(Debug, Clone)]
pub struct DenseLdlt<T> {
    n: usize,
    /// Strict lower part holds `L`; diagonal blocks hold `D` (lower triangle).
    factor: DenseMatrix<T>,
    /// `swaps[k] = p` means rows/columns `k` and `p` were exchanged at step `k`.
    swaps: Vec<usize>,
    /// Block size starting at each pivot position (1 or 2); 0 for the second row of a 2x2 block.
    block: Vec<u8>,
}

impl<T: Real> DenseLdlt<T> {
    /// Factors the symmetric matrix `a` (only its lower triangle is read).
    ///
    /// A pivot column whose entries are all below `tol * max|a|` counts as a
    /// rank deficiency; any deficiency is reported as [`Error::Singular`].
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.ncols(),
            });
        }
        let mut f = a.clone();
        let mut scale = T::zero();
        for i in 0..n {
            for j in 0..=i {
                scale = scale.max(f[(i, j)].abs());
            }
        }
        let tol = T::lit(1e3) * T::from_usize_lossy(n.max(1)) * T::epsilon() * scale;
        let alpha = (T::one() + T::lit(17.0).sqrt()) / T::lit(8.0);

        let mut swaps = vec![0usize; n];
        let mut block = vec![1u8; n];
        let mut deficiency = 0usize;
        let mut first_zero = usize::MAX;

        let mut k = 0;
        while k < n {
            let absakk = f[(k, k)].abs();
            let (mut imax, mut colmax) = (k, T::zero());
            for i in k + 1..n {
                let v = f[(i, k)].abs();
                if v > colmax {
                    colmax = v;
                    imax = i;
                }
            }

            if absakk.max(colmax) <= tol {
                deficiency += 1;
                first_zero = first_zero.min(k);
                swaps[k] = k;
                f[(k, k)] = T::zero();
                for i in k + 1..n {
                    f[(i, k)] = T::zero();
                }
                k += 1;
                continue;
            }

            let (kp, kstep) = if absakk >= alpha * colmax {
                (k, 1)
            } else {
                let mut rowmax = T::zero();
                for j in k..imax {
                    rowmax = rowmax.max(f[(imax, j)].abs());
                }
                for i in imax + 1..n {
                    rowmax = rowmax.max(f[(i, imax)].abs());
                }
                if absakk * rowmax >= alpha * colmax * colmax {
                    (k, 1)
                } else if f[(imax, imax)].abs() >= alpha * rowmax {
                    (imax, 1)
                } else {
                    (imax, 2)
                }
            };

            let kk = k + kstep - 1;
            if kp != kk {
                symmetric_swap(&mut f, k, kk, kp);
            }
            swaps[kk] = kp;
            if kstep == 2 {
                swaps[k] = k;
            }

            if kstep == 1 {
                let d = f[(k, k)];
                let w: Vec<T> = (k + 1..n).map(|i| f[(i, k)]).collect();
                for (off, &wi) in w.iter().enumerate() {
                    let i = k + 1 + off;
                    let li = wi / d;
                    let row = f.row_mut(i);
                    for (j, &wj) in (k + 1..=i).zip(&w[..=off]) {
                        row[j] -= li * wj;
                    }
                    row[k] = li;
                }
                block[k] = 1;
            } else {
                let d11 = f[(k, k)];
                let d21 = f[(k + 1, k)];
                let d22 = f[(k + 1, k + 1)];
                let det = d11 * d22 - d21 * d21;
                let (i11, i21, i22) = (d22 / det, -d21 / det, d11 / det);
                let w1: Vec<T> = (k + 2..n).map(|i| f[(i, k)]).collect();
                let w2: Vec<T> = (k + 2..n).map(|i| f[(i, k + 1)]).collect();
                for off in 0..w1.len() {
                    let i = k + 2 + off;
                    let l1 = w1[off] * i11 + w2[off] * i21;
                    let l2 = w1[off] * i21 + w2[off] * i22;
                    let row = f.row_mut(i);
                    for (jo, j) in (k + 2..=i).enumerate() {
                        row[j] -= l1 * w1[jo] + l2 * w2[jo];
                    }
                    row[k] = l1;
                    row[k + 1] = l2;
                }
                block[k] = 2;
                block[k + 1] = 0;
            }
            k += kstep;
        }

        if deficiency > 0 {
            return Err(Error::Singular {
                deficiency,
                index: first_zero,
            });
        }
        Ok(Self {
            n,
            factor: f,
            swaps,
            block,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of (positive, negative) eigenvalues of `D`, hence of the matrix.
    pub fn inertia(&self) -> (usize, usize) {
        let (mut pos, mut neg) = (0, 0);
        let mut k = 0;
        while k < self.n {
            if self.block[k] == 2 {
                let a = self.factor[(k, k)];
                let b = self.factor[(k + 1, k)];
                let c = self.factor[(k + 1, k + 1)];
                let det = a * c - b * b;
                if det < T::zero() {
                    pos += 1;
                    neg += 1;
                } else if a + c > T::zero() {
                    pos += 2;
                } else {
                    neg += 2;
                }
                k += 2;
            } else {
                if self.factor[(k, k)] > T::zero() {
                    pos += 1;
                } else {
                    neg += 1;
                }
                k += 1;
            }
        }
        (pos, neg)
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        let f = &self.factor;
        for k in 0..n {
            b.swap(k, self.swaps[k]);
        }
        // L y = b
        let mut k = 0;
        while k < n {
            let step = if self.block[k] == 2 { 2 } else { 1 };
            for c in k..k + step {
                let bc = b[c];
                for i in k + step..n {
                    b[i] -= f[(i, c)] * bc;
                }
            }
            k += step;
        }
        // D z = y
        let mut k = 0;
        while k < n {
            if self.block[k] == 2 {
                let (a, bb, c) = (f[(k, k)], f[(k + 1, k)], f[(k + 1, k + 1)]);
                let det = a * c - bb * bb;
                let (y1, y2) = (b[k], b[k + 1]);
                b[k] = (c * y1 - bb * y2) / det;
                b[k + 1] = (a * y2 - bb * y1) / det;
                k += 2;
            } else {
                b[k] /= f[(k, k)];
                k += 1;
            }
        }
        // L^T x = z
        let mut k = n;
        while k > 0 {
            let step = if k >= 2 && self.block[k - 2] == 2 { 2 } else { 1 };
            let start = k - step;
            for c in start..k {
                let mut s = T::zero();
                for i in k..n {
                    s += f[(i, c)] * b[i];
                }
                b[c] -= s;
            }
            k = start;
        }
        for k in (0..n).rev() {
            b.swap(k, self.swaps[k]);
        }
    }
}

/// Exchanges indices `p` and `q` (`p < q`) of the symmetric matrix stored in the
/// lower triangle of `f`, for a pivot step starting at column `k <= p`.
fn symmetric_swap<T: Real>(f: &mut DenseMatrix<T>, k: usize, p: usize, q: usize) {
    debug_assert!(k <= p && p < q);
    let n = f.nrows();
    // already-computed columns of L
    for j in 0..k {
        let tmp = f[(p, j)];
        f[(p, j)] = f[(q, j)];
        f[(q, j)] = tmp;
    }
    let tmp = f[(p, p)];
    f[(p, p)] = f[(q, q)];
    f[(q, q)] = tmp;
    for j in k..p {
        let tmp = f[(p, j)];
        f[(p, j)] = f[(q, j)];
        f[(q, j)] = tmp;
    }
    for j in p + 1..q {
        let tmp = f[(j, p)];
        f[(j, p)] = f[(q, j)];
        f[(q, j)] = tmp;
    }
    for i in q + 1..n {
        let tmp = f[(i, p)];
        f[(i, p)] = f[(i, q)];
        f[(i, q)] = tmp;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DenseMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        a
    }

    fn residual(a: &DenseMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
        let ax = a.mul_vec(x);
        ax.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt()
            / b.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = DenseMatrix::<f64>::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        let x = DenseCholesky::new(&a).unwrap().solve(&[1.0, 1.0]);
        assert!((x[0] - 2.0 / 11.0).abs() < 1e-15);
        assert!((x[1] - 3.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(matches!(
            DenseCholesky::new(&a),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
    }

    #[test]
    fn bunch_kaufman_swap_matrix() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let f = DenseLdlt::new(&a).unwrap();
        let mut b = vec![1.0, 2.0];
        f.solve_in_place(&mut b);
        assert_eq!(b, vec![2.0, 1.0]);
        assert_eq!(f.inertia(), (1, 1));
    }

    #[test]
    fn bunch_kaufman_random_indefinite() {
        for (n, seed) in [(1, 1), (5, 2), (17, 3), (60, 4)] {
            let a = random_symmetric(n, seed);
            let f = DenseLdlt::new(&a).unwrap();
            let b: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 0.5).collect();
            let mut x = b.clone();
            f.solve_in_place(&mut x);
            assert!(residual(&a, &x, &b) < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn bunch_kaufman_saddle_point() {
        // [[I, B^T], [B, 0]] with B = [1 1 0; 0 1 1]
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0, 0.0, 0.0],
        ]);
        let f = DenseLdlt::new(&a).unwrap();
        assert_eq!(f.inertia(), (3, 2));
        let b = [1.0, -2.0, 0.5, 0.25, 3.0];
        let mut x = b.to_vec();
        f.solve_in_place(&mut x);
        assert!(residual(&a, &x, &b) < 1e-14);
    }

    #[test]
    fn bunch_kaufman_detects_singularity() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        assert!(matches!(
            DenseLdlt::new(&a),
            Err(Error::Singular { deficiency: 1, .. })
        ));
    }
}
