//! Dense symmetric eigenvalue problems.
//!
//! Householder tridiagonalization followed by the implicit QL iteration; the
//! same QL kernel serves the Lanczos tridiagonal matrices produced by PCG.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::{DenseCholesky, DenseMatrix};

/// Eigenvalues in ascending order, with eigenvectors stored as columns when requested.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Option<DenseMatrix<T>>,
}

/// Eigen-decomposition of a dense symmetric matrix.
pub fn symmetric_eigen<T: Real>(a: &DenseMatrix<T>, want_vectors: bool) -> Result<SymmetricEigen<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    if n == 0 {
        return Err(Error::EmptyInput("matrix"));
    }
    let mut v = a.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    householder_tridiagonalize(&mut v, &mut d, &mut e);
    // e[i] couples i-1 and i; shift to the convention e[i] couples i and i+1.
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    implicit_ql(&mut d, &mut e, if want_vectors { Some(&mut v) } else { None })?;
    Ok(sort_pairs(d, if want_vectors { Some(v) } else { None }))
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `offdiag` (`offdiag.len() == diag.len() - 1`), ascending.
pub fn tridiagonal_eigs<T: Real>(diag: &[T], offdiag: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::EmptyInput("tridiagonal diagonal"));
    }
    if offdiag.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: offdiag.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(T::zero());
    implicit_ql(&mut d, &mut e, None)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

/// Generalized eigenpairs of `K x = theta M x` with `K` symmetric and `M` SPD,
/// ascending; eigenvectors are `M`-orthonormal columns.
pub fn dense_symmetric_generalized_eigs<T: Real>(
    k: &DenseMatrix<T>,
    m: &DenseMatrix<T>,
    want_vectors: bool,
) -> Result<SymmetricEigen<T>> {
    let n = k.nrows();
    if m.nrows() != n || m.ncols() != n || k.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.nrows(),
        });
    }
    let chol = DenseCholesky::new(m)?;
    // C = L^{-1} K L^{-T}, built one column at a time.
    let mut tmp = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut col = k.column(j);
        chol.forward(&mut col);
        for i in 0..n {
            tmp[(j, i)] = col[i]; // tmp = (L^{-1} K)^T = K L^{-T}
        }
    }
    let mut c = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut col = tmp.column(j);
        chol.forward(&mut col);
        for i in 0..n {
            c[(i, j)] = col[i];
        }
    }
    c.symmetrize();
    let mut eig = symmetric_eigen(&c, want_vectors)?;
    if let Some(y) = eig.vectors.as_mut() {
        for j in 0..n {
            let mut col = y.column(j);
            chol.backward(&mut col);
            for i in 0..n {
                y[(i, j)] = col[i];
            }
        }
    }
    Ok(eig)
}

fn sort_pairs<T: Real>(values: Vec<T>, vectors: Option<DenseMatrix<T>>) -> SymmetricEigen<T> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite eigenvalues"));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = vectors.map(|v| {
        let n = v.nrows();
        let mut out = DenseMatrix::zeros(n, order.len());
        for (new, &old) in order.iter().enumerate() {
            for i in 0..n {
                out[(i, new)] = v[(i, old)];
            }
        }
        out
    });
    SymmetricEigen {
        values: sorted_values,
        vectors: sorted_vectors,
    }
}

/// Reduces the symmetric matrix in `v` to tridiagonal form (diagonal `d`,
/// sub-diagonal `e[1..]`), leaving the accumulated orthogonal transform in `v`.
fn householder_tridiagonalize<T: Real>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for &dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
                v[(j, i)] = T::zero();
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in &mut e[..i] {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[(k, j)] -= upd;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    let upd = g * d[k];
                    v[(k, j)] -= upd;
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = T::zero();
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

/// Implicit QL iteration on a symmetric tridiagonal matrix (`e[i]` couples `i`
/// and `i+1`, `e[n-1] = 0`). Eigenvalues overwrite `d`; rotations are applied
/// to the columns of `v` when given.
fn implicit_ql<T: Real>(d: &mut [T], e: &mut [T], mut v: Option<&mut DenseMatrix<T>>) -> Result<()> {
    let n = d.len();
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let max_sweeps = 60 * n.max(1);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_sweeps {
                    return Err(Error::EigenNoConvergence);
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (T::lit(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..v.nrows() {
                            let vh = v[(k, i + 1)];
                            let vi = v[(k, i)];
                            v[(k, i + 1)] = s * vi + c * vh;
                            v[(k, i)] = c * vi - s * vh;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}
