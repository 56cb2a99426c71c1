//! Sparse `L D L^T` factorization.
//!
//! Vertices with a nonzero diagonal (the "leading" block) are ordered by nested
//! dissection and factored with the up-looking algorithm using static 1x1
//! pivots. Vertices with a zero diagonal (Lagrange multipliers in saddle-point
//! systems) are ordered last; their Schur complement is assembled densely and
//! factored with Bunch-Kaufman pivoting. For an SPD matrix the trailing block is
//! empty and the factorization is a plain sparse Cholesky-type `L D L^T`.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::ordering::{nested_dissection, Graph};
use crate::sparse::{CsrMatrix, DenseLdlt, DenseMatrix, LinearOperator};

const NONE: usize = usize::MAX;

/// Matrices up to this size fall back to a fully dense factorization when a
/// static pivot of the leading block breaks down.
const DENSE_FALLBACK_LIMIT: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Spd,
    Indefinite,
}

/// Direct factorization of a symmetric sparse matrix.
#[derive(Debug, Clone)]
pub struct Factorization<T> {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    n_lead: usize,
    // L11 in compressed columns (strictly lower, unit diagonal implied)
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<T>,
    d: Vec<T>,
    // L21 rows: one sparse row per trailing vertex, over leading columns
    t_ptr: Vec<usize>,
    t_idx: Vec<usize>,
    t_val: Vec<T>,
    trailing: Option<DenseLdlt<T>>,
}

/// Cholesky-type factorization of an SPD matrix.
///
/// Fails with [`Error::NotPositiveDefinite`] naming the offending pivot (as an
/// index of the original matrix) when a pivot is not positive.
pub fn factor_spd<T: Real>(k: &CsrMatrix<T>) -> Result<Factorization<T>> {
    Factorization::new(k, Kind::Spd)
}

/// `L D L^T` factorization of a symmetric, possibly indefinite matrix such as a
/// saddle-point system. Singular matrices fail with [`Error::Singular`].
pub fn factor_symmetric_indefinite<T: Real>(k: &CsrMatrix<T>) -> Result<Factorization<T>> {
    Factorization::new(k, Kind::Indefinite)
}

impl<T: Real> Factorization<T> {
    fn new(k: &CsrMatrix<T>, kind: Kind) -> Result<Self> {
        let n = k.nrows();
        if k.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: k.ncols(),
            });
        }
        let diag = k.diagonal();
        let lead: Vec<usize> = match kind {
            Kind::Spd => (0..n).collect(),
            Kind::Indefinite => (0..n).filter(|&i| diag[i] != T::zero()).collect(),
        };
        let trail: Vec<usize> = match kind {
            Kind::Spd => Vec::new(),
            Kind::Indefinite => (0..n).filter(|&i| diag[i] == T::zero()).collect(),
        };

        let mut local = vec![NONE; n];
        for (p, &v) in lead.iter().enumerate() {
            local[v] = p;
        }
        let graph = Graph::from_neighbours(lead.len(), |p, out| {
            let (cols, _) = k.row(lead[p]);
            out.extend(cols.iter().filter_map(|&c| (local[c] != NONE).then_some(local[c])));
        });
        let mut perm: Vec<usize> = nested_dissection(&graph).into_iter().map(|p| lead[p]).collect();
        perm.extend(trail.iter().copied());

        match Self::numeric(k, perm, lead.len(), kind) {
            Err(Error::NotPositiveDefinite { pivot, .. }) if kind == Kind::Indefinite => {
                if n <= DENSE_FALLBACK_LIMIT {
                    // static pivoting broke down; let Bunch-Kaufman handle everything
                    Self::numeric(k, (0..n).collect(), 0, kind)
                } else {
                    Err(Error::Singular {
                        deficiency: 1,
                        index: pivot,
                    })
                }
            }
            other => other,
        }
    }

    fn numeric(k: &CsrMatrix<T>, perm: Vec<usize>, n_lead: usize, kind: Kind) -> Result<Self> {
        let n = k.nrows();
        let mut pinv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            pinv[old] = new;
        }

        // Elimination tree and column counts of the leading block.
        let mut parent = vec![NONE; n_lead];
        let mut flag = vec![NONE; n_lead];
        let mut counts = vec![0usize; n_lead];
        for kk in 0..n_lead {
            flag[kk] = kk;
            let (cols, _) = k.row(perm[kk]);
            for &c in cols {
                let mut i = pinv[c];
                if i >= kk {
                    continue;
                }
                while flag[i] != kk {
                    if parent[i] == NONE {
                        parent[i] = kk;
                    }
                    counts[i] += 1;
                    flag[i] = kk;
                    i = parent[i];
                }
            }
        }
        let mut l_ptr = vec![0usize; n_lead + 1];
        for j in 0..n_lead {
            l_ptr[j + 1] = l_ptr[j] + counts[j];
        }
        let nnz = l_ptr[n_lead];
        let mut l_idx = vec![0usize; nnz];
        let mut l_val = vec![T::zero(); nnz];
        let mut l_len = vec![0usize; n_lead];
        let mut d = vec![T::zero(); n_lead];

        let max_diag = (0..n_lead)
            .map(|i| k.get(perm[i], perm[i]).abs())
            .fold(T::zero(), T::max);
        let pivot_tol = T::from_usize_lossy(n.max(1)) * T::epsilon() * max_diag;

        let mut y = vec![T::zero(); n_lead];
        let mut pattern = vec![0usize; n_lead];
        flag.fill(NONE);
        for kk in 0..n_lead {
            let mut top = n_lead;
            flag[kk] = kk;
            let mut dk = T::zero();
            let (cols, vals) = k.row(perm[kk]);
            for (&c, &v) in cols.iter().zip(vals) {
                let mut i = pinv[c];
                if i > kk {
                    continue;
                }
                if i == kk {
                    dk += v;
                    continue;
                }
                y[i] += v;
                let mut len = 0;
                while flag[i] != kk {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = kk;
                    i = parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            for &i in &pattern[top..n_lead] {
                let yi = y[i];
                y[i] = T::zero();
                let start = l_ptr[i];
                for p in start..start + l_len[i] {
                    y[l_idx[p]] -= l_val[p] * yi;
                }
                let lki = yi / d[i];
                dk -= lki * yi;
                let p = start + l_len[i];
                l_idx[p] = kk;
                l_val[p] = lki;
                l_len[i] += 1;
            }
            let breakdown = match kind {
                Kind::Spd => !(dk > pivot_tol),
                Kind::Indefinite => !(dk.abs() > pivot_tol),
            };
            if breakdown {
                return Err(Error::NotPositiveDefinite {
                    pivot: perm[kk],
                    value: dk.as_f64(),
                });
            }
            d[kk] = dk;
        }

        // Rows of L21 for the trailing vertices.
        let n_trail = n - n_lead;
        let mut t_ptr = vec![0usize; n_trail + 1];
        let mut t_idx = Vec::new();
        let mut t_val = Vec::new();
        let mut mark = vec![NONE; n_lead];
        let mut k22 = DenseMatrix::zeros(n_trail, n_trail);
        for t in 0..n_trail {
            let row = n_lead + t;
            let (cols, vals) = k.row(perm[row]);
            let mut top = n_lead;
            for (&c, &v) in cols.iter().zip(vals) {
                let mut i = pinv[c];
                if i >= n_lead {
                    k22[(t, i - n_lead)] += v;
                    continue;
                }
                y[i] += v;
                let mut len = 0;
                while i != NONE && mark[i] != t {
                    pattern[len] = i;
                    len += 1;
                    mark[i] = t;
                    i = parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            for &i in &pattern[top..n_lead] {
                let yi = y[i];
                y[i] = T::zero();
                let start = l_ptr[i];
                for p in start..start + l_len[i] {
                    y[l_idx[p]] -= l_val[p] * yi;
                }
                if yi != T::zero() {
                    t_idx.push(i);
                    t_val.push(yi / d[i]);
                }
            }
            t_ptr[t + 1] = t_idx.len();
        }

        let trailing = if n_trail > 0 {
            // S = K22 - L21 D1 L21^T, accumulated column by column of L21.
            let mut col_ptr = vec![0usize; n_lead + 1];
            for &i in &t_idx {
                col_ptr[i + 1] += 1;
            }
            for i in 0..n_lead {
                col_ptr[i + 1] += col_ptr[i];
            }
            let mut next = col_ptr.clone();
            let mut col_rows = vec![0usize; t_idx.len()];
            let mut col_vals = vec![T::zero(); t_idx.len()];
            for t in 0..n_trail {
                for p in t_ptr[t]..t_ptr[t + 1] {
                    let i = t_idx[p];
                    col_rows[next[i]] = t;
                    col_vals[next[i]] = t_val[p];
                    next[i] += 1;
                }
            }
            let mut s = k22;
            for i in 0..n_lead {
                let rows = &col_rows[col_ptr[i]..col_ptr[i + 1]];
                let vals = &col_vals[col_ptr[i]..col_ptr[i + 1]];
                let di = d[i];
                for (a, (&ra, &va)) in rows.iter().zip(vals).enumerate() {
                    let w = di * va;
                    let srow = s.row_mut(ra);
                    for (&rb, &vb) in rows[..=a].iter().zip(&vals[..=a]) {
                        srow[rb] -= w * vb;
                    }
                }
            }
            let ldlt = DenseLdlt::new(&s).map_err(|e| match e {
                Error::Singular { deficiency, index } => Error::Singular {
                    deficiency,
                    index: perm[n_lead + index],
                },
                other => other,
            })?;
            Some(ldlt)
        } else {
            None
        };

        Ok(Self {
            n,
            perm,
            n_lead,
            l_ptr,
            l_idx,
            l_val,
            d,
            t_ptr,
            t_idx,
            t_val,
            trailing,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Fill-reducing permutation, `perm[new] = old`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Nonzeros in the sparse part of `L`.
    pub fn factor_nnz(&self) -> usize {
        self.l_idx.len() + self.t_idx.len()
    }

    /// Number of (positive, negative) eigenvalues.
    pub fn inertia(&self) -> (usize, usize) {
        let pos = self.d.iter().filter(|&&x| x > T::zero()).count();
        let neg = self.d.len() - pos;
        let (tp, tn) = self.trailing.as_ref().map_or((0, 0), DenseLdlt::inertia);
        (pos + tp, neg + tn)
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.n];
        self.solve_into(b, &mut x);
        x
    }

    pub fn solve_into(&self, b: &[T], x: &mut [T]) {
        assert_eq!(b.len(), self.n);
        assert_eq!(x.len(), self.n);
        let n1 = self.n_lead;
        let mut w: Vec<T> = self.perm.iter().map(|&i| b[i]).collect();
        // L11 y1 = b1
        for j in 0..n1 {
            let wj = w[j];
            if wj == T::zero() {
                continue;
            }
            for p in self.l_ptr[j]..self.l_ptr[j + 1] {
                w[self.l_idx[p]] -= self.l_val[p] * wj;
            }
        }
        // y2 = b2 - L21 y1
        for t in 0..self.n - n1 {
            let mut s = T::zero();
            for p in self.t_ptr[t]..self.t_ptr[t + 1] {
                s += self.t_val[p] * w[self.t_idx[p]];
            }
            w[n1 + t] -= s;
        }
        for j in 0..n1 {
            w[j] /= self.d[j];
        }
        if let Some(tr) = &self.trailing {
            tr.solve_in_place(&mut w[n1..]);
        }
        // x1 = L11^{-T} (z1 - L21^T x2)
        for t in 0..self.n - n1 {
            let xt = w[n1 + t];
            for p in self.t_ptr[t]..self.t_ptr[t + 1] {
                w[self.t_idx[p]] -= self.t_val[p] * xt;
            }
        }
        for j in (0..n1).rev() {
            let mut s = T::zero();
            for p in self.l_ptr[j]..self.l_ptr[j + 1] {
                s += self.l_val[p] * w[self.l_idx[p]];
            }
            w[j] -= s;
        }
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = w[new];
        }
    }
}

/// A factorization acts as the inverse of the factored matrix.
impl<T: Real> LinearOperator<T> for Factorization<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.solve_into(x, y);
    }
}
