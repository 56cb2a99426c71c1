//! Sparse and dense linear algebra: storage, direct factorizations and
//! symmetric eigenvalue utilities.

mod csr;
mod dense;
mod eigen;
mod ldl;
pub mod ordering;

pub use csr::{CsrMatrix, TripletBuilder};
pub use dense::{DenseCholesky, DenseLdlt, DenseMatrix};
pub use eigen::{dense_symmetric_generalized_eigs, symmetric_eigen, tridiagonal_eigs, SymmetricEigen};
pub use ldl::{factor_spd, factor_symmetric_indefinite, Factorization};

use crate::scalar::Real;

/// A linear map on `R^n`, applied out of place.
pub trait LinearOperator<T> {
    fn dim(&self) -> usize;

    /// `y = Op x`
    fn apply(&self, x: &[T], y: &mut [T]);

    fn apply_vec(&self, x: &[T]) -> Vec<T>
    where
        T: Real,
    {
        let mut y = vec![T::zero(); self.dim()];
        self.apply(x, &mut y);
        y
    }
}

impl<T: Real> LinearOperator<T> for CsrMatrix<T> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.mul_vec_into(x, y);
    }
}

impl<T, Op: LinearOperator<T> + ?Sized> LinearOperator<T> for &Op {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        (**self).apply(x, y);
    }
}

/// Materializes a linear operator column by column.
pub fn to_dense<T: Real, Op: LinearOperator<T> + ?Sized>(op: &Op) -> DenseMatrix<T> {
    let n = op.dim();
    let mut out = DenseMatrix::zeros(n, n);
    let mut e = vec![T::zero(); n];
    let mut col = vec![T::zero(); n];
    for j in 0..n {
        e[j] = T::one();
        op.apply(&e, &mut col);
        e[j] = T::zero();
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    out
}
