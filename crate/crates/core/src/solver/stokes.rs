use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::{factor_symmetric_indefinite, CsrMatrix, Factorization, TripletBuilder};

/// Discrete Stokes projection through a factored saddle matrix
/// `[[A, B^T], [B, 0]]` with pressure dof 0 removed (the constant pressure
/// mode lies in the kernel of `B^T` under pure Dirichlet conditions).
#[derive(Debug, Clone)]
pub struct StokesProjector<T> {
    nu: usize,
    np: usize,
    factor: Factorization<T>,
}

impl<T: Real> StokesProjector<T> {
    pub fn new(a: &CsrMatrix<T>, b: &CsrMatrix<T>) -> Result<Self> {
        let nu = a.nrows();
        if b.ncols() != nu {
            return Err(Error::DimensionMismatch {
                expected: nu,
                found: b.ncols(),
            });
        }
        let np = b.nrows();
        if np == 0 {
            return Err(Error::EmptyInput("pressure space"));
        }
        let n = nu + np - 1;
        let mut tb = TripletBuilder::with_capacity(n, n, a.nnz() + 2 * b.nnz());
        for i in 0..nu {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                tb.push(i, j, v);
            }
        }
        for k in 1..np {
            let (cols, vals) = b.row(k);
            for (&j, &v) in cols.iter().zip(vals) {
                tb.push(nu + k - 1, j, v);
                tb.push(j, nu + k - 1, v);
            }
        }
        let factor = factor_symmetric_indefinite(&tb.build())?;
        Ok(Self { nu, np, factor })
    }

    pub fn velocity_dim(&self) -> usize {
        self.nu
    }

    pub fn pressure_dim(&self) -> usize {
        self.np
    }

    pub fn factorization(&self) -> &Factorization<T> {
        &self.factor
    }

    /// Solves `A u + B^T p = g`, `B u = h` (rows 1.. of `h`; `p_0 = 0`).
    pub fn saddle_solve(&self, g: &[T], h: &[T]) -> (Vec<T>, Vec<T>) {
        assert_eq!(g.len(), self.nu);
        assert_eq!(h.len(), self.np);
        let mut rhs = Vec::with_capacity(self.nu + self.np - 1);
        rhs.extend_from_slice(g);
        rhs.extend_from_slice(&h[1..]);
        let x = self.factor.solve(&rhs);
        let mut p = vec![T::zero(); self.np];
        p[1..].copy_from_slice(&x[self.nu..]);
        (x[..self.nu].to_vec(), p)
    }

    /// `P_h A^-1 g` as the velocity of one saddle solve with data `(g, 0)`.
    pub fn project_action(&self, g: &[T]) -> Vec<T> {
        let mut rhs = g.to_vec();
        rhs.resize(self.nu + self.np - 1, T::zero());
        let mut x = vec![T::zero(); rhs.len()];
        self.factor.solve_into(&rhs, &mut x);
        x.truncate(self.nu);
        x
    }

    /// `P_h v` for a velocity `v`.
    pub fn project(&self, a: &CsrMatrix<T>, v: &[T]) -> Vec<T> {
        self.project_action(&a.mul_vec(v))
    }
}

/// `P_h A^-1 g`; see [`StokesProjector::project_action`].
pub fn stokes_project_action<T: Real>(proj: &StokesProjector<T>, g: &[T]) -> Vec<T> {
    proj.project_action(g)
}
