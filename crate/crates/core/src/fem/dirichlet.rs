//! Elimination of Dirichlet dofs with a boundary lift.

use super::assembly::{check_lambda, AssembledSystem};
use super::{DofSpace, ElementKind};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::{CsrMatrix, LinearOperator};

/// The discrete problem restricted to free velocity dofs.
///
/// With `u = u_f + g` (lift `g` on boundary dofs) the reduced equations read
/// `A_lambda,ff u_f = F_f - A_fb g - lambda B_f^T D^-1 B_b g`.
#[derive(Debug, Clone)]
pub struct ReducedSystem<T> {
    /// Full-space index of each reduced dof, ascending.
    pub free: Vec<usize>,
    pub a: CsrMatrix<T>,
    /// Divergence form on free columns, `dim Q x free`.
    pub b: CsrMatrix<T>,
    pub mq: CsrMatrix<T>,
    pub d: Vec<T>,
    pub pressure: ElementKind,
    load: Vec<T>,
    lifted_div: Vec<T>,
    lift: Vec<T>,
}

pub fn apply_dirichlet<T: Real>(sys: &AssembledSystem<T>, v: &DofSpace<T>) -> Result<ReducedSystem<T>> {
    let mask = v
        .dirichlet_mask()
        .ok_or_else(|| Error::UnsupportedElement(format!("{} has no Dirichlet mask", v.kind())))?;
    if mask.len() != sys.velocity_dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.velocity_dim(),
            found: mask.len(),
        });
    }
    let free = v.free_dofs();
    let bnd = v.boundary_dofs();
    let g_b: Vec<T> = bnd.iter().map(|&i| sys.lift[i]).collect();
    let all_q: Vec<usize> = (0..sys.pressure_dim()).collect();

    let a_fb = sys.a.select(&free, &bnd);
    let a_lift = a_fb.mul_vec(&g_b);
    let load = free
        .iter()
        .zip(&a_lift)
        .map(|(&i, &t)| sys.rhs[i] - t)
        .collect();
    let lifted_div = sys.b.select(&all_q, &bnd).mul_vec(&g_b);

    Ok(ReducedSystem {
        a: sys.a.select(&free, &free),
        b: sys.b.select(&all_q, &free),
        mq: sys.mq.clone(),
        d: sys.d.clone(),
        pressure: sys.pressure,
        load,
        lifted_div,
        lift: sys.lift.clone(),
        free,
    })
}

impl<T: Real> ReducedSystem<T> {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn pressure_dim(&self) -> usize {
        self.b.nrows()
    }

    /// Right-hand side for the given lambda.
    pub fn rhs(&self, lambda: T) -> Result<Vec<T>> {
        check_lambda(lambda)?;
        let mut out = self.load.clone();
        if lambda > T::zero() {
            let w: Vec<T> = self
                .lifted_div
                .iter()
                .zip(&self.d)
                .map(|(&b, &d)| lambda * b / d)
                .collect();
            for (o, t) in out.iter_mut().zip(self.b.mul_transpose_vec(&w)) {
                *o -= t;
            }
        }
        Ok(out)
    }

    pub fn operator(&self, lambda: T) -> Result<LambdaOperator<'_, T>> {
        check_lambda(lambda)?;
        Ok(LambdaOperator { sys: self, lambda })
    }

    /// Explicit sparse `A_ff + lambda B_f^T D^-1 B_f`.
    pub fn lambda_matrix(&self, lambda: T) -> Result<CsrMatrix<T>> {
        check_lambda(lambda)?;
        let w: Vec<T> = self.d.iter().map(|&d| lambda / d).collect();
        Ok(self.a.add_scaled(T::one(), &self.b.transpose_weighted_product(&w)))
    }

    /// Full coefficient vector: reduced values on free dofs, lift elsewhere.
    pub fn expand(&self, u_free: &[T]) -> Vec<T> {
        let mut out = self.lift.clone();
        for (&i, &x) in self.free.iter().zip(u_free) {
            out[i] = x;
        }
        out
    }

    pub fn lift(&self) -> &[T] {
        &self.lift
    }

    /// `||D^-1/2 B v||`, the discrete norm of the projected divergence.
    pub fn projected_divergence_norm(&self, v: &[T]) -> T {
        self.b
            .mul_vec(v)
            .iter()
            .zip(&self.d)
            .map(|(&b, &d)| b * b / d)
            .sum::<T>()
            .sqrt()
    }
}

/// Matrix-free `A + lambda B^T D^-1 B` on the reduced space.
#[derive(Debug, Clone, Copy)]
pub struct LambdaOperator<'a, T> {
    sys: &'a ReducedSystem<T>,
    lambda: T,
}

impl<T: Real> LambdaOperator<'_, T> {
    pub fn lambda(&self) -> T {
        self.lambda
    }
}

impl<T: Real> LinearOperator<T> for LambdaOperator<'_, T> {
    fn dim(&self) -> usize {
        self.sys.dim()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.sys.a.mul_vec_into(x, y);
        if self.lambda > T::zero() {
            let mut bx = self.sys.b.mul_vec(x);
            for (v, &d) in bx.iter_mut().zip(&self.sys.d) {
                *v *= self.lambda / d;
            }
            for (o, t) in y.iter_mut().zip(self.sys.b.mul_transpose_vec(&bx)) {
                *o += t;
            }
        }
    }
}
