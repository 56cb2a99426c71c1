use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::scalar::{dot, Real};
use crate::sparse::{tridiagonal_eigs, LinearOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StoppingRule {
    /// `||b - A x|| / ||b||`, recomputed from `x` every iteration.
    #[default]
    TrueResidual,
    /// `sqrt(r^T M r / r0^T M r0)` from the recurrence.
    PreconditionedResidual,
}

#[derive(Debug, Clone, Copy)]
pub struct PcgOptions<T> {
    pub tol: T,
    pub max_iterations: usize,
    pub stopping: StoppingRule,
}

impl<T: Real> Default for PcgOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-6),
            max_iterations: 500,
            stopping: StoppingRule::TrueResidual,
        }
    }
}

impl<T: Real> PcgOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub iterations: usize,
    /// Relative residual (per the stopping rule) before each iteration and at the end.
    pub residual_history: Vec<T>,
    pub lanczos_diag: Vec<T>,
    pub lanczos_offdiag: Vec<T>,
    /// Extreme Ritz value ratio of the Lanczos matrix; `None` for a zero rhs.
    pub condition_estimate: Option<T>,
    pub wall_time: Duration,
}

impl<T: Real> SolveReport<T> {
    pub fn final_residual(&self) -> T {
        self.residual_history.last().copied().unwrap_or_else(T::zero)
    }
}

/// Preconditioned conjugate gradients from a zero initial guess.
pub fn pcg_solve<T, A, M>(op: &A, rhs: &[T], precond: &M, opts: &PcgOptions<T>) -> Result<(Vec<T>, SolveReport<T>)>
where
    T: Real,
    A: LinearOperator<T> + ?Sized,
    M: LinearOperator<T> + ?Sized,
{
    pcg_solve_observed(op, rhs, precond, opts, |_, _| {})
}

/// As [`pcg_solve`], calling `observer(k, x_k)` after each iteration.
pub fn pcg_solve_observed<T, A, M, F>(
    op: &A,
    rhs: &[T],
    precond: &M,
    opts: &PcgOptions<T>,
    mut observer: F,
) -> Result<(Vec<T>, SolveReport<T>)>
where
    T: Real,
    A: LinearOperator<T> + ?Sized,
    M: LinearOperator<T> + ?Sized,
    F: FnMut(usize, &[T]),
{
    let start = Instant::now();
    let n = op.dim();
    if rhs.len() != n || precond.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if rhs.len() != n { rhs.len() } else { precond.dim() },
        });
    }
    if !(opts.tol > T::zero() && opts.tol < T::one()) {
        return Err(Error::InvalidParameter(format!("tolerance {} not in (0, 1)", opts.tol)));
    }

    let mut x = vec![T::zero(); n];
    let b_norm = dot(rhs, rhs).sqrt();
    if b_norm == T::zero() {
        return Ok((
            x,
            SolveReport {
                iterations: 0,
                residual_history: vec![T::zero()],
                lanczos_diag: Vec::new(),
                lanczos_offdiag: Vec::new(),
                condition_estimate: None,
                wall_time: start.elapsed(),
            },
        ));
    }

    let mut r = rhs.to_vec();
    let mut z = precond.apply_vec(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let rz0 = rz;
    let mut ap = vec![T::zero(); n];
    let mut ax = vec![T::zero(); n];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    let mut history = vec![T::one()];

    let mut converged = false;
    while alphas.len() < opts.max_iterations {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                pivot: alphas.len(),
                value: pap.as_f64(),
            });
        }
        let alpha = rz / pap;
        alphas.push(alpha);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        observer(alphas.len(), &x);

        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let rel = match opts.stopping {
            StoppingRule::TrueResidual => {
                op.apply(&x, &mut ax);
                let s: T = rhs.iter().zip(&ax).map(|(&b, &a)| (b - a) * (b - a)).sum();
                s.sqrt() / b_norm
            }
            StoppingRule::PreconditionedResidual => (rz_new.max(T::zero()) / rz0).sqrt(),
        };
        history.push(rel);
        if rel <= opts.tol {
            converged = true;
            break;
        }
        let beta = rz_new / rz;
        betas.push(beta);
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    if !converged {
        return Err(Error::NotConverged {
            iterations: alphas.len(),
            relative_residual: history.last().map_or(f64::NAN, |v| v.as_f64()),
            history: history.iter().map(|v| v.as_f64()).collect(),
        });
    }

    let (diag, offdiag) = lanczos_from_cg(&alphas, &betas);
    let condition_estimate = Some(ritz_condition(&diag, &offdiag)?);
    Ok((
        x,
        SolveReport {
            iterations: alphas.len(),
            residual_history: history,
            lanczos_diag: diag,
            lanczos_offdiag: offdiag,
            condition_estimate,
            wall_time: start.elapsed(),
        },
    ))
}

/// Lanczos tridiagonal of the preconditioned operator from CG coefficients:
/// `T_jj = 1/alpha_j + beta_{j-1}/alpha_{j-1}`, `T_j,j+1 = sqrt(beta_j)/alpha_j`.
pub fn lanczos_from_cg<T: Real>(alphas: &[T], betas: &[T]) -> (Vec<T>, Vec<T>) {
    let k = alphas.len();
    let mut diag = Vec::with_capacity(k);
    let mut off = Vec::with_capacity(k.saturating_sub(1));
    for j in 0..k {
        let mut d = T::one() / alphas[j];
        if j > 0 {
            d += betas[j - 1] / alphas[j - 1];
        }
        diag.push(d);
        if j + 1 < k {
            off.push(betas[j].sqrt() / alphas[j]);
        }
    }
    (diag, off)
}

pub(crate) fn ritz_condition<T: Real>(diag: &[T], offdiag: &[T]) -> Result<T> {
    let eig = tridiagonal_eigs(diag, offdiag)?;
    let lo = eig[0];
    let hi = eig[eig.len() - 1];
    if !(lo > T::zero()) {
        return Err(Error::NotPositiveDefinite {
            pivot: 0,
            value: lo.as_f64(),
        });
    }
    Ok(hi / lo)
}
