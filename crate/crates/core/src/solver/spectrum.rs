use super::pcg::{ritz_condition, SolveReport};
use super::stokes::StokesProjector;
use crate::error::{Error, Result};
use crate::fem::ReducedSystem;
use crate::scalar::{dot, Real};
use crate::sparse::{
    dense_symmetric_generalized_eigs, factor_spd, to_dense, DenseMatrix, Factorization, LinearOperator,
};

/// Default size limit for dense diagnostics.
pub const DENSE_LIMIT: usize = 3000;

/// Ratio of the extreme eigenvalues of the Lanczos matrix carried by a PCG report.
pub fn estimate_condition<T: Real>(report: &SolveReport<T>) -> Result<T> {
    if report.lanczos_diag.is_empty() {
        return Err(Error::EmptyInput("Lanczos data"));
    }
    ritz_condition(&report.lanczos_diag, &report.lanczos_offdiag)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosEstimate<T> {
    pub min: T,
    pub max: T,
    pub steps: usize,
}

impl<T: Real> LanczosEstimate<T> {
    pub fn condition(&self) -> T {
        self.max / self.min
    }
}

/// Preconditioned Lanczos on `M A` from `start` with full reorthogonalization.
///
/// Runs `max_steps` steps (capped at the dimension). When the Krylov space
/// becomes invariant, as happens for symmetric data, the run continues from a
/// fresh deterministic vector orthogonalized against the basis.
pub fn lanczos_extremes<T, A, M>(op: &A, precond: &M, start: &[T], max_steps: usize) -> Result<LanczosEstimate<T>>
where
    T: Real,
    A: LinearOperator<T> + ?Sized,
    M: LinearOperator<T> + ?Sized,
{
    let n = op.dim();
    if start.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: start.len(),
        });
    }
    // v_j live in the dual space, w_j = M v_j, with v_i . w_k = delta_ik
    let z = precond.apply_vec(start);
    let beta0 = dot(start, &z).sqrt();
    if !(beta0 > T::zero()) {
        return Err(Error::EmptyInput("Lanczos start vector"));
    }
    let mut vs: Vec<Vec<T>> = vec![start.iter().map(|&x| x / beta0).collect()];
    let mut ws: Vec<Vec<T>> = vec![z.iter().map(|&x| x / beta0).collect()];
    let mut diag = Vec::new();
    let mut off: Vec<T> = Vec::new();
    let mut u = vec![T::zero(); n];
    let steps = max_steps.min(n).max(1);
    for j in 0..steps {
        op.apply(&ws[j], &mut u);
        let alpha = dot(&u, &ws[j]);
        diag.push(alpha);
        if j + 1 == steps {
            break;
        }
        for _ in 0..2 {
            for (v, w) in vs.iter().zip(&ws) {
                let c = dot(&u, w);
                for (ui, &vi) in u.iter_mut().zip(v) {
                    *ui -= c * vi;
                }
            }
        }
        let mut zu = precond.apply_vec(&u);
        let mut beta = dot(&u, &zu).max(T::zero()).sqrt();
        let scale = diag.iter().fold(T::zero(), |m, &a| m.max(a.abs()));
        if beta <= T::lit(1e-10) * scale {
            u = restart_vector(n, vs.len());
            for _ in 0..2 {
                for (v, w) in vs.iter().zip(&ws) {
                    let c = dot(&u, w);
                    for (ui, &vi) in u.iter_mut().zip(v) {
                        *ui -= c * vi;
                    }
                }
            }
            zu = precond.apply_vec(&u);
            let fresh = dot(&u, &zu).max(T::zero()).sqrt();
            if fresh <= T::lit(1e-10) * dot(&u, &u).sqrt() {
                break;
            }
            off.push(T::zero());
            beta = fresh;
        } else {
            off.push(beta);
        }
        vs.push(u.iter().map(|&x| x / beta).collect());
        ws.push(zu.iter().map(|&x| x / beta).collect());
    }
    let eig = crate::sparse::tridiagonal_eigs(&diag, &off)?;
    Ok(LanczosEstimate {
        min: eig[0],
        max: eig[eig.len() - 1],
        steps: diag.len(),
    })
}

/// Deterministic pseudo-random vector with entries in (-1, 1).
fn restart_vector<T: Real>(n: usize, seed: usize) -> Vec<T> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (seed as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    (0..n)
        .map(|_| {
            state ^= state >> 30;
            state = state.wrapping_mul(0xBF58_476D_1CE4_E5B9);
            state ^= state >> 27;
            state = state.wrapping_mul(0x94D0_49BB_1331_11EB);
            state ^= state >> 31;
            T::lit((state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0)
        })
        .collect()
}

/// Condition number of `M A`: the PCG Lanczos estimate, or for runs shorter
/// than 10 iterations a reorthogonalized Lanczos run of up to 30 steps from `rhs`.
pub fn condition_estimate<T, A, M>(op: &A, precond: &M, rhs: &[T], report: &SolveReport<T>) -> Result<T>
where
    T: Real,
    A: LinearOperator<T> + ?Sized,
    M: LinearOperator<T> + ?Sized,
{
    if report.iterations >= 10 {
        estimate_condition(report)
    } else {
        Ok(lanczos_extremes(op, precond, rhs, 30)?.condition())
    }
}

/// All eigenvalues of `M A`, ascending, from the pencil `(A M A, A)`.
pub fn dense_preconditioned_spectrum<T, A, M>(op: &A, precond: &M, limit: usize) -> Result<Vec<T>>
where
    T: Real,
    A: LinearOperator<T> + ?Sized,
    M: LinearOperator<T> + ?Sized,
{
    let n = op.dim();
    if n > limit {
        return Err(Error::DenseLimitExceeded { size: n, limit });
    }
    let mut a = to_dense(op);
    a.symmetrize();
    let mut m = to_dense(precond);
    m.symmetrize();
    let mut k = a.matmul(&m).matmul(&a);
    k.symmetrize();
    Ok(dense_symmetric_generalized_eigs(&k, &a, false)?.values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfSupReport<T> {
    pub beta_h: T,
    /// Largest eigenvalue of `B A^-1 B^T` relative to the pressure mass.
    pub theta_max: T,
    /// Number of (near) zero eigenvalues excluded, normally the constant mode.
    pub kernel_dimension: usize,
}

/// `beta_h = sqrt(min nonzero theta)` for `B A^-1 B^T q = theta MQ q`.
pub fn measure_inf_sup<T: Real>(
    a: &crate::sparse::CsrMatrix<T>,
    b: &crate::sparse::CsrMatrix<T>,
    mq: &crate::sparse::CsrMatrix<T>,
    limit: usize,
) -> Result<InfSupReport<T>> {
    let m = b.nrows();
    if a.nrows() > limit || m > limit {
        return Err(Error::DenseLimitExceeded {
            size: a.nrows().max(m),
            limit,
        });
    }
    let af = factor_spd(a)?;
    let bt = b.transpose();
    let mut cols = Vec::with_capacity(m);
    let mut e = vec![T::zero(); m];
    for k in 0..m {
        e[k] = T::one();
        let w = af.solve(&bt.mul_vec(&e));
        cols.push(b.mul_vec(&w));
        e[k] = T::zero();
    }
    let mut s = DenseMatrix::from_columns(m, &cols);
    s.symmetrize();
    let theta = dense_symmetric_generalized_eigs(&s, &mq.to_dense(), false)?.values;
    let theta_max = theta[m - 1];
    let cut = T::lit(1e-10) * theta_max;
    let kernel_dimension = theta.iter().filter(|&&t| t <= cut).count();
    let positive = theta
        .iter()
        .copied()
        .find(|&t| t > cut)
        .ok_or(Error::EmptyInput("nonzero inf-sup spectrum"))?;
    Ok(InfSupReport {
        beta_h: positive.sqrt(),
        theta_max,
        kernel_dimension,
    })
}

/// The two sides of the norm equivalence for one velocity `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEquivalence<T> {
    /// `||Pi_h div v||` with the exact L2 projection onto the pressure space.
    pub projected_divergence: T,
    /// `||eps(v - P_h v)||`, the energy distance to the divergence-free subspace.
    pub energy_distance: T,
}

impl<T: Real> NormEquivalence<T> {
    pub fn ratio(&self) -> T {
        self.projected_divergence / self.energy_distance
    }

    /// `(dv - beta e, sqrt(2) e - dv)`; both non-negative when the bounds hold.
    pub fn slacks(&self, beta: T) -> (T, T) {
        let e = self.energy_distance;
        let dv = self.projected_divergence;
        (dv - beta * e, T::lit(2.0).sqrt() * e - dv)
    }
}

/// Evaluates both sides of `beta ||eps(v - P v)|| <= ||Pi_h div v|| <= sqrt(2) ||eps(v - P v)||`.
pub fn verify_norm_equivalence<T: Real>(
    sys: &ReducedSystem<T>,
    proj: &StokesProjector<T>,
    mq_factor: &Factorization<T>,
    v: &[T],
) -> NormEquivalence<T> {
    let pv = proj.project(&sys.a, v);
    let d: Vec<T> = v.iter().zip(&pv).map(|(&a, &b)| a - b).collect();
    let energy = dot(&d, &sys.a.mul_vec(&d)).max(T::zero()).sqrt();
    let bv = sys.b.mul_vec(v);
    let div = dot(&bv, &mq_factor.solve(&bv)).max(T::zero()).sqrt();
    NormEquivalence {
        projected_divergence: div,
        energy_distance: energy,
    }
}
