use super::stokes::StokesProjector;
use crate::error::{Error, Result};
use crate::fem::ReducedSystem;
use crate::scalar::Real;
use crate::sparse::{factor_spd, Factorization, LinearOperator};

/// The lambda-independent parts of the preconditioner: a factorization of
/// `A` and the Stokes projector. Built once per mesh and element pair.
#[derive(Debug, Clone)]
pub struct PreconditionerFactors<T> {
    a_factor: Factorization<T>,
    stokes: StokesProjector<T>,
}

impl<T: Real> PreconditionerFactors<T> {
    pub fn new(sys: &ReducedSystem<T>) -> Result<Self> {
        Ok(Self {
            a_factor: factor_spd(&sys.a)?,
            stokes: StokesProjector::new(&sys.a, &sys.b)?,
        })
    }

    pub fn a_factor(&self) -> &Factorization<T> {
        &self.a_factor
    }

    pub fn stokes(&self) -> &StokesProjector<T> {
        &self.stokes
    }

    pub fn with_lambda(&self, lambda: T) -> Result<Preconditioner<'_, T>> {
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda {lambda} must be finite and non-negative"
            )));
        }
        Ok(Preconditioner {
            factors: self,
            lambda,
        })
    }
}

/// `M = lambda/(1+lambda) P_h A^-1 + 1/(1+lambda) A^-1`.
#[derive(Debug, Clone, Copy)]
pub struct Preconditioner<'a, T> {
    factors: &'a PreconditionerFactors<T>,
    lambda: T,
}

impl<T: Real> Preconditioner<'_, T> {
    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Weights `(lambda/(1+lambda), 1/(1+lambda))`.
    pub fn weights(&self) -> (T, T) {
        let s = T::one() + self.lambda;
        (self.lambda / s, T::one() / s)
    }
}

impl<T: Real> LinearOperator<T> for Preconditioner<'_, T> {
    fn dim(&self) -> usize {
        self.factors.a_factor.dim()
    }

    fn apply(&self, g: &[T], y: &mut [T]) {
        self.factors.a_factor.solve_into(g, y);
        if self.lambda == T::zero() {
            return;
        }
        let (ws, wa) = self.weights();
        let p = self.factors.stokes.project_action(g);
        for (yi, pi) in y.iter_mut().zip(p) {
            *yi = ws * pi + wa * *yi;
        }
    }
}

pub fn apply_preconditioner<T: Real>(m: &Preconditioner<'_, T>, g: &[T]) -> Vec<T> {
    m.apply_vec(g)
}
