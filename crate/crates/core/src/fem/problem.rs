//! Material parameters and body-force/boundary data.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Poisson ratio and the scaled Lamé parameter `lambda = nu / (1 - 2 nu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParameters<T> {
    pub nu: T,
    pub lambda: T,
}

impl<T: Real> MaterialParameters<T> {
    pub fn from_poisson_ratio(nu: T) -> Result<Self> {
        let half = T::lit(0.5);
        if !(nu >= T::zero() && nu < half) {
            return Err(Error::InvalidParameter(format!(
                "Poisson ratio {nu} outside [0, 0.5)"
            )));
        }
        Ok(Self {
            nu,
            lambda: nu / (T::one() - T::lit(2.0) * nu),
        })
    }

    /// Inverse map `nu = lambda / (1 + 2 lambda)`.
    pub fn from_lambda(lambda: T) -> Result<Self> {
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda {lambda} must be finite and non-negative"
            )));
        }
        Ok(Self {
            nu: lambda / (T::one() + T::lit(2.0) * lambda),
            lambda,
        })
    }
}

/// Displacement, its gradient and the body force of a boundary value problem.
pub trait ElasticityProblem<T: Real> {
    fn displacement(&self, p: [T; 2]) -> [T; 2];

    /// `grad[r][s] = d u_r / d x_s`
    fn displacement_gradient(&self, p: [T; 2]) -> [[T; 2]; 2];

    fn body_force(&self, p: [T; 2]) -> [T; 2];
}

/// `u = (sin(pi x) cos(pi y), -cos(pi x) sin(pi y))`, divergence free, with
/// `f = -div eps(u) = pi^2 u` for every lambda.
#[derive(Debug, Clone, Copy, Default)]
pub struct ManufacturedProblem;

impl<T: Real> ElasticityProblem<T> for ManufacturedProblem {
    fn displacement(&self, [x, y]: [T; 2]) -> [T; 2] {
        let pi = T::PI();
        let (sx, cx) = (pi * x).sin_cos();
        let (sy, cy) = (pi * y).sin_cos();
        [sx * cy, -cx * sy]
    }

    fn displacement_gradient(&self, [x, y]: [T; 2]) -> [[T; 2]; 2] {
        let pi = T::PI();
        let (sx, cx) = (pi * x).sin_cos();
        let (sy, cy) = (pi * y).sin_cos();
        [
            [pi * cx * cy, -pi * sx * sy],
            [pi * sx * sy, -pi * cx * cy],
        ]
    }

    fn body_force(&self, p: [T; 2]) -> [T; 2] {
        let pi2 = T::PI() * T::PI();
        let u = self.displacement(p);
        [pi2 * u[0], pi2 * u[1]]
    }
}

/// Zero displacement, zero force.
#[derive(Debug, Clone, Copy, Default)]
pub struct HomogeneousProblem;

impl<T: Real> ElasticityProblem<T> for HomogeneousProblem {
    fn displacement(&self, _: [T; 2]) -> [T; 2] {
        [T::zero(); 2]
    }

    fn displacement_gradient(&self, _: [T; 2]) -> [[T; 2]; 2] {
        [[T::zero(); 2]; 2]
    }

    fn body_force(&self, _: [T; 2]) -> [T; 2] {
        [T::zero(); 2]
    }
}
