//! Per-mode Fourier symbols of the periodic elasticity and Stokes operators.
//!
//! For a frequency `xi` the elasticity operator acts as
//! `1/2 |xi|^2 (I + (2 lambda + 1) Pi)` with `Pi = xi xi^* / |xi|^2`, so every
//! solve is a `d x d` computation. The functions are generic over the
//! dimension `D` (2 or 3 in practice).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Symbol<T, const D: usize> = [[T; D]; D];
pub type ComplexVector<T, const D: usize> = [Complex<T>; D];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierMode<T, const D: usize> {
    pub xi: [T; D],
    pub fhat: ComplexVector<T, D>,
}

fn norm_sq<T: Real, const D: usize>(xi: &[T; D]) -> Result<T> {
    let n: T = xi.iter().map(|&x| x * x).sum();
    if n > T::zero() && n.is_finite() {
        Ok(n)
    } else {
        Err(Error::ZeroFrequency)
    }
}

fn cnorm<T: Real, const D: usize>(v: &ComplexVector<T, D>) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

fn apply<T: Real, const D: usize>(m: &Symbol<T, D>, v: &ComplexVector<T, D>) -> ComplexVector<T, D> {
    let mut out = [Complex::new(T::zero(), T::zero()); D];
    for (o, row) in out.iter_mut().zip(m) {
        for (&a, z) in row.iter().zip(v) {
            *o += z * a;
        }
    }
    out
}

/// `I + t Pi`
fn identity_plus<T: Real, const D: usize>(t: T, pi: &Symbol<T, D>) -> Symbol<T, D> {
    let mut m = [[T::zero(); D]; D];
    for i in 0..D {
        for j in 0..D {
            m[i][j] = t * pi[i][j];
        }
        m[i][i] += T::one();
    }
    m
}

/// `Pi_xi = xi xi^* / |xi|^2`
pub fn projector_symbol<T: Real, const D: usize>(xi: &[T; D]) -> Result<Symbol<T, D>> {
    let n = norm_sq(xi)?;
    let mut m = [[T::zero(); D]; D];
    for i in 0..D {
        for j in 0..D {
            m[i][j] = xi[i] * xi[j] / n;
        }
    }
    Ok(m)
}

/// `1/2 |xi|^2 (I + (2 lambda + 1) Pi_xi)`
pub fn elasticity_symbol<T: Real, const D: usize>(xi: &[T; D], lambda: T) -> Result<Symbol<T, D>> {
    check_lambda(lambda)?;
    let n = norm_sq(xi)?;
    let pi = projector_symbol(xi)?;
    let mut m = identity_plus(T::lit(2.0) * lambda + T::one(), &pi);
    let half = n / T::lit(2.0);
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v *= half;
        }
    }
    Ok(m)
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if lambda >= T::zero() && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("lambda {lambda} must be finite and non-negative")))
    }
}

/// `u_lambda = 2 |xi|^-2 (I - (2 lambda + 1)/(2 (lambda + 1)) Pi_xi) f`
pub fn solve_mode_elasticity<T: Real, const D: usize>(
    xi: &[T; D],
    lambda: T,
    fhat: &ComplexVector<T, D>,
) -> Result<ComplexVector<T, D>> {
    check_lambda(lambda)?;
    let n = norm_sq(xi)?;
    let pi = projector_symbol(xi)?;
    let two = T::lit(2.0);
    // split into (I - Pi) f + Pi f / (2 lambda + 2) to avoid cancellation for large lambda
    let along = apply(&pi, fhat);
    let w = T::one() / (two * (lambda + T::one()));
    let mut u = *fhat;
    for (z, a) in u.iter_mut().zip(&along) {
        *z = (*z - a + a * w) * (two / n);
    }
    Ok(u)
}

/// Velocity `2 |xi|^-2 (I - Pi_xi) f` and pressure `|xi|^-2 xi^* f` of the
/// Stokes symbol system.
pub fn solve_mode_stokes<T: Real, const D: usize>(
    xi: &[T; D],
    fhat: &ComplexVector<T, D>,
) -> Result<(ComplexVector<T, D>, Complex<T>)> {
    let n = norm_sq(xi)?;
    let pi = projector_symbol(xi)?;
    let two = T::lit(2.0);
    let mut u = apply(&identity_plus(-T::one(), &pi), fhat);
    for z in u.iter_mut() {
        *z *= two / n;
    }
    let mut p = Complex::new(T::zero(), T::zero());
    for (&x, z) in xi.iter().zip(fhat) {
        p += z * x;
    }
    Ok((u, p / n))
}

/// Residual norm of `[[1/2 |xi|^2 (I + Pi), xi], [xi^*, 0]] (u, p) = (f, 0)`.
pub fn stokes_residual<T: Real, const D: usize>(
    xi: &[T; D],
    u: &ComplexVector<T, D>,
    p: Complex<T>,
    fhat: &ComplexVector<T, D>,
) -> Result<T> {
    let a0 = elasticity_symbol(xi, T::zero())?;
    let au = apply(&a0, u);
    let mut s = T::zero();
    let mut div = Complex::new(T::zero(), T::zero());
    for i in 0..D {
        s += (au[i] + p * xi[i] - fhat[i]).norm_sqr();
        div += u[i] * xi[i];
    }
    Ok((s + div.norm_sqr()).sqrt())
}

/// `||symbol(lambda) u - f||`
pub fn elasticity_residual<T: Real, const D: usize>(
    xi: &[T; D],
    lambda: T,
    u: &ComplexVector<T, D>,
    fhat: &ComplexVector<T, D>,
) -> Result<T> {
    let au = apply(&elasticity_symbol(xi, lambda)?, u);
    Ok(au.iter().zip(fhat).map(|(a, f)| (a - f).norm_sqr()).sum::<T>().sqrt())
}

/// `||u_lambda - lambda/(lambda+1) u_inf - 1/(lambda+1) u_0||`
pub fn verify_convex_combination<T: Real, const D: usize>(
    xi: &[T; D],
    lambda: T,
    fhat: &ComplexVector<T, D>,
) -> Result<T> {
    let ul = solve_mode_elasticity(xi, lambda, fhat)?;
    let u0 = solve_mode_elasticity(xi, T::zero(), fhat)?;
    let (uinf, _) = solve_mode_stokes(xi, fhat)?;
    let s = T::one() + lambda;
    let (wi, w0) = (lambda / s, T::one() / s);
    Ok((0..D)
        .map(|i| (ul[i] - uinf[i] * wi - u0[i] * w0).norm_sqr())
        .sum::<T>()
        .sqrt())
}

/// Max-entry norm of `(I + t Pi)(I - t/(t+1) Pi) - I`.
pub fn verify_inverse_idempotent<T: Real, const D: usize>(t: T, xi: &[T; D]) -> Result<T> {
    if t == -T::one() {
        return Err(Error::InvalidParameter("t = -1 has no inverse".into()));
    }
    let pi = projector_symbol(xi)?;
    let a = identity_plus(t, &pi);
    let b = identity_plus(-t / (t + T::one()), &pi);
    let mut err = T::zero();
    for i in 0..D {
        for j in 0..D {
            let mut s = if i == j { -T::one() } else { T::zero() };
            for k in 0..D {
                s += a[i][k] * b[k][j];
            }
            err = err.max(s.abs());
        }
    }
    Ok(err)
}

/// Largest residuals over a sweep, each scaled by its natural magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepSummary<T> {
    pub modes: usize,
    /// Unscaled convex-combination residual.
    pub convex_combination_abs: T,
    /// Convex-combination residual times `|xi|^2 / ||f||`.
    pub convex_combination: T,
    /// Inverse-idempotent residual divided by `1 + |t|`.
    pub inverse_idempotent: T,
    /// Elasticity symbol residual divided by `(1 + lambda) ||f||`.
    pub elasticity: T,
    /// Stokes symbol residual divided by `||f||`.
    pub stokes: T,
}

/// Runs every identity on each `(mode, lambda, t)` triple.
pub fn fourier_sweep<T, const D: usize, I>(cases: I) -> Result<SweepSummary<T>>
where
    T: Real,
    I: IntoIterator<Item = (FourierMode<T, D>, T, T)>,
{
    let mut s = SweepSummary {
        modes: 0,
        convex_combination_abs: T::zero(),
        convex_combination: T::zero(),
        inverse_idempotent: T::zero(),
        elasticity: T::zero(),
        stokes: T::zero(),
    };
    for (mode, lambda, t) in cases {
        let n = norm_sq(&mode.xi)?;
        let f = cnorm(&mode.fhat);
        if f == T::zero() {
            return Err(Error::EmptyInput("zero forcing"));
        }
        let c = verify_convex_combination(&mode.xi, lambda, &mode.fhat)?;
        s.convex_combination_abs = s.convex_combination_abs.max(c);
        s.convex_combination = s.convex_combination.max(c * n / f);
        let r = verify_inverse_idempotent(t, &mode.xi)?;
        s.inverse_idempotent = s.inverse_idempotent.max(r / (T::one() + t.abs()));
        let u = solve_mode_elasticity(&mode.xi, lambda, &mode.fhat)?;
        s.elasticity = s.elasticity.max(elasticity_residual(&mode.xi, lambda, &u, &mode.fhat)? / ((T::one() + lambda) * f));
        let (uinf, p) = solve_mode_stokes(&mode.xi, &mode.fhat)?;
        s.stokes = s.stokes.max(stokes_residual(&mode.xi, &uinf, p, &mode.fhat)? / f);
        s.modes += 1;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{symmetric_eigen, DenseMatrix};
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn projector_examples() {
        assert_eq!(projector_symbol(&[1.0, 0.0]).unwrap(), [[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(projector_symbol(&[1.0, 1.0]).unwrap(), [[0.5, 0.5], [0.5, 0.5]]);
        assert_eq!(projector_symbol(&[0.0f64, 0.0]), Err(Error::ZeroFrequency));
        assert_eq!(projector_symbol(&[0.0f64; 3]), Err(Error::ZeroFrequency));
    }

    #[test]
    fn elasticity_symbol_examples() {
        assert_eq!(elasticity_symbol(&[1.0, 0.0], 0.0).unwrap(), [[1.0, 0.0], [0.0, 0.5]]);
        assert_eq!(elasticity_symbol(&[0.0, 2.0], 1.0).unwrap(), [[2.0, 0.0], [0.0, 8.0]]);
        assert!(elasticity_symbol(&[1.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn elasticity_solve_examples() {
        let xi = [2.0 * PI, 0.0];
        let f = [c(1.0), c(0.0)];
        let u0 = solve_mode_elasticity(&xi, 0.0, &f).unwrap();
        assert!((u0[0].re - 1.0 / (4.0 * PI * PI)).abs() < 1e-17);
        assert_eq!(u0[1], c(0.0));
        for lambda in [0.5, 3.0, 1e6] {
            let u = solve_mode_elasticity(&xi, lambda, &f).unwrap();
            let expected = 1.0 / (4.0 * PI * PI * (lambda + 1.0));
            assert!((u[0].re - expected).abs() <= 1e-15 * expected);
        }
        // forcing orthogonal to xi is unaffected by lambda
        let f = [c(0.0), c(1.0)];
        for lambda in [0.0, 7.0, 1e8] {
            assert_eq!(solve_mode_elasticity(&[1.0, 0.0], lambda, &f).unwrap(), [c(0.0), c(2.0)]);
        }
    }

    #[test]
    fn stokes_solve_examples() {
        let xi = [2.0 * PI, 0.0];
        let (u, p) = solve_mode_stokes(&xi, &[c(1.0), c(0.0)]).unwrap();
        assert_eq!(u, [c(0.0), c(0.0)]);
        assert!((p.re - 1.0 / (2.0 * PI)).abs() < 1e-16);
        let (u, p) = solve_mode_stokes(&[1.0, 0.0], &[c(0.0), c(1.0)]).unwrap();
        assert_eq!(u, [c(0.0), c(2.0)]);
        assert_eq!(p, c(0.0));
        let xi = [0.3, -1.7, 2.2];
        let f = [Complex::new(1.0, -2.0), Complex::new(0.5, 0.25), Complex::new(-3.0, 1.0)];
        let (u, p) = solve_mode_stokes(&xi, &f).unwrap();
        let div: Complex<f64> = (0..3).map(|i| u[i] * xi[i]).sum();
        assert!(div.norm() < 1e-15);
        assert!(stokes_residual(&xi, &u, p, &f).unwrap() < 1e-13);
    }

    #[test]
    fn convex_combination_examples() {
        let f = [c(1.0), c(0.0)];
        let xi = [2.0 * PI, 0.0];
        assert_eq!(verify_convex_combination(&xi, 0.0, &f).unwrap(), 0.0);
        assert!(verify_convex_combination(&xi, 3.0, &f).unwrap() <= 1e-16);
        let u = solve_mode_elasticity(&xi, 3.0, &f).unwrap();
        assert!((u[0].re - 1.0 / (16.0 * PI * PI)).abs() < 1e-17);
    }

    #[test]
    fn inverse_idempotent_examples() {
        assert_eq!(verify_inverse_idempotent(0.0, &[0.3, 0.4]).unwrap(), 0.0);
        assert_eq!(verify_inverse_idempotent(1.0, &[1.0, 0.0]).unwrap(), 0.0);
        assert!(verify_inverse_idempotent(-1.0, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn stokes_limit_rate() {
        let xi = [1.3, -0.4, 0.9];
        let f = [Complex::new(1.0, 1.0), Complex::new(-0.5, 2.0), Complex::new(0.0, -1.0)];
        let n: f64 = xi.iter().map(|x| x * x).sum();
        let fnorm = cnorm(&f);
        let (uinf, _) = solve_mode_stokes(&xi, &f).unwrap();
        for lambda in [1.0, 1e2, 1e4, 1e8] {
            let u = solve_mode_elasticity(&xi, lambda, &f).unwrap();
            let d: f64 = (0..3).map(|i| (u[i] - uinf[i]).norm_sqr()).sum::<f64>().sqrt();
            assert!(d <= 2.0 / (lambda + 1.0) * fnorm / n * (1.0 + 1e-12));
        }
    }

    #[test]
    fn elasticity_symbol_eigenvalues() {
        let xi = [0.7, -2.1];
        let n: f64 = xi.iter().map(|x| x * x).sum();
        for lambda in [0.0, 0.5, 2499.5] {
            let s = elasticity_symbol(&xi, lambda).unwrap();
            let m = DenseMatrix::from_rows(&s.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
            let e = symmetric_eigen(&m, false).unwrap().values;
            assert!((e[0] - 0.5 * n).abs() < 1e-12 * n);
            assert!((e[1] - 0.5 * n * (2.0 * lambda + 2.0)).abs() < 1e-12 * n * (1.0 + lambda));
        }
    }

    #[test]
    fn works_in_single_precision() {
        let r = verify_convex_combination(&[1.0f32, 2.0], 10.0, &[Complex::new(1.0f32, 0.0), Complex::new(0.0, 1.0)]).unwrap();
        assert!(r < 1e-6);
    }
}
