//! Global assembly of the bilinear forms and load vectors.

use super::basis::{p2_gradients, p2_values, CellGeometry};
use super::problem::ElasticityProblem;
use super::quadrature::QuadratureRule;
use super::{interpolate, DofSpace, ElementKind};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::{CsrMatrix, TripletBuilder};

/// Adds a dense local block, mirroring the upper triangle so the global
/// matrix is exactly symmetric.
fn scatter_symmetric<T: Real>(tb: &mut TripletBuilder<T>, dofs: &[usize], local: &[T], n: usize) {
    for a in 0..n {
        for b in 0..n {
            let v = if a <= b { local[a * n + b] } else { local[b * n + a] };
            tb.push(dofs[a], dofs[b], v);
        }
    }
}

/// `A_ij = (eps(phi_j), eps(phi_i))` on a P2 vector space.
pub fn assemble_epsilon_stiffness<T: Real>(v: &DofSpace<T>) -> Result<CsrMatrix<T>> {
    v.require(&[ElementKind::P2Vector])?;
    let mesh = v.mesh();
    let rule = QuadratureRule::<T>::degree5();
    let n = v.dof_count();
    let mut tb = TripletBuilder::with_capacity(n, n, 144 * mesh.num_cells());
    let half = T::lit(0.5);
    let mut local = [T::zero(); 144];
    for cell in 0..mesh.num_cells() {
        let geo = CellGeometry::new(mesh, cell);
        local.fill(T::zero());
        for (l, &w) in rule.points.iter().zip(&rule.weights) {
            let g = p2_gradients(*l, &geo.grad_lambda);
            let wa = w * geo.area * half;
            for a in 0..6 {
                for b in a..6 {
                    let gg = g[a][0] * g[b][0] + g[a][1] * g[b][1];
                    for c in 0..2 {
                        for d in 0..2 {
                            let mut val = g[a][d] * g[b][c];
                            if c == d {
                                val += gg;
                            }
                            local[(2 * a + c) * 12 + 2 * b + d] += wa * val;
                        }
                    }
                }
            }
        }
        scatter_symmetric(&mut tb, &v.cell_dofs(cell), &local, 12);
    }
    Ok(tb.build())
}

/// `B_ki = (div phi_i, psi_k)`, of shape `dim Q x dim V`.
pub fn assemble_div<T: Real>(v: &DofSpace<T>, q: &DofSpace<T>) -> Result<CsrMatrix<T>> {
    v.require(&[ElementKind::P2Vector])?;
    q.require(&[ElementKind::P0, ElementKind::P1])?;
    if !v.same_mesh(q) {
        return Err(Error::MeshMismatch);
    }
    let mesh = v.mesh();
    let rule = QuadratureRule::<T>::degree5();
    let nq = q.local_nodes();
    let mut tb = TripletBuilder::with_capacity(q.dof_count(), v.dof_count(), 36 * mesh.num_cells());
    for cell in 0..mesh.num_cells() {
        let geo = CellGeometry::new(mesh, cell);
        let vd = v.cell_dofs(cell);
        let qd = q.cell_dofs(cell);
        let mut local = [[T::zero(); 12]; 3];
        for (l, &w) in rule.points.iter().zip(&rule.weights) {
            let g = p2_gradients(*l, &geo.grad_lambda);
            let psi = if nq == 1 { [T::one(); 3] } else { *l };
            for (k, &pk) in psi.iter().enumerate().take(nq) {
                for a in 0..6 {
                    for c in 0..2 {
                        local[k][2 * a + c] += w * geo.area * pk * g[a][c];
                    }
                }
            }
        }
        for k in 0..nq {
            for i in 0..12 {
                tb.push(qd[k], vd[i], local[k][i]);
            }
        }
    }
    Ok(tb.build())
}

/// Pressure mass matrix and its diagonal surrogate `D` (exact for P0,
/// `diag(MQ)` for P1).
pub fn assemble_pressure_mass<T: Real>(q: &DofSpace<T>) -> Result<(CsrMatrix<T>, Vec<T>)> {
    q.require(&[ElementKind::P0, ElementKind::P1])?;
    let mq = assemble_scalar_mass(q)?;
    let d = mq.diagonal();
    Ok((mq, d))
}

/// `(psi_j, psi_i)` for a scalar space.
pub fn assemble_scalar_mass<T: Real>(s: &DofSpace<T>) -> Result<CsrMatrix<T>> {
    s.require(&[ElementKind::P0, ElementKind::P1, ElementKind::P2])?;
    let mesh = s.mesh();
    let rule = QuadratureRule::<T>::degree5();
    let m = s.local_nodes();
    let n = s.dof_count();
    let mut tb = TripletBuilder::with_capacity(n, n, m * m * mesh.num_cells());
    let mut local = [T::zero(); 36];
    for cell in 0..mesh.num_cells() {
        let geo = CellGeometry::new(mesh, cell);
        local.fill(T::zero());
        for (l, &w) in rule.points.iter().zip(&rule.weights) {
            let vals: [T; 6] = match s.kind() {
                ElementKind::P0 => [T::one(), T::zero(), T::zero(), T::zero(), T::zero(), T::zero()],
                ElementKind::P1 => [l[0], l[1], l[2], T::zero(), T::zero(), T::zero()],
                _ => p2_values(*l),
            };
            for a in 0..m {
                for b in a..m {
                    local[a * m + b] += w * geo.area * vals[a] * vals[b];
                }
            }
        }
        scatter_symmetric(&mut tb, &s.cell_dofs(cell), &local, m);
    }
    Ok(tb.build())
}

/// `F_i = (f, phi_i)` with the degree-6 rule.
pub fn assemble_load<T: Real, P: ElasticityProblem<T> + ?Sized>(
    problem: &P,
    v: &DofSpace<T>,
) -> Result<Vec<T>> {
    v.require(&[ElementKind::P2Vector])?;
    let mesh = v.mesh();
    let rule = QuadratureRule::<T>::degree6();
    let mut out = vec![T::zero(); v.dof_count()];
    for cell in 0..mesh.num_cells() {
        let geo = CellGeometry::new(mesh, cell);
        let dofs = v.cell_dofs(cell);
        for (l, &w) in rule.points.iter().zip(&rule.weights) {
            let f = problem.body_force(geo.point(*l));
            let n = p2_values(*l);
            for a in 0..6 {
                for c in 0..2 {
                    out[dofs[2 * a + c]] += w * geo.area * n[a] * f[c];
                }
            }
        }
    }
    Ok(out)
}

/// Operators and data of the discrete problem on the full (unconstrained) space.
#[derive(Debug, Clone)]
pub struct AssembledSystem<T> {
    pub a: CsrMatrix<T>,
    pub b: CsrMatrix<T>,
    pub mq: CsrMatrix<T>,
    /// Diagonal realizing the pressure projection.
    pub d: Vec<T>,
    pub rhs: Vec<T>,
    /// P2 interpolant of the boundary data on Dirichlet dofs, zero elsewhere.
    pub lift: Vec<T>,
    pub pressure: ElementKind,
}

impl<T: Real> AssembledSystem<T> {
    pub fn assemble<P: ElasticityProblem<T> + ?Sized>(
        v: &DofSpace<T>,
        q: &DofSpace<T>,
        problem: &P,
    ) -> Result<Self> {
        let a = assemble_epsilon_stiffness(v)?;
        let b = assemble_div(v, q)?;
        let (mq, d) = assemble_pressure_mass(q)?;
        let rhs = assemble_load(problem, v)?;
        let mask = v.dirichlet_mask().expect("vector space has a Dirichlet mask");
        let mut lift = interpolate(v, problem)?;
        for (x, &on) in lift.iter_mut().zip(mask) {
            if !on {
                *x = T::zero();
            }
        }
        Ok(Self {
            a,
            b,
            mq,
            d,
            rhs,
            lift,
            pressure: q.kind(),
        })
    }

    pub fn velocity_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn pressure_dim(&self) -> usize {
        self.b.nrows()
    }

    /// Explicit `A + lambda B^T D^-1 B`.
    pub fn lambda_matrix(&self, lambda: T) -> Result<CsrMatrix<T>> {
        check_lambda(lambda)?;
        let w: Vec<T> = self.d.iter().map(|&d| lambda / d).collect();
        Ok(self.a.add_scaled(T::one(), &self.b.transpose_weighted_product(&w)))
    }
}

pub(crate) fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if lambda >= T::zero() && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "lambda {lambda} must be finite and non-negative"
        )))
    }
}

/// `(A + lambda B^T D^-1 B) v` without forming the product matrix.
pub fn apply_lambda_operator<T: Real>(sys: &AssembledSystem<T>, lambda: T, v: &[T]) -> Result<Vec<T>> {
    check_lambda(lambda)?;
    if v.len() != sys.velocity_dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.velocity_dim(),
            found: v.len(),
        });
    }
    let mut out = sys.a.mul_vec(v);
    if lambda > T::zero() {
        let mut bv = sys.b.mul_vec(v);
        for (x, &d) in bv.iter_mut().zip(&sys.d) {
            *x *= lambda / d;
        }
        for (o, t) in out.iter_mut().zip(sys.b.mul_transpose_vec(&bv)) {
            *o += t;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{build_space, HomogeneousProblem, ManufacturedProblem};
    use super::*;
    use crate::mesh::{build_uniform_mesh, Mesh};
    use crate::sparse::symmetric_eigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn spaces(level: u32, pressure: ElementKind) -> (DofSpace<f64>, DofSpace<f64>) {
        let mesh: Arc<Mesh<f64>> = Arc::new(build_uniform_mesh(level).unwrap());
        (
            build_space(mesh.clone(), ElementKind::P2Vector).unwrap(),
            build_space(mesh, pressure).unwrap(),
        )
    }

    fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    fn dot(x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    #[test]
    fn stiffness_is_exactly_symmetric() {
        for level in 1..=3 {
            let (v, _) = spaces(level, ElementKind::P0);
            let a = assemble_epsilon_stiffness(&v).unwrap();
            assert_eq!(a.symmetry_defect(), Some(0.0));
        }
    }

    #[test]
    fn stiffness_nullspace_is_rigid_motions() {
        let (v, _) = spaces(1, ElementKind::P0);
        let a = assemble_epsilon_stiffness(&v).unwrap();
        let eig = symmetric_eigen(&a.to_dense(), false).unwrap();
        let scale = eig.values.last().copied().unwrap();
        let zeros = eig.values.iter().filter(|&&x| x.abs() < 1e-10 * scale).count();
        assert_eq!(zeros, 3);
        assert!(eig.values.iter().all(|&x| x > -1e-10 * scale));
    }

    #[test]
    fn rotation_has_zero_energy() {
        let (v, _) = spaces(2, ElementKind::P0);
        let a = assemble_epsilon_stiffness(&v).unwrap();
        let r: Vec<f64> = (0..v.dof_count())
            .map(|i| {
                let [x, y] = v.dof_coordinates(i);
                if i % 2 == 0 {
                    -y
                } else {
                    x
                }
            })
            .collect();
        let norm_a = a.max_abs();
        let scale = norm_a * dot(&r, &r);
        // the matrix-vector product itself carries eps * |A| |r|^2 of round-off
        let energy = dot(&r, &a.mul_vec(&r));
        assert!(energy.abs() <= 1e-15 * scale);
        // the same form integrated pointwise from eps(r)
        let rule = QuadratureRule::<f64>::degree5();
        let mesh = v.mesh();
        let mut pointwise = 0.0;
        for cell in 0..mesh.num_cells() {
            let geo = CellGeometry::new(mesh, cell);
            let dofs = v.cell_dofs(cell);
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                let g = p2_gradients(*l, &geo.grad_lambda);
                let mut grad = [[0.0; 2]; 2];
                for a in 0..6 {
                    for c in 0..2 {
                        for s in 0..2 {
                            grad[c][s] += r[dofs[2 * a + c]] * g[a][s];
                        }
                    }
                }
                let off = 0.5 * (grad[0][1] + grad[1][0]);
                pointwise += w * geo.area * (grad[0][0].powi(2) + grad[1][1].powi(2) + 2.0 * off * off);
            }
        }
        assert!(pointwise <= 1e-24 * scale);
    }

    #[test]
    fn divergence_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for pressure in [ElementKind::P0, ElementKind::P1] {
            let (v, q) = spaces(2, pressure);
            let b = assemble_div(&v, &q).unwrap();
            let mask = v.dirichlet_mask().unwrap();
            let mut w = random_vec(v.dof_count(), &mut rng);
            for (x, &on) in w.iter_mut().zip(mask) {
                if on {
                    *x = 0.0;
                }
            }
            // constant pressure is the sum of all (P0 or P1) basis functions
            let total: f64 = b.mul_vec(&w).iter().sum();
            assert!(total.abs() < 1e-13);

            let constant: Vec<f64> = (0..v.dof_count()).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
            assert!(b.mul_vec(&constant).iter().all(|x| x.abs() < 1e-15));
        }
    }

    #[test]
    fn div_of_interpolant_matches_cellwise_quadrature() {
        let (v, q) = spaces(2, ElementKind::P0);
        let b = assemble_div(&v, &q).unwrap();
        let u = interpolate(&v, &ManufacturedProblem).unwrap();
        let bu = b.mul_vec(&u);
        let rule = QuadratureRule::<f64>::degree6();
        let mesh = v.mesh();
        let mut max = 0.0f64;
        for cell in 0..mesh.num_cells() {
            let geo = CellGeometry::new(mesh, cell);
            let dofs = v.cell_dofs(cell);
            let mut integral = 0.0;
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                let g = p2_gradients(*l, &geo.grad_lambda);
                let div: f64 = (0..6).map(|a| u[dofs[2 * a]] * g[a][0] + u[dofs[2 * a + 1]] * g[a][1]).sum();
                integral += w * geo.area * div;
            }
            assert!((bu[cell] - integral).abs() < 1e-14);
            max = max.max(bu[cell].abs());
        }
        assert!(max > 1e-8, "interpolation error should be visible");
    }

    #[test]
    fn p0_mass_is_cell_area() {
        let (_, q) = spaces(2, ElementKind::P0);
        let (mq, d) = assemble_pressure_mass(&q).unwrap();
        assert_eq!(mq.nnz(), 32);
        for &x in &d {
            assert!((x - 1.0 / 32.0).abs() < 1e-16);
        }
    }

    #[test]
    fn p1_mass_properties() {
        let (_, q) = spaces(3, ElementKind::P1);
        let (mq, d) = assemble_pressure_mass(&q).unwrap();
        let total: f64 = mq.values().iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        let h = 1.0 / 8.0;
        let mesh = q.mesh();
        for (i, &on) in mesh.boundary().vertices.iter().enumerate() {
            if !on {
                assert!((d[i] - h * h / 2.0).abs() < 1e-15);
            }
        }
        assert_eq!(mq.symmetry_defect(), Some(0.0));
    }

    #[test]
    fn p2_mass_partition_of_unity() {
        let mesh: Arc<Mesh<f64>> = Arc::new(build_uniform_mesh(3).unwrap());
        let s = build_space(mesh, ElementKind::P2).unwrap();
        let m = assemble_scalar_mass(&s).unwrap();
        let rows: Vec<f64> = m.mul_vec(&vec![1.0; s.dof_count()]);
        assert!((rows.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn load_pairs_with_interpolant() {
        let (v, _) = spaces(4, ElementKind::P0);
        let f = assemble_load(&ManufacturedProblem, &v).unwrap();
        let u = interpolate(&v, &ManufacturedProblem).unwrap();
        let expected = PI * PI / 2.0;
        assert!((dot(&f, &u) - expected).abs() < 0.01 * expected);
        let zero = assemble_load(&HomogeneousProblem, &v).unwrap();
        assert!(zero.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn lambda_operator_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for pressure in [ElementKind::P0, ElementKind::P1] {
            let (v, q) = spaces(2, pressure);
            let sys = AssembledSystem::assemble(&v, &q, &ManufacturedProblem).unwrap();
            for _ in 0..5 {
                let x = random_vec(v.dof_count(), &mut rng);
                assert_eq!(apply_lambda_operator(&sys, 0.0, &x).unwrap(), sys.a.mul_vec(&x));
                let lambda = 123.5;
                let lhs = dot(&x, &apply_lambda_operator(&sys, lambda, &x).unwrap());
                let bx = sys.b.mul_vec(&x);
                let penalty: f64 = bx.iter().zip(&sys.d).map(|(b, d)| b * b / d).sum();
                let rhs = dot(&x, &sys.a.mul_vec(&x)) + lambda * penalty;
                assert!((lhs - rhs).abs() <= 1e-13 * rhs.abs());
                assert!(penalty >= 0.0);

                let explicit = sys.lambda_matrix(lambda).unwrap().mul_vec(&x);
                let implicit = apply_lambda_operator(&sys, lambda, &x).unwrap();
                for (a, b) in explicit.iter().zip(&implicit) {
                    assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()));
                }
            }
            assert!(apply_lambda_operator(&sys, -1.0, &vec![0.0; v.dof_count()]).is_err());
            assert!(sys.lambda_matrix(-1.0).is_err());
        }
    }

    #[test]
    fn p0_projection_is_cell_mean_of_divergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (v, q) = spaces(2, ElementKind::P0);
        let b = assemble_div(&v, &q).unwrap();
        let (_, d) = assemble_pressure_mass(&q).unwrap();
        let rule = QuadratureRule::<f64>::degree5();
        let mesh = v.mesh();
        for _ in 0..10 {
            let w = random_vec(v.dof_count(), &mut rng);
            let bw = b.mul_vec(&w);
            for cell in 0..mesh.num_cells() {
                let geo = CellGeometry::new(mesh, cell);
                let dofs = v.cell_dofs(cell);
                let mean: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(l, wq)| {
                        let g = p2_gradients(*l, &geo.grad_lambda);
                        wq * (0..6).map(|a| w[dofs[2 * a]] * g[a][0] + w[dofs[2 * a + 1]] * g[a][1]).sum::<f64>()
                    })
                    .sum();
                assert!((bw[cell] / d[cell] - mean).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_wrong_spaces() {
        let (v, q) = spaces(1, ElementKind::P0);
        assert!(matches!(assemble_epsilon_stiffness(&q), Err(Error::UnsupportedElement(_))));
        assert!(assemble_div(&q, &v).is_err());
        let (_, q2) = spaces(2, ElementKind::P0);
        assert_eq!(assemble_div(&v, &q2).unwrap_err(), Error::MeshMismatch);
    }
}
