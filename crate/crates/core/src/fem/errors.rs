//! Nodal interpolation and error norms against the exact displacement.

use super::basis::{p2_gradients, p2_values, CellGeometry};
use super::problem::ElasticityProblem;
use super::quadrature::QuadratureRule;
use super::{DofSpace, ElementKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms<T> {
    pub l2: T,
    pub h1_seminorm: T,
}

/// P2 nodal interpolant of the exact displacement (vertices and edge midpoints).
pub fn interpolate<T: Real, P: ElasticityProblem<T> + ?Sized>(
    v: &DofSpace<T>,
    problem: &P,
) -> Result<Vec<T>> {
    v.require(&[ElementKind::P2Vector])?;
    let nodes = v.dof_count() / 2;
    let mut out = Vec::with_capacity(v.dof_count());
    for s in 0..nodes {
        out.extend(problem.displacement(v.node_coordinates(s)));
    }
    Ok(out)
}

/// L2 and H1-seminorm errors of a full coefficient vector (lift included).
pub fn compute_errors<T: Real, P: ElasticityProblem<T> + ?Sized>(
    v: &DofSpace<T>,
    u_h: &[T],
    problem: &P,
) -> Result<ErrorNorms<T>> {
    v.require(&[ElementKind::P2Vector])?;
    if u_h.len() != v.dof_count() {
        return Err(Error::DimensionMismatch {
            expected: v.dof_count(),
            found: u_h.len(),
        });
    }
    let mesh = v.mesh();
    let rule = QuadratureRule::<T>::degree6();
    let (mut l2, mut h1) = (T::zero(), T::zero());
    for cell in 0..mesh.num_cells() {
        let geo = CellGeometry::new(mesh, cell);
        let dofs = v.cell_dofs(cell);
        for (l, &w) in rule.points.iter().zip(&rule.weights) {
            let x = geo.point(*l);
            let n = p2_values(*l);
            let g = p2_gradients(*l, &geo.grad_lambda);
            let u = problem.displacement(x);
            let gu = problem.displacement_gradient(x);
            let wa = w * geo.area;
            for c in 0..2 {
                let (mut val, mut grad) = (T::zero(), [T::zero(); 2]);
                for a in 0..6 {
                    let coef = u_h[dofs[2 * a + c]];
                    val += coef * n[a];
                    grad[0] += coef * g[a][0];
                    grad[1] += coef * g[a][1];
                }
                let e = u[c] - val;
                l2 += wa * e * e;
                for s in 0..2 {
                    let e = gu[c][s] - grad[s];
                    h1 += wa * e * e;
                }
            }
        }
    }
    Ok(ErrorNorms {
        l2: l2.sqrt(),
        h1_seminorm: h1.sqrt(),
    })
}
