//! Affine cell geometry and Lagrange shape functions in barycentric form.

use crate::mesh::Mesh;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct CellGeometry<T> {
    pub coords: [[T; 2]; 3],
    pub area: T,
    /// Constant gradients of the barycentric coordinates.
    pub grad_lambda: [[T; 2]; 3],
}

impl<T: Real> CellGeometry<T> {
    pub fn new(mesh: &Mesh<T>, cell: usize) -> Self {
        let p = mesh.cell_coordinates(cell);
        let two_area = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
            - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let mut g = [[T::zero(); 2]; 3];
        for (i, gi) in g.iter_mut().enumerate() {
            let j = (i + 1) % 3;
            let k = (i + 2) % 3;
            *gi = [(p[j][1] - p[k][1]) / two_area, (p[k][0] - p[j][0]) / two_area];
        }
        Self {
            coords: p,
            area: two_area / T::lit(2.0),
            grad_lambda: g,
        }
    }

    pub fn point(&self, l: [T; 3]) -> [T; 2] {
        let p = &self.coords;
        [
            l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
            l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
        ]
    }
}

/// P2 basis values: vertex functions first, then edge `k` (opposite vertex `k`).
pub fn p2_values<T: Real>(l: [T; 3]) -> [T; 6] {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    [
        l[0] * (two * l[0] - T::one()),
        l[1] * (two * l[1] - T::one()),
        l[2] * (two * l[2] - T::one()),
        four * l[1] * l[2],
        four * l[2] * l[0],
        four * l[0] * l[1],
    ]
}

pub fn p2_gradients<T: Real>(l: [T; 3], g: &[[T; 2]; 3]) -> [[T; 2]; 6] {
    let four = T::lit(4.0);
    let mut out = [[T::zero(); 2]; 6];
    for i in 0..3 {
        let s = four * l[i] - T::one();
        out[i] = [s * g[i][0], s * g[i][1]];
        let j = (i + 1) % 3;
        let m = (i + 2) % 3;
        out[3 + i] = [
            four * (l[j] * g[m][0] + l[m] * g[j][0]),
            four * (l[j] * g[m][1] + l[m] * g[j][1]),
        ];
    }
    out
}
