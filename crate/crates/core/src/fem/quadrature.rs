//! Symmetric quadrature rules on triangles in barycentric coordinates.
//! Weights sum to one; multiply by the cell area.

use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct QuadratureRule<T> {
    pub points: Vec<[T; 3]>,
    pub weights: Vec<T>,
    pub degree: u32,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// 7-point rule, exact for polynomials of degree 5.
    pub fn degree5() -> Self {
        let s15 = T::lit(15.0).sqrt();
        let c21 = T::lit(21.0);
        let b1 = (T::lit(6.0) + s15) / c21;
        let b2 = (T::lit(6.0) - s15) / c21;
        let w1 = (T::lit(155.0) + s15) / T::lit(1200.0);
        let w2 = (T::lit(155.0) - s15) / T::lit(1200.0);
        let third = T::one() / T::lit(3.0);
        let mut rule = Self {
            points: vec![[third; 3]],
            weights: vec![T::lit(9.0) / T::lit(40.0)],
            degree: 5,
        };
        rule.push_orbit3(T::one() - b1 - b1, b1, w1);
        rule.push_orbit3(T::one() - b2 - b2, b2, w2);
        rule
    }

    /// 12-point rule, exact for polynomials of degree 6.
    pub fn degree6() -> Self {
        let mut rule = Self {
            points: Vec::with_capacity(12),
            weights: Vec::with_capacity(12),
            degree: 6,
        };
        rule.push_orbit3(
            T::lit(0.501426509658179),
            T::lit(0.249286745170910),
            T::lit(0.116786275726379),
        );
        rule.push_orbit3(
            T::lit(0.873821971016996),
            T::lit(0.063089014491502),
            T::lit(0.050844906370207),
        );
        let (a, b) = (T::lit(0.053145049844817), T::lit(0.310352451033784));
        let c = T::one() - a - b;
        let w = T::lit(0.082851075618374);
        for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            rule.points.push(p);
            rule.weights.push(w);
        }
        rule
    }

    fn push_orbit3(&mut self, a: T, b: T, w: T) {
        for p in [[a, b, b], [b, a, b], [b, b, a]] {
            self.points.push(p);
            self.weights.push(w);
        }
    }
}
