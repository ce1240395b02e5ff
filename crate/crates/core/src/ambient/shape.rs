//! Shape operator fields over a chart.
//!
//! Matrices hold frame components: column `k` is `A(e_k)` expanded in
//! `(e1, e2)`, so `a[(j, k)]` is the `e_j` component of `A(e_k)`.

use std::sync::Arc;

use nalgebra::Matrix2;

use crate::chart::{fd, Domain};

pub const SHAPE_FD_STEP: f64 = 1e-3;

/// Shape operator with its coordinate partials at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeJet {
    pub a: Matrix2<f64>,
    pub du: Matrix2<f64>,
    pub dv: Matrix2<f64>,
}

/// `H = -1/2 tr A`.
pub fn mean_curvature(a: &Matrix2<f64>) -> f64 {
    -0.5 * a.trace()
}

/// Lowered form `A_bil[k][j] = g(A e_k, e_j) = eps_j a[(j, k)]`.
pub fn lowered(a: &Matrix2<f64>, eps: [i8; 2]) -> Matrix2<f64> {
    Matrix2::from_fn(|k, j| eps[j] as f64 * a[(j, k)])
}

/// Inverse of [`lowered`].
pub fn raised(bil: &Matrix2<f64>, eps: [i8; 2]) -> Matrix2<f64> {
    Matrix2::from_fn(|j, k| eps[j] as f64 * bil[(k, j)])
}

/// A field of shape operators in the orthonormal frame of a chart.
pub trait ShapeField: Send + Sync {
    fn at(&self, u: f64, v: f64) -> Matrix2<f64>;

    /// Value with coordinate partials; fourth-order differences by default.
    fn jet(&self, u: f64, v: f64) -> ShapeJet {
        let h = SHAPE_FD_STEP;
        ShapeJet {
            a: self.at(u, v),
            du: central_mat(|x| self.at(x, v), u, h),
            dv: central_mat(|y| self.at(u, y), v, h),
        }
    }
}

fn central_mat(f: impl Fn(f64) -> Matrix2<f64>, x: f64, h: f64) -> Matrix2<f64> {
    Matrix2::from_fn(|r, c| fd::central(|t| f(t)[(r, c)], x, h))
}

/// Shape field given by a closure.
#[derive(Clone)]
pub struct ClosedShape {
    f: Arc<dyn Fn(f64, f64) -> Matrix2<f64> + Send + Sync>,
}

impl ClosedShape {
    pub fn new(f: impl Fn(f64, f64) -> Matrix2<f64> + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn constant(a: Matrix2<f64>) -> Self {
        Self::new(move |_, _| a)
    }
}

impl ShapeField for ClosedShape {
    fn at(&self, u: f64, v: f64) -> Matrix2<f64> {
        (self.f)(u, v)
    }
}

/// Relative perturbation `(1 + delta) A`.
///
/// Totally geodesic bases get the additive term `delta (1 + (u - u0)/L) Id`
/// instead, which is not Codazzi because it varies along `u`.
#[derive(Clone)]
pub struct PerturbedShape {
    pub base: Arc<dyn ShapeField>,
    pub delta: f64,
    pub domain: Domain,
    additive: bool,
}

impl PerturbedShape {
    pub fn new(base: Arc<dyn ShapeField>, delta: f64, domain: Domain) -> Self {
        let (uc, vc) = domain.center();
        let additive = base.at(uc, vc).abs().max() < 1e-12;
        Self {
            base,
            delta,
            domain,
            additive,
        }
    }
}

impl ShapeField for PerturbedShape {
    fn at(&self, u: f64, v: f64) -> Matrix2<f64> {
        let a = self.base.at(u, v);
        if self.additive {
            let len = self.domain.u1 - self.domain.u0;
            a + Matrix2::identity() * (self.delta * (1.0 + (u - self.domain.u0) / len))
        } else {
            a * (1.0 + self.delta)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowering_round_trips() {
        let a = Matrix2::new(1.0, 2.0, -3.0, 0.5);
        for eps in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
            assert_eq!(raised(&lowered(&a, eps), eps), a);
        }
    }

    #[test]
    fn default_jet_differentiates() {
        let s = ClosedShape::new(|u, v| Matrix2::new(u * u, v, 0.0, u * v));
        let j = s.jet(0.3, 0.7);
        assert!((j.du - Matrix2::new(0.6, 0.0, 0.0, 0.7)).abs().max() < 1e-12);
        assert!((j.dv - Matrix2::new(0.0, 1.0, 0.0, 0.3)).abs().max() < 1e-12);
    }

    #[test]
    fn perturbation_of_zero_is_additive() {
        let d = Domain::new(0.0, 2.0, 0.0, 1.0);
        let p = PerturbedShape::new(Arc::new(ClosedShape::constant(Matrix2::zeros())), 0.01, d);
        assert!((p.at(2.0, 0.0)[(0, 0)] - 0.02).abs() < 1e-15);
        let q = PerturbedShape::new(Arc::new(ClosedShape::constant(-Matrix2::identity())), 0.01, d);
        assert!((q.at(1.0, 0.5)[(1, 1)] + 1.01).abs() < 1e-15);
    }
}
