//! Fourth-order finite-difference stencils.
//!
//! All stencils are applied to differences `f_k - f_ref`, so constant data
//! differentiate to exactly zero.

use std::ops::{Add, Mul, Sub};

/// Values that can be differentiated by the stencils.
pub trait Differentiable:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
}

impl Differentiable for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Differentiable for crate::clifford::Spinor {
    fn zero() -> Self {
        crate::clifford::Spinor::ZERO
    }
}

impl Differentiable for crate::clifford::C64 {
    fn zero() -> Self {
        crate::clifford::ZERO
    }
}

const CENTRAL: [(isize, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
const FORWARD0: [(isize, f64); 4] = [(1, 48.0), (2, -36.0), (3, 16.0), (4, -3.0)];
const FORWARD1: [(isize, f64); 4] = [(-1, -3.0), (1, 18.0), (2, -6.0), (3, 1.0)];
// the reference node of FORWARD1 carries weight -10, recovered through the differences

/// Fourth-order first derivative at index `i` of `n` equispaced samples.
///
/// Uses the centred stencil in the interior and one-sided stencils within two
/// nodes of either end. Requires `n >= 5`.
pub fn derivative<T: Differentiable>(f: impl Fn(usize) -> T, n: usize, i: usize, h: f64) -> T {
    debug_assert!(n >= 5 && i < n);
    let (stencil, sign): (&[(isize, f64)], f64) = if i >= 2 && i + 2 < n {
        (&CENTRAL, 1.0)
    } else if i == 0 {
        (&FORWARD0, 1.0)
    } else if i == 1 {
        (&FORWARD1, 1.0)
    } else if i + 1 == n {
        (&FORWARD0, -1.0)
    } else {
        (&FORWARD1, -1.0)
    };
    let f0 = f(i);
    let mut acc = T::zero();
    for &(off, w) in stencil {
        let k = (i as isize + sign as isize * off) as usize;
        acc = acc + (f(k) - f0) * w;
    }
    acc * (sign / (12.0 * h))
}

/// Fourth-order central first derivative of a function of one real variable.
pub fn central<T: Differentiable>(f: impl Fn(f64) -> T, x: f64, h: f64) -> T {
    let (m2, m1, p1, p2) = (f(x - 2.0 * h), f(x - h), f(x + h), f(x + 2.0 * h));
    ((m2 - p2) + (p1 - m1) * 8.0) * (1.0 / (12.0 * h))
}

/// Fourth-order central second derivative.
pub fn central2<T: Differentiable>(f: impl Fn(f64) -> T, x: f64, h: f64) -> T {
    let f0 = f(x);
    let (m2, m1, p1, p2) = (f(x - 2.0 * h), f(x - h), f(x + h), f(x + 2.0 * h));
    ((m1 - f0) * 16.0 + (p1 - f0) * 16.0 - (m2 - f0) - (p2 - f0)) * (1.0 / (12.0 * h * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_differentiate_to_zero() {
        for i in 0..7 {
            assert_eq!(derivative(|_| 0.1f64, 7, i, 0.3), 0.0);
        }
    }

    #[test]
    fn quartics_are_exact() {
        let h = 0.25;
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x - 0.3 * x.powi(4);
        let dp = |x: f64| -2.0 + 1.5 * x * x - 1.2 * x.powi(3);
        let n = 9;
        for i in 0..n {
            let d = derivative(|k| p(k as f64 * h), n, i, h);
            assert!((d - dp(i as f64 * h)).abs() < 1e-12, "node {i}: {d}");
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |h: f64| (central(f64::sin, 0.7, h) - 0.7f64.cos()).abs();
        let slope = (err(0.1) / err(0.05)).log2();
        assert!((slope - 4.0).abs() < 0.2, "slope {slope}");
        let err2 = |h: f64| (central2(f64::sin, 0.7, h) + 0.7f64.sin()).abs();
        let slope2 = (err2(0.1) / err2(0.05)).log2();
        assert!((slope2 - 4.0).abs() < 0.3, "slope {slope2}");
    }
}
