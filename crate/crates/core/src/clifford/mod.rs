//! Concrete 2x2 complex models of the Clifford algebras Cl(p,q) for surface
//! signatures (2,0), (1,1), (0,2) and ambient signatures with p+q = 3.
//!
//! Surface representations are normalized so that the complex volume element
//! `omega = i^(q+1) g1 g2` is `diag(1, -1)`: the first spinor component spans
//! the `+1` eigenbundle and the second spans the `-1` eigenbundle.

pub mod audit;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

/// `i^k` for any integer `k`.
pub fn i_pow(k: i32) -> C64 {
    match k.rem_euclid(4) {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn identity() -> Mat2 {
    Mat2::identity()
}

/// Largest entry modulus of a 2x2 complex matrix.
pub fn max_abs(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Metric signature together with the ordered frame signs `eps_j = g(e_j, e_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignaturePair {
    pub p: usize,
    pub q: usize,
    pub eps: Vec<i8>,
}

impl SignaturePair {
    /// Signature with the given ordered frame signs.
    pub fn from_signs(eps: &[i8]) -> Result<Self> {
        if !(eps.len() == 2 || eps.len() == 3) {
            return Err(Error::InvalidSignature {
                p: eps.iter().filter(|&&e| e > 0).count(),
                q: eps.iter().filter(|&&e| e < 0).count(),
                reason: format!("p+q must be 2 or 3, got {}", eps.len()),
            });
        }
        if eps.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::InvalidSignature {
                p: 0,
                q: 0,
                reason: "frame signs must be +1 or -1".into(),
            });
        }
        let p = eps.iter().filter(|&&e| e > 0).count();
        Ok(Self {
            p,
            q: eps.len() - p,
            eps: eps.to_vec(),
        })
    }

    /// Canonical ordering: all positive directions first.
    pub fn canonical(p: usize, q: usize) -> Result<Self> {
        let mut eps = vec![1i8; p];
        eps.extend(std::iter::repeat(-1i8).take(q));
        Self::from_signs(&eps)
    }

    pub fn dim(&self) -> usize {
        self.eps.len()
    }

    pub fn is_surface(&self) -> bool {
        self.dim() == 2
    }

    /// Product of the surface frame signs, `eps_1 eps_2`.
    pub fn eps_product(&self) -> f64 {
        self.eps.iter().map(|&e| e as f64).product()
    }
}

impl fmt::Display for SignaturePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Sign conventions: `v.v = sigma g(v,v) Id` and `<X.phi, psi> = tau <phi, X.psi>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordConvention {
    pub sigma: i8,
    pub tau: i8,
}

impl CliffordConvention {
    /// The convention selected by [`audit::convention_audit`].
    pub const FROZEN: CliffordConvention = CliffordConvention {
        sigma: -1,
        tau: -1,
    };

    pub fn new(sigma: i8, tau: i8) -> Result<Self> {
        if (sigma != 1 && sigma != -1) || (tau != 1 && tau != -1) {
            return Err(Error::Parse(format!(
                "convention signs must be +-1, got sigma={sigma}, tau={tau}"
            )));
        }
        Ok(Self { sigma, tau })
    }

    pub fn candidates() -> [CliffordConvention; 4] {
        [
            CliffordConvention { sigma: 1, tau: 1 },
            CliffordConvention { sigma: 1, tau: -1 },
            CliffordConvention { sigma: -1, tau: 1 },
            CliffordConvention { sigma: -1, tau: -1 },
        ]
    }
}

impl Default for CliffordConvention {
    fn default() -> Self {
        Self::FROZEN
    }
}

/// Spinor components in the omega-eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spinor {
    pub plus: C64,
    pub minus: C64,
}

impl Spinor {
    pub const ZERO: Spinor = Spinor {
        plus: ZERO,
        minus: ZERO,
    };

    pub fn new(plus: C64, minus: C64) -> Self {
        Self { plus, minus }
    }

    pub fn real(plus: f64, minus: f64) -> Self {
        Self::new(C64::new(plus, 0.0), C64::new(minus, 0.0))
    }

    pub fn as_vector(&self) -> Vector2<C64> {
        Vector2::new(self.plus, self.minus)
    }

    pub fn from_vector(v: &Vector2<C64>) -> Self {
        Self::new(v[0], v[1])
    }

    /// Euclidean component norm, independent of the spinor pairing.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.plus.norm_sqr() + self.minus.norm_sqr()
    }

    pub fn plus_part(&self) -> Spinor {
        Spinor::new(self.plus, ZERO)
    }

    pub fn minus_part(&self) -> Spinor {
        Spinor::new(ZERO, self.minus)
    }

    pub fn is_finite(&self) -> bool {
        self.plus.is_finite() && self.minus.is_finite()
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, o: Spinor) -> Spinor {
        Spinor::new(self.plus + o.plus, self.minus + o.minus)
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, o: Spinor) -> Spinor {
        Spinor::new(self.plus - o.plus, self.minus - o.minus)
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor::new(-self.plus, -self.minus)
    }
}

impl Mul<C64> for Spinor {
    type Output = Spinor;
    fn mul(self, z: C64) -> Spinor {
        Spinor::new(self.plus * z, self.minus * z)
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    fn mul(self, x: f64) -> Spinor {
        Spinor::new(self.plus * x, self.minus * x)
    }
}

impl Mul<Spinor> for Mat2 {
    type Output = Spinor;
    fn mul(self, s: Spinor) -> Spinor {
        Spinor::from_vector(&(self * s.as_vector()))
    }
}

impl Mul<Spinor> for &Mat2 {
    type Output = Spinor;
    fn mul(self, s: Spinor) -> Spinor {
        Spinor::from_vector(&(self * s.as_vector()))
    }
}

/// Spacelike (`epsilon = 1`) or timelike (`epsilon = i`) immersion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Epsilon {
    Spacelike,
    Timelike,
}

impl Epsilon {
    pub fn value(self) -> C64 {
        match self {
            Epsilon::Spacelike => ONE,
            Epsilon::Timelike => I,
        }
    }

    /// `epsilon^2 = g(nu, nu)`.
    pub fn square(self) -> f64 {
        match self {
            Epsilon::Spacelike => 1.0,
            Epsilon::Timelike => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Epsilon::Spacelike => "1",
            Epsilon::Timelike => "i",
        }
    }
}

/// Immersion type, Killing number and ambient curvature `kappa = 4 lambda^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImmersionContext {
    pub epsilon: Epsilon,
    pub lambda: C64,
    pub kappa: f64,
}

impl ImmersionContext {
    pub fn new(epsilon: Epsilon, lambda: C64) -> Result<Self> {
        if lambda.re != 0.0 && lambda.im != 0.0 {
            return Err(Error::InvalidContext(format!(
                "lambda must be real or purely imaginary, got {lambda}"
            )));
        }
        let kappa = 4.0 * (lambda * lambda).re;
        Ok(Self {
            epsilon,
            lambda,
            kappa,
        })
    }

    pub fn flat(epsilon: Epsilon) -> Self {
        Self {
            epsilon,
            lambda: ZERO,
            kappa: 0.0,
        }
    }

    pub fn eps(&self) -> C64 {
        self.epsilon.value()
    }

    /// `i lambda / epsilon`, whose reality decides the definite-signature case split.
    pub fn i_lambda_over_eps(&self) -> C64 {
        I * self.lambda / self.eps()
    }

    /// `epsilon * lambda`.
    pub fn eps_lambda(&self) -> C64 {
        self.eps() * self.lambda
    }

    /// Parameter of the norm assumptions, `eta = -epsilon^2 lambda`.
    pub fn norm_eta(&self) -> C64 {
        self.lambda * (-self.epsilon.square())
    }

    /// Context of the companion equation (`A -> -A`, `lambda -> -lambda`).
    pub fn negated(&self) -> Self {
        Self {
            lambda: -self.lambda,
            ..*self
        }
    }
}

/// Gamma matrices, volume element and spinor pairing for one signature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaRep {
    pub signature: SignaturePair,
    pub convention: CliffordConvention,
    #[serde(skip)]
    pub gamma: Vec<Mat2>,
    #[serde(skip)]
    pub omega: Mat2,
    /// Hermitian `h` with `<phi, psi> = phi^H h psi`; surface representations only.
    #[serde(skip)]
    pub pairing: Option<Mat2>,
}

/// Builds the representation of `signature` under `convention`.
pub fn build_rep(signature: &SignaturePair, convention: CliffordConvention) -> Result<GammaRep> {
    let no_rep = |reason: &str| Error::NoRepresentation {
        p: signature.p,
        q: signature.q,
        sigma: convention.sigma,
        tau: convention.tau,
        reason: reason.to_string(),
    };
    let sigma = convention.sigma as f64;
    let coeff = |e: i8| {
        if sigma * e as f64 > 0.0 {
            ONE
        } else {
            I
        }
    };
    match signature.dim() {
        2 => {
            let (e1, e2) = (signature.eps[0], signature.eps[1]);
            let mut gamma = if signature.q == 1 {
                // square -1 directions take i*sigma_x, square +1 take sigma_y
                signature
                    .eps
                    .iter()
                    .map(|&e| {
                        if sigma * e as f64 > 0.0 {
                            pauli_y()
                        } else {
                            pauli_x() * I
                        }
                    })
                    .collect::<Vec<_>>()
            } else {
                vec![pauli_x() * coeff(e1), pauli_y() * coeff(e2)]
            };
            let mut omega = gamma[0] * gamma[1] * i_pow(signature.q as i32 + 1);
            if max_abs(&(omega + pauli_z())) < 1e-14 {
                gamma[1] = -gamma[1];
                omega = -omega;
            }
            if max_abs(&(omega - pauli_z())) > 1e-14 {
                return Err(no_rep("volume element is not diag(1,-1)"));
            }
            let pairing = solve_pairing(&gamma, convention.tau)
                .ok_or_else(|| no_rep("no unique Hermitian pairing for the adjointness sign"))?;
            let diagonal = pairing[(0, 1)].norm() < 1e-14;
            match (signature.p, signature.q) {
                (2, 0) if max_abs(&(pairing - identity())) > 1e-14 => {
                    return Err(no_rep("pairing is not definite in signature (2,0)"))
                }
                (1, 1) if diagonal => {
                    return Err(no_rep("pairing must couple the half-spinor bundles in (1,1)"))
                }
                (0, 2) if !diagonal => {
                    return Err(no_rep("pairing must keep half-spinors orthogonal in (0,2)"))
                }
                _ => {}
            }
            Ok(GammaRep {
                signature: signature.clone(),
                convention,
                gamma,
                omega,
                pairing: Some(pairing),
            })
        }
        3 => {
            let s = signature.q as i32;
            let paulis = [pauli_x(), pauli_y(), pauli_z()];
            let mut gamma: Vec<Mat2> = signature
                .eps
                .iter()
                .zip(paulis.iter())
                .map(|(&e, p)| p * coeff(e))
                .collect();
            let mut omega = gamma[0] * gamma[1] * gamma[2] * (-i_pow(s));
            if max_abs(&(omega + identity())) < 1e-14 {
                gamma[2] = -gamma[2];
                omega = -omega;
            }
            if max_abs(&(omega - identity())) > 1e-14 {
                return Err(no_rep("ambient volume element does not square to one"));
            }
            Ok(GammaRep {
                signature: signature.clone(),
                convention,
                gamma,
                omega,
                pairing: None,
            })
        }
        _ => Err(Error::InvalidSignature {
            p: signature.p,
            q: signature.q,
            reason: "p+q must be 2 or 3".into(),
        }),
    }
}

/// Unique (up to scale) Hermitian `h` with `g^H h = tau h g` for every gamma.
///
/// Every gamma is a scalar times a Pauli matrix, so each Pauli basis element of
/// `h` either satisfies all constraints on its own or none of them.
fn solve_pairing(gamma: &[Mat2], tau: i8) -> Option<Mat2> {
    let tau = tau as f64;
    let basis = [identity(), pauli_x(), pauli_y(), pauli_z()];
    let solutions: Vec<Mat2> = basis
        .into_iter()
        .filter(|h| {
            gamma
                .iter()
                .all(|g| max_abs(&(g.adjoint() * h - h * g * C64::from(tau))) < 1e-14)
        })
        .collect();
    match solutions.as_slice() {
        [h] => Some(*h),
        _ => None,
    }
}

impl GammaRep {
    /// Frozen-convention representation of a surface or ambient signature.
    pub fn frozen(signature: &SignaturePair) -> Result<Self> {
        build_rep(signature, CliffordConvention::FROZEN)
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn sigma(&self) -> f64 {
        self.convention.sigma as f64
    }

    /// Clifford matrix `sum_j v_j gamma_j` for frame components `v`.
    pub fn vector_matrix(&self, v: &[f64]) -> Result<Mat2> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(self.vec_mat(v))
    }

    /// Unchecked variant of [`Self::vector_matrix`] for internal hot paths.
    pub(crate) fn vec_mat(&self, v: &[f64]) -> Mat2 {
        v.iter()
            .zip(&self.gamma)
            .fold(Mat2::zeros(), |acc, (&c, g)| acc + g * C64::from(c))
    }

    /// `gamma_1 gamma_2` (surface) as a matrix.
    pub fn e1e2(&self) -> Mat2 {
        self.gamma[0] * self.gamma[1]
    }

    pub fn pairing(&self) -> Mat2 {
        self.pairing.unwrap_or_else(identity)
    }

    /// Residual of every algebraic invariant of the representation.
    pub fn invariant_residual(&self) -> f64 {
        let sigma = self.sigma();
        let mut r: f64 = 0.0;
        for (i, gi) in self.gamma.iter().enumerate() {
            for (j, gj) in self.gamma.iter().enumerate() {
                let target = if i == j {
                    identity() * C64::from(2.0 * sigma * self.signature.eps[i] as f64)
                } else {
                    Mat2::zeros()
                };
                r = r.max(max_abs(&(gi * gj + gj * gi - target)));
            }
        }
        r = r.max(max_abs(&(self.omega * self.omega - identity())));
        if let Some(h) = self.pairing {
            let tau = C64::from(self.convention.tau as f64);
            r = r.max(max_abs(&(h.adjoint() - h)));
            for g in &self.gamma {
                r = r.max(max_abs(&(g.adjoint() * h - h * g * tau)));
            }
        }
        r
    }
}

/// `v . phi` for frame components `v`.
pub fn clifford_mul(rep: &GammaRep, v: &[f64], phi: Spinor) -> Result<Spinor> {
    Ok(rep.vector_matrix(v)? * phi)
}

/// Half-spinor splitting `(phi+, phi-)` with `omega phi^(+-) = +-phi^(+-)`.
pub fn split_spinor(rep: &GammaRep, phi: Spinor) -> (Spinor, Spinor) {
    let projector_plus = (identity() + rep.omega) * C64::from(0.5);
    let projector_minus = (identity() - rep.omega) * C64::from(0.5);
    (projector_plus * phi, projector_minus * phi)
}

/// `phi-bar = omega . phi = phi+ - phi-`.
pub fn bar_conjugate(rep: &GammaRep, phi: Spinor) -> Spinor {
    rep.omega * phi
}

/// Spinor pairing `<phi, psi> = phi^H h psi`, conjugate-linear in the first slot.
pub fn inner_product(rep: &GammaRep, phi: Spinor, psi: Spinor) -> C64 {
    let h = rep.pairing();
    (phi.as_vector().adjoint() * (h * psi.as_vector()))[(0, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surface(eps: &[i8]) -> GammaRep {
        GammaRep::frozen(&SignaturePair::from_signs(eps).unwrap()).unwrap()
    }

    #[test]
    fn riemannian_rep_squares() {
        let rep = build_rep(
            &SignaturePair::canonical(2, 0).unwrap(),
            CliffordConvention { sigma: 1, tau: 1 },
        )
        .unwrap();
        for g in &rep.gamma {
            assert!(max_abs(&(g * g - identity())) < 1e-15);
        }
        assert!(max_abs(&(rep.omega - pauli_z())) < 1e-15);
    }

    #[test]
    fn lorentzian_squares_follow_frame_signs() {
        for sigma in [1i8, -1] {
            let conv = CliffordConvention { sigma, tau: -1 };
            let sig = SignaturePair::canonical(1, 1).unwrap();
            let rep = build_rep(&sig, conv).or_else(|_| {
                build_rep(&sig, CliffordConvention { sigma, tau: 1 })
            });
            let rep = rep.unwrap();
            let s = C64::from(sigma as f64);
            assert!(max_abs(&(rep.gamma[0] * rep.gamma[0] - identity() * s)) < 1e-15);
            assert!(max_abs(&(rep.gamma[1] * rep.gamma[1] + identity() * s)) < 1e-15);
        }
    }

    #[test]
    fn ambient_volume_element() {
        let rep = GammaRep::frozen(&SignaturePair::canonical(2, 1).unwrap()).unwrap();
        let omega = rep.gamma[0] * rep.gamma[1] * rep.gamma[2] * (-I);
        assert!(max_abs(&(omega - identity())) < 1e-15);
        assert!(max_abs(&(rep.omega * rep.omega - identity())) < 1e-15);
        assert!(rep.invariant_residual() < 1e-15);
    }

    #[test]
    fn ambient_requires_negative_sigma() {
        let sig = SignaturePair::canonical(3, 0).unwrap();
        assert!(matches!(
            build_rep(&sig, CliffordConvention { sigma: 1, tau: 1 }),
            Err(Error::NoRepresentation { .. })
        ));
    }

    #[test]
    fn all_surface_reps_satisfy_invariants() {
        for eps in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
            let rep = surface(&eps);
            assert!(rep.invariant_residual() < 1e-15, "{eps:?}");
            assert!(max_abs(&(rep.omega - pauli_z())) < 1e-15);
        }
    }

    #[test]
    fn build_rep_is_deterministic() {
        let sig = SignaturePair::from_signs(&[-1, 1]).unwrap();
        assert_eq!(GammaRep::frozen(&sig).unwrap(), GammaRep::frozen(&sig).unwrap());
    }

    #[test]
    fn clifford_square_and_anticommutation() {
        let rep = surface(&[1, -1]);
        let phi = Spinor::new(C64::new(0.3, -1.2), C64::new(0.7, 0.1));
        let e1 = [1.0, 0.0];
        let e2 = [0.0, 1.0];
        let twice = clifford_mul(&rep, &e1, clifford_mul(&rep, &e1, phi).unwrap()).unwrap();
        assert!((twice - phi * (rep.sigma() * 1.0)).norm() < 1e-15);
        let a = clifford_mul(&rep, &e1, clifford_mul(&rep, &e2, phi).unwrap()).unwrap();
        let b = clifford_mul(&rep, &e2, clifford_mul(&rep, &e1, phi).unwrap()).unwrap();
        assert!((a + b).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let rep = surface(&[1, 1]);
        assert!(matches!(
            clifford_mul(&rep, &[1.0, 0.0, 0.0], Spinor::real(1.0, 0.0)),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn e1e2_is_minus_i_bar_in_riemannian_signature() {
        let rep = surface(&[1, 1]);
        let phi = Spinor::new(C64::new(0.4, 0.2), C64::new(-1.0, 0.5));
        let lhs = rep.e1e2() * phi;
        let rhs = bar_conjugate(&rep, phi) * (-I);
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn splitting_and_bar() {
        let rep = surface(&[1, 1]);
        let (p, m) = split_spinor(&rep, Spinor::real(1.0, 0.0));
        assert_eq!(p, Spinor::real(1.0, 0.0));
        assert_eq!(m.norm(), 0.0);
        assert_eq!(
            bar_conjugate(&rep, Spinor::real(0.0, 1.0)),
            Spinor::real(0.0, -1.0)
        );
    }

    #[test]
    fn lorentzian_pairing_is_cross_block() {
        let rep = surface(&[1, -1]);
        let phi = Spinor::real(1.0, 0.0);
        let psi = Spinor::real(0.0, 1.0);
        assert!(inner_product(&rep, phi, psi).norm() > 0.5);
        assert_eq!(inner_product(&rep, phi, phi).norm(), 0.0);
    }

    #[test]
    fn riemannian_pairing_is_definite() {
        let rep = surface(&[1, 1]);
        let phi = Spinor::new(C64::new(0.5, 0.5), C64::new(-2.0, 0.0));
        let n = inner_product(&rep, phi, phi);
        assert!((n.re - phi.norm_sqr()).abs() < 1e-15 && n.im == 0.0);
    }

    #[test]
    fn real_part_of_e1e2_pairing_vanishes() {
        for eps in [[1, 1], [1, -1], [-1, -1]] {
            let rep = surface(&eps);
            let phi = Spinor::new(C64::new(0.3, 0.9), C64::new(-0.4, 0.25));
            let z = inner_product(&rep, phi, rep.e1e2() * phi);
            assert!(z.re.abs() < 1e-15, "{eps:?}: {z}");
        }
    }

    #[test]
    fn context_rejects_complex_lambda() {
        assert!(ImmersionContext::new(Epsilon::Spacelike, C64::new(0.5, 0.5)).is_err());
        let ctx = ImmersionContext::new(Epsilon::Spacelike, C64::new(0.0, 0.5)).unwrap();
        assert_eq!(ctx.kappa, -1.0);
    }
}
