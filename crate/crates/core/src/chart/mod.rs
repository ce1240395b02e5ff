//! Coordinate charts of pseudo-Riemannian surfaces: frames, Levi-Civita and
//! spin connections, curvature, spinor covariant derivative and Dirac operator.
//!
//! Curvature follows `R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]` and
//! `R_1212 = g(R(e1,e2)e2, e1)`; the round unit sphere has `R_1212 = 1`.

pub mod fd;
pub mod field;

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};

use crate::clifford::{GammaRep, SignaturePair, Spinor, C64};
use crate::error::{Error, Result};
pub use field::{
    AnalyticMetric, ClosedSpinorField, Domain, FdMetric, Grid, GridSpinorField, Location,
    MetricField, MetricJet, SpinorField, SpinorJet,
};

pub const DEFAULT_FRAME_TOL: f64 = 1e-8;
const VALIDATION_SAMPLES: usize = 17;

/// Christoffel symbols `gamma[l][i][j]` and their partials `dgamma[k][l][i][j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel {
    pub gamma: [[[f64; 2]; 2]; 2],
    pub dgamma: [[[[f64; 2]; 2]; 2]; 2],
}

impl Christoffel {
    pub fn from_jet(jet: &MetricJet) -> Result<Self> {
        let g = jet.matrix();
        let ginv = g
            .try_inverse()
            .ok_or_else(|| Error::InvalidContext("singular metric".into()))?;
        let dg = [jet.first(0), jet.first(1)];
        let dginv = [-ginv * dg[0] * ginv, -ginv * dg[1] * ginv];
        let s = |i: usize, j: usize, m: usize| dg[i][(j, m)] + dg[j][(i, m)] - dg[m][(i, j)];
        let ds = |k: usize, i: usize, j: usize, m: usize| {
            jet.second(k, i)[(j, m)] + jet.second(k, j)[(i, m)] - jet.second(k, m)[(i, j)]
        };
        let mut gamma = [[[0.0; 2]; 2]; 2];
        let mut dgamma = [[[[0.0; 2]; 2]; 2]; 2];
        for l in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    gamma[l][i][j] = 0.5 * (0..2).map(|m| ginv[(l, m)] * s(i, j, m)).sum::<f64>();
                    for k in 0..2 {
                        dgamma[k][l][i][j] = 0.5
                            * (0..2)
                                .map(|m| dginv[k][(l, m)] * s(i, j, m) + ginv[(l, m)] * ds(k, i, j, m))
                                .sum::<f64>();
                    }
                }
            }
        }
        Ok(Self { gamma, dgamma })
    }

    /// Coordinate Riemann tensor `R^l_{kij}` with `R(d_i, d_j) d_k = R^l_{kij} d_l`.
    pub fn riemann(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let g = &self.gamma;
        let mut r = self.dgamma[i][l][j][k] - self.dgamma[j][l][i][k];
        for m in 0..2 {
            r += g[l][i][m] * g[m][j][k] - g[l][j][m] * g[m][i][k];
        }
        r
    }
}

/// Orthonormal frame, connection and curvature data at one chart point.
///
/// Rows of `e` hold the coordinate components of `e1` and `e2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePoint {
    pub u: f64,
    pub v: f64,
    pub jet: MetricJet,
    pub e: Matrix2<f64>,
    pub de: [Matrix2<f64>; 2],
    pub eps: [i8; 2],
    pub christoffel: Christoffel,
    /// `omega12(e_k) = g(nabla_{e_k} e1, e2)`.
    pub omega: [f64; 2],
    pub r1212: f64,
}

impl FramePoint {
    pub fn new(u: f64, v: f64, jet: MetricJet, tol: f64) -> Result<Self> {
        let [g11, g12, g22] = jet.g;
        if !(g11.abs() >= tol) {
            return Err(Error::DegenerateChart {
                u,
                v,
                reason: format!("|g11| = {:e} below frame tolerance {tol:e}", g11.abs()),
            });
        }
        let d = g22 - g12 * g12 / g11;
        if !(d.abs() >= tol) {
            return Err(Error::DegenerateChart {
                u,
                v,
                reason: format!("metric determinant {:e} is degenerate", jet.det()),
            });
        }
        let (s1, sd) = (g11.signum(), d.signum());
        let a = g11.abs().powf(-0.5);
        let b = d.abs().powf(-0.5);
        let r = -g12 / g11;
        let e = Matrix2::new(a, 0.0, r * b, b);
        let de = [0usize, 1].map(|k| {
            let dg = if k == 0 { jet.du } else { jet.dv };
            let (d11, d12, d22) = (dg[0], dg[1], dg[2]);
            let da = -0.5 * a * a * a * s1 * d11;
            let dd = d22 - (2.0 * g12 * d12 * g11 - g12 * g12 * d11) / (g11 * g11);
            let db = -0.5 * b * b * b * sd * dd;
            let dr = -(d12 * g11 - g12 * d11) / (g11 * g11);
            Matrix2::new(da, 0.0, dr * b + r * db, db)
        });
        let christoffel = Christoffel::from_jet(&jet)?;
        let g = jet.matrix();
        let e1 = Vector2::new(e[(0, 0)], e[(0, 1)]);
        let e2 = Vector2::new(e[(1, 0)], e[(1, 1)]);
        let omega = [0usize, 1].map(|k| {
            let x = Vector2::new(e[(k, 0)], e[(k, 1)]);
            let mut w: Vector2<f64> = Vector2::zeros();
            for l in 0..2 {
                for j in 0..2 {
                    let mut t = de[j][(0, l)];
                    for i in 0..2 {
                        t += e1[i] * christoffel.gamma[l][j][i];
                    }
                    w[l] += x[j] * t;
                }
            }
            (w.transpose() * g * e2)[(0, 0)]
        });
        let rc: f64 = (0..2)
            .map(|l| g[(0, l)] * christoffel.riemann(l, 1, 0, 1))
            .sum();
        let det_e = a * b;
        Ok(Self {
            u,
            v,
            jet,
            e,
            de,
            eps: [s1 as i8, sd as i8],
            christoffel,
            omega,
            r1212: det_e * det_e * rc,
        })
    }

    pub fn eps_f(&self, k: usize) -> f64 {
        self.eps[k] as f64
    }

    pub fn eps_product(&self) -> f64 {
        self.eps_f(0) * self.eps_f(1)
    }

    /// `omega12(d_u), omega12(d_v)`.
    pub fn omega_coord(&self) -> [f64; 2] {
        let inv = self.e.try_inverse().expect("frame is invertible");
        [0, 1].map(|i| inv[(i, 0)] * self.omega[0] + inv[(i, 1)] * self.omega[1])
    }

    /// Frame components of the coordinate vector `d_i`.
    pub fn coord_in_frame(&self, i: usize) -> [f64; 2] {
        let inv = self.e.try_inverse().expect("frame is invertible");
        [inv[(i, 0)], inv[(i, 1)]]
    }

    /// Largest deviation of `g(e_i, e_j)` from `eps_i delta_ij`.
    pub fn orthonormality_defect(&self) -> f64 {
        let m = self.e * self.jet.matrix() * self.e.transpose();
        let target = Matrix2::new(self.eps_f(0), 0.0, 0.0, self.eps_f(1));
        (m - target).abs().max()
    }

    /// Connection term `1/2 eps1 eps2 omega12(X) e1.e2` for frame components `x`.
    pub fn connection_matrix(&self, rep: &GammaRep, x: [f64; 2]) -> crate::clifford::Mat2 {
        let w = x[0] * self.omega[0] + x[1] * self.omega[1];
        rep.e1e2() * C64::from(0.5 * self.eps_product() * w)
    }

    /// `nabla_{e_k} phi` from coordinate partials of `phi`.
    pub fn covariant(&self, rep: &GammaRep, jet: &SpinorJet, k: usize) -> Spinor {
        let mut x = [0.0; 2];
        x[k] = 1.0;
        jet.du * self.e[(k, 0)] + jet.dv * self.e[(k, 1)] + self.connection_matrix(rep, x) * jet.value
    }

    /// `D phi = sum_j eps_j e_j . nabla_{e_j} phi`.
    pub fn dirac(&self, rep: &GammaRep, jet: &SpinorJet) -> Spinor {
        (0..2).fold(Spinor::ZERO, |acc, k| {
            acc + (rep.gamma[k] * self.covariant(rep, jet, k)) * self.eps_f(k)
        })
    }
}

/// Chart domain with metric and signature.
#[derive(Clone)]
pub struct SurfacePatch {
    pub domain: Domain,
    pub metric: Arc<dyn MetricField>,
    pub signature: SignaturePair,
    pub frame_tol: f64,
}

impl std::fmt::Debug for SurfacePatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SurfacePatch")
            .field("domain", &self.domain)
            .field("signature", &self.signature)
            .finish()
    }
}

impl SurfacePatch {
    /// Validates the chart on a sample lattice and fixes the frame sign order.
    ///
    /// `signature` is only compared up to ordering; the stored signature carries
    /// the frame signs actually produced by the chart.
    pub fn new(domain: Domain, metric: Arc<dyn MetricField>, signature: SignaturePair) -> Result<Self> {
        Self::with_tolerance(domain, metric, signature, DEFAULT_FRAME_TOL)
    }

    pub fn with_tolerance(
        domain: Domain,
        metric: Arc<dyn MetricField>,
        signature: SignaturePair,
        frame_tol: f64,
    ) -> Result<Self> {
        if !signature.is_surface() {
            return Err(Error::InvalidSignature {
                p: signature.p,
                q: signature.q,
                reason: "surface charts need p+q = 2".into(),
            });
        }
        let mut found: Option<[i8; 2]> = None;
        let n = VALIDATION_SAMPLES - 1;
        for a in 0..=n {
            for b in 0..=n {
                let u = domain.u0 + (domain.u1 - domain.u0) * a as f64 / n as f64;
                let v = domain.v0 + (domain.v1 - domain.v0) * b as f64 / n as f64;
                let fp = FramePoint::new(u, v, metric.jet(u, v), frame_tol)?;
                let p = fp.eps.iter().filter(|&&e| e > 0).count();
                let consistent = match found {
                    None => p == signature.p,
                    Some(eps) => eps == fp.eps,
                };
                if !consistent {
                    return Err(Error::SignatureMismatch {
                        u,
                        v,
                        p: signature.p,
                        q: signature.q,
                        eps1: fp.eps[0],
                        eps2: fp.eps[1],
                    });
                }
                found.get_or_insert(fp.eps);
            }
        }
        let eps = found.expect("at least one sample");
        Ok(Self {
            domain,
            metric,
            signature: SignaturePair::from_signs(&eps)?,
            frame_tol,
        })
    }

    pub fn frame_at(&self, u: f64, v: f64) -> Result<FramePoint> {
        FramePoint::new(u, v, self.metric.jet(u, v), self.frame_tol)
    }
}

/// Orthonormal frame over a patch together with its spinor representation.
#[derive(Debug, Clone)]
pub struct FrameField {
    pub patch: SurfacePatch,
    pub eps: [i8; 2],
    pub rep: GammaRep,
}

impl FrameField {
    pub fn at(&self, u: f64, v: f64) -> Result<FramePoint> {
        let fp = self.patch.frame_at(u, v)?;
        if fp.eps != self.eps {
            return Err(Error::SignatureMismatch {
                u,
                v,
                p: self.patch.signature.p,
                q: self.patch.signature.q,
                eps1: fp.eps[0],
                eps2: fp.eps[1],
            });
        }
        Ok(fp)
    }

    pub fn eps_f(&self, k: usize) -> f64 {
        self.eps[k] as f64
    }
}

/// Pseudo-Gram-Schmidt frame `e1 = d_u/sqrt|g11|`, `e2` the normalized complement.
pub fn orthonormal_frame(patch: &SurfacePatch) -> Result<FrameField> {
    let eps = [patch.signature.eps[0], patch.signature.eps[1]];
    Ok(FrameField {
        patch: patch.clone(),
        eps,
        rep: GammaRep::frozen(&patch.signature)?,
    })
}

pub fn christoffels(patch: &SurfacePatch, u: f64, v: f64) -> Result<Christoffel> {
    Ok(patch.frame_at(u, v)?.christoffel)
}

/// `R_1212 = g(R(e1,e2)e2, e1)`.
pub fn curvature_r1212(patch: &SurfacePatch, u: f64, v: f64) -> Result<f64> {
    Ok(patch.frame_at(u, v)?.r1212)
}

/// `omega12(e_k) = g(nabla_{e_k} e1, e2)` for frame index `k` in `{0, 1}`.
pub fn spin_connection(frame: &FrameField, k: usize, u: f64, v: f64) -> Result<f64> {
    if k > 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: k + 1,
        });
    }
    Ok(frame.at(u, v)?.omega[k])
}

fn check_rep(field: &dyn SpinorField, frame: &FrameField) -> Result<()> {
    if field.rep().signature.eps != frame.rep.signature.eps {
        return Err(Error::InvalidContext(format!(
            "spinor field built for frame signs {:?}, chart has {:?}",
            field.rep().signature.eps,
            frame.eps
        )));
    }
    Ok(())
}

/// `nabla_{e_k} phi` at a location of the field.
pub fn covariant_derivative(
    field: &dyn SpinorField,
    frame: &FrameField,
    k: usize,
    at: Location,
) -> Result<Spinor> {
    check_rep(field, frame)?;
    if k > 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: k + 1,
        });
    }
    let jet = field.jet(at)?;
    let fp = frame.at(jet.u, jet.v)?;
    Ok(fp.covariant(&frame.rep, &jet, k))
}

/// `D phi = sum_j eps_j e_j . nabla_{e_j} phi`.
pub fn dirac_apply(field: &dyn SpinorField, frame: &FrameField, at: Location) -> Result<Spinor> {
    check_rep(field, frame)?;
    let jet = field.jet(at)?;
    let fp = frame.at(jet.u, jet.v)?;
    Ok(fp.dirac(&frame.rep, &jet))
}

/// CSV dump with columns `u,v,g11,g12,g22,eps1,eps2,R1212`.
pub fn chart_csv(frame: &FrameField, grid: &Grid) -> Result<String> {
    let mut out = String::from("u,v,g11,g12,g22,eps1,eps2,R1212\n");
    for (i, j) in grid.nodes() {
        let (u, v) = grid.coords(i, j);
        let fp = frame.at(u, v)?;
        let _ = writeln!(
            out,
            "{u:.12e},{v:.12e},{:.12e},{:.12e},{:.12e},{},{},{:.12e}",
            fp.jet.g[0], fp.jet.g[1], fp.jet.g[2], fp.eps[0], fp.eps[1], fp.r1212
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sphere_jet(t: f64, _: f64) -> MetricJet {
        let (s, c) = t.sin_cos();
        MetricJet::diagonal(
            [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [s * s, 2.0 * s * c, 0.0, 2.0 * (c * c - s * s), 0.0, 0.0],
        )
    }

    fn de_sitter_jet(u: f64, _: f64) -> MetricJet {
        let (ch, sh) = (u.cosh(), u.sinh());
        MetricJet::diagonal(
            [-1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [ch * ch, 2.0 * sh * ch, 0.0, 2.0 * (ch * ch + sh * sh), 0.0, 0.0],
        )
    }

    fn patch(f: fn(f64, f64) -> MetricJet, d: Domain, p: usize, q: usize) -> SurfacePatch {
        SurfacePatch::new(
            d,
            Arc::new(AnalyticMetric::new(f)),
            SignaturePair::canonical(p, q).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn flat_frame_is_coordinate_frame() {
        let p = patch(
            |_, _| MetricJet::diagonal([1.0, 0., 0., 0., 0., 0.], [1.0, 0., 0., 0., 0., 0.]),
            Domain::new(0.0, 1.0, 0.0, 1.0),
            2,
            0,
        );
        let fp = p.frame_at(0.3, 0.4).unwrap();
        assert_eq!(fp.e, Matrix2::identity());
        assert_eq!(fp.eps, [1, 1]);
        assert_eq!(fp.omega, [0.0, 0.0]);
        assert_eq!(fp.r1212, 0.0);
    }

    #[test]
    fn sphere_curvature_and_connection() {
        let p = patch(sphere_jet, Domain::new(0.6, 1.6, 0.0, 1.0), 2, 0);
        for t in [0.7, 1.0, 1.5] {
            let fp = p.frame_at(t, 0.2).unwrap();
            assert!((fp.r1212 - 1.0).abs() < 1e-13, "{}", fp.r1212);
            assert!((fp.e[(1, 1)] - 1.0 / t.sin()).abs() < 1e-14);
            assert!(fp.omega[0].abs() < 1e-14);
            assert!((fp.omega[1] - t.cos() / t.sin()).abs() < 1e-13);
            assert!(fp.orthonormality_defect() < 1e-14);
        }
    }

    #[test]
    fn de_sitter_frame_and_curvature() {
        let p = patch(de_sitter_jet, Domain::new(-0.5, 0.5, 0.0, 1.0), 1, 1);
        assert_eq!(p.signature.eps, vec![-1, 1]);
        let fp = p.frame_at(0.3, 0.0).unwrap();
        assert!((fp.e[(1, 1)] - 1.0 / 0.3f64.cosh()).abs() < 1e-14);
        assert!((fp.r1212 + 1.0).abs() < 1e-13, "{}", fp.r1212);
    }

    #[test]
    fn degenerate_chart_rejected() {
        let r = SurfacePatch::new(
            Domain::new(1.0, 0.0, 0.0, 1.0),
            Arc::new(AnalyticMetric::new(|u, _| {
                MetricJet::diagonal([u, 1.0, 0., 0., 0., 0.], [1.0, 0., 0., 0., 0., 0.])
            })),
            SignaturePair::canonical(2, 0).unwrap(),
        );
        assert!(matches!(r, Err(Error::DegenerateChart { .. })));
    }

    #[test]
    fn signature_mismatch_rejected() {
        let r = SurfacePatch::new(
            Domain::new(0.5, 1.5, 0.0, 1.0),
            Arc::new(AnalyticMetric::new(sphere_jet)),
            SignaturePair::canonical(1, 1).unwrap(),
        );
        assert!(matches!(r, Err(Error::SignatureMismatch { .. })));
    }

    #[test]
    fn constant_spinor_on_sphere_is_pure_connection() {
        let p = patch(sphere_jet, Domain::new(0.6, 1.6, 0.0, 1.0), 2, 0);
        let frame = orthonormal_frame(&p).unwrap();
        let phi = Spinor::real(0.6, 0.8);
        let field = ClosedSpinorField::new(frame.rep.clone(), 1e-3, move |_, _| phi);
        let t = 1.1;
        let got = covariant_derivative(&field, &frame, 1, Location::Point(t, 0.5)).unwrap();
        let want = frame.rep.e1e2() * phi * C64::from(0.5 * t.cos() / t.sin());
        assert!((got - want).norm() < 1e-13);
        let flat = covariant_derivative(&field, &frame, 0, Location::Point(t, 0.5)).unwrap();
        assert_eq!(flat.norm(), 0.0);
    }

    #[test]
    fn general_metric_matches_fd_metric() {
        let g = |u: f64, v: f64| [1.0 + 0.2 * u * v, 0.1 * (u + v).sin(), 2.0 + u * u * 0.3];
        let fdm = FdMetric::new(1e-3, g);
        let j = fdm.jet(0.4, 0.7);
        let fp = FramePoint::new(0.4, 0.7, j, 1e-8).unwrap();
        assert!(fp.orthonormality_defect() < 1e-13);
        // derivative of e against a finite difference of the frame itself
        let h = 1e-4;
        let e_at = |u: f64| FramePoint::new(u, 0.7, fdm.jet(u, 0.7), 1e-8).unwrap().e;
        let num = (e_at(0.4 + h) - e_at(0.4 - h)) / (2.0 * h);
        assert!((num - fp.de[0]).abs().max() < 1e-7);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = patch(sphere_jet, Domain::new(0.6, 1.6, 0.0, 1.0), 2, 0);
        let frame = orthonormal_frame(&p).unwrap();
        let grid = Grid::new(p.domain, 5, 6).unwrap();
        let csv = chart_csv(&frame, &grid).unwrap();
        assert!(csv.starts_with("u,v,g11,g12,g22,eps1,eps2,R1212\n"));
        assert_eq!(csv.lines().count(), 31);
    }
}
