//! Gauss and Codazzi residuals of a shape operator field.

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{ShapeField, ShapeJet};
use crate::chart::{FrameField, FramePoint, Grid};
use crate::clifford::{ImmersionContext, C64};
use crate::error::Result;

/// Residuals at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussCodazziAt {
    pub u: f64,
    pub v: f64,
    /// `-eps1 eps2 R_1212 + eps^2 det A + 4 lambda^2`.
    pub g: f64,
    /// Frame components of `(nabla_{e1} A) e2 - (nabla_{e2} A) e1`.
    pub c: [f64; 2],
    /// `eps1 eps2 R_1212 + eps^2 det A - lambda^2`.
    pub sign_variant: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussCodazziReport {
    /// `G_{p,q}` label of the formula applied.
    pub case: String,
    /// `eta = eps/2`.
    pub eta: [f64; 2],
    pub g_max: f64,
    pub c_max: f64,
    pub sign_variant_max: f64,
    pub sign_variant_min: f64,
    #[serde(skip)]
    pub nodes: Vec<GaussCodazziAt>,
}

impl GaussCodazziReport {
    pub fn max_residual(&self) -> f64 {
        self.g_max.max(self.c_max)
    }
}

/// Covariant derivative `nabla_X Y` in frame components, with `dy = X(y)`.
fn nabla_frame(fp: &FramePoint, x: [f64; 2], y: Vector2<f64>, dy: Vector2<f64>) -> Vector2<f64> {
    let w = x[0] * fp.omega[0] + x[1] * fp.omega[1];
    Vector2::new(dy[0] - y[1] * fp.eps_f(0) * w, dy[1] + y[0] * fp.eps_f(1) * w)
}

/// Codazzi tensor at one point.
pub fn codazzi_at(fp: &FramePoint, jet: &ShapeJet) -> [f64; 2] {
    let dir = |m: usize| -> Matrix2<f64> { jet.du * fp.e[(m, 0)] + jet.dv * fp.e[(m, 1)] };
    let (d1, d2) = (dir(0), dir(1));
    let a = jet.a;
    let c = nabla_frame(fp, [1.0, 0.0], a.column(1).into(), d1.column(1).into())
        + a.column(0) * (fp.eps_f(0) * fp.omega[0])
        - nabla_frame(fp, [0.0, 1.0], a.column(0).into(), d2.column(0).into())
        + a.column(1) * (fp.eps_f(1) * fp.omega[1]);
    [c[0], c[1]]
}

pub fn gauss_codazzi_at(fp: &FramePoint, jet: &ShapeJet, ctx: &ImmersionContext) -> GaussCodazziAt {
    let e2 = ctx.epsilon.square();
    let l2 = (ctx.lambda * ctx.lambda).re;
    let r = fp.eps_product() * fp.r1212;
    let det = jet.a.determinant();
    GaussCodazziAt {
        u: fp.u,
        v: fp.v,
        g: -r + e2 * det + 4.0 * l2,
        c: codazzi_at(fp, jet),
        sign_variant: r + e2 * det - l2,
    }
}

/// Evaluates the Gauss and Codazzi residuals on every grid node.
pub fn gauss_codazzi_residual(
    frame: &FrameField,
    shape: &dyn ShapeField,
    ctx: &ImmersionContext,
    grid: &Grid,
) -> Result<GaussCodazziReport> {
    let nodes: Vec<GaussCodazziAt> = grid
        .nodes()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(i, j)| {
            let (u, v) = grid.coords(i, j);
            let fp = frame.at(u, v)?;
            Ok(gauss_codazzi_at(&fp, &shape.jet(u, v), ctx))
        })
        .collect::<Result<_>>()?;
    let sig = &frame.patch.signature;
    let eta = ctx.eps() * C64::from(0.5);
    Ok(GaussCodazziReport {
        case: format!("G_{{{},{}}}", sig.p, sig.q),
        eta: [eta.re, eta.im],
        g_max: nodes.iter().map(|n| n.g.abs()).fold(0.0, f64::max),
        c_max: nodes.iter().map(|n| n.c[0].hypot(n.c[1])).fold(0.0, f64::max),
        sign_variant_max: nodes.iter().map(|n| n.sign_variant.abs()).fold(0.0, f64::max),
        sign_variant_min: nodes.iter().map(|n| n.sign_variant.abs()).fold(f64::INFINITY, f64::min),
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{load_preset, PerturbedShape};

    #[test]
    fn sphere_residuals() {
        let s = load_preset("round-sphere-R3").unwrap();
        let grid = Grid::new(s.patch.domain, 9, 9).unwrap();
        let r = gauss_codazzi_residual(&s.frame, s.shape_field().as_ref(), &s.context, &grid).unwrap();
        assert_eq!(r.case, "G_{2,0}");
        assert_eq!(r.eta, [0.5, 0.0]);
        assert!(r.g_max < 1e-12 && r.c_max < 1e-10, "{} {}", r.g_max, r.c_max);
        assert!((r.sign_variant_min - 2.0).abs() < 1e-12);
        assert!((r.sign_variant_max - 2.0).abs() < 1e-12);
    }

    #[test]
    fn perturbation_breaks_gauss() {
        for name in ["round-sphere-R3", "de-sitter-R21", "surface-in-H3"] {
            let s = load_preset(name).unwrap();
            let grid = Grid::new(s.patch.domain, 9, 9).unwrap();
            let p = PerturbedShape::new(s.shape_field(), 0.01, s.patch.domain);
            let r = gauss_codazzi_residual(&s.frame, &p, &s.context, &grid).unwrap();
            assert!(r.g_max >= 1e-3, "{name}: {}", r.g_max);
        }
    }

    #[test]
    fn non_parallel_shape_has_codazzi_defect() {
        let s = load_preset("flat-plane-R3").unwrap();
        let grid = Grid::new(s.patch.domain, 9, 9).unwrap();
        let p = PerturbedShape::new(s.shape_field(), 0.01, s.patch.domain);
        let r = gauss_codazzi_residual(&s.frame, &p, &s.context, &grid).unwrap();
        assert!(r.c_max > 1e-3, "{}", r.c_max);
    }
}
