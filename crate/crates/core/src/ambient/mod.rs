//! Explicit surfaces in pseudo-Riemannian space forms, realized inside flat
//! models `R^{r,s}` (dimension 3 for `kappa = 0`, 4 otherwise).
//!
//! The shape operator is `A = -(d nu)^T`, i.e. `g(A d_i, d_j) = <nu, x_ij>`.
//! With the outward normal the round unit sphere has `A = -Id` and `H = 1`.

pub mod presets;
pub mod shape;

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::Serialize;

use crate::chart::{orthonormal_frame, FrameField, Grid, SurfacePatch};
use crate::clifford::{Epsilon, ImmersionContext};
use crate::error::{Error, Result};
pub use presets::{load_preset, preset_names, PresetInfo};
pub use shape::{lowered, mean_curvature, raised, ClosedShape, PerturbedShape, ShapeField, ShapeJet};

/// Flat model `R^{r,s}` with diagonal metric signs, and the curvature of the
/// quadric `<x,x> = 1/kappa` carrying the surface when `kappa != 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbientModel {
    pub signs: Vec<i8>,
    pub kappa: f64,
}

impl AmbientModel {
    pub fn new(signs: &[i8], kappa: f64) -> Result<Self> {
        let dim = signs.len();
        let ok = (kappa == 0.0 && dim == 3) || (kappa != 0.0 && dim == 4);
        if !ok || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidContext(format!(
                "flat model of dimension {dim} does not fit kappa = {kappa}"
            )));
        }
        Ok(Self {
            signs: signs.to_vec(),
            kappa,
        })
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.signs
            .iter()
            .zip(a.iter().zip(b.iter()))
            .map(|(&s, (x, y))| s as f64 * x * y)
            .sum()
    }

    /// `eta x`, the metric-lowered vector.
    pub fn lower(&self, a: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.signs.iter().zip(a.iter()).map(|(&s, x)| s as f64 * x),
        )
    }

    pub fn label(&self) -> String {
        let r = self.signs.iter().filter(|&&s| s > 0).count();
        format!("R^{{{},{}}}", r, self.dim() - r)
    }
}

/// Embedding with first and second partials at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingJet {
    pub x: DVector<f64>,
    pub xu: DVector<f64>,
    pub xv: DVector<f64>,
    pub xuu: DVector<f64>,
    pub xuv: DVector<f64>,
    pub xvv: DVector<f64>,
}

impl EmbeddingJet {
    pub fn second(&self, i: usize, j: usize) -> &DVector<f64> {
        match (i, j) {
            (0, 0) => &self.xuu,
            (1, 1) => &self.xvv,
            _ => &self.xuv,
        }
    }

    pub fn first(&self, i: usize) -> &DVector<f64> {
        if i == 0 {
            &self.xu
        } else {
            &self.xv
        }
    }
}

pub type EmbeddingFn = Arc<dyn Fn(f64, f64) -> EmbeddingJet + Send + Sync>;
pub type HintFn = Arc<dyn Fn(f64, f64) -> DVector<f64> + Send + Sync>;

/// Expected data declared by a catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expectation {
    pub p: usize,
    pub q: usize,
    pub epsilon: Epsilon,
    /// `A = shape_scale Id` in the orthonormal frame.
    pub shape_scale: f64,
}

/// A surface immersed in a flat model, with chart, frame and normal orientation.
#[derive(Clone)]
pub struct ImmersedSurface {
    pub name: String,
    pub model: AmbientModel,
    pub patch: SurfacePatch,
    pub frame: FrameField,
    pub embedding: EmbeddingFn,
    /// Euclidean direction the normal must point towards.
    pub normal_hint: HintFn,
    pub context: ImmersionContext,
    pub expected: Expectation,
}

impl std::fmt::Debug for ImmersedSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImmersedSurface")
            .field("name", &self.name)
            .field("model", &self.model)
            .field("patch", &self.patch)
            .field("context", &self.context)
            .finish()
    }
}

impl ImmersedSurface {
    pub fn new(
        name: &str,
        model: AmbientModel,
        patch: SurfacePatch,
        embedding: EmbeddingFn,
        normal_hint: HintFn,
        lambda: crate::clifford::C64,
        expected: Expectation,
    ) -> Result<Self> {
        let frame = orthonormal_frame(&patch)?;
        let mut s = Self {
            name: name.to_string(),
            model,
            patch,
            frame,
            embedding,
            normal_hint,
            context: ImmersionContext::flat(Epsilon::Spacelike),
            expected,
        };
        let (uc, vc) = s.patch.domain.center();
        let nu = s.normal(uc, vc)?;
        let epsilon = if s.model.inner(&nu, &nu) > 0.0 {
            Epsilon::Spacelike
        } else {
            Epsilon::Timelike
        };
        s.context = ImmersionContext::new(epsilon, lambda)?;
        if (s.context.kappa - s.model.kappa).abs() > 1e-14 {
            return Err(Error::InvalidContext(format!(
                "kappa = {} does not match 4 lambda^2 = {}",
                s.model.kappa, s.context.kappa
            )));
        }
        Ok(s)
    }

    pub fn jet(&self, u: f64, v: f64) -> EmbeddingJet {
        (self.embedding)(u, v)
    }

    /// Unit normal `nu`, orthogonal to the tangent plane and, for `kappa != 0`,
    /// to the position vector.
    pub fn normal(&self, u: f64, v: f64) -> Result<DVector<f64>> {
        let jet = self.jet(u, v);
        let n = self.model.dim();
        let mut rows = vec![self.model.lower(&jet.xu), self.model.lower(&jet.xv)];
        if n == 4 {
            rows.push(self.model.lower(&jet.x));
        }
        let m = DMatrix::from_fn(n - 1, n, |r, c| rows[r][c]);
        // generalized cross product of the lowered constraint rows
        let w = DVector::from_fn(n, |a, _| {
            let minor = m.clone().remove_column(a);
            let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
            sign * minor.determinant()
        });
        let scale = w.norm_squared();
        let norm = self.model.inner(&w, &w);
        if !(scale > 0.0) || norm.abs() < 1e-12 * scale {
            return Err(Error::NormalDegenerate { u, v, norm });
        }
        let mut nu = w / norm.abs().sqrt();
        if nu.dot(&(self.normal_hint)(u, v)) < 0.0 {
            nu = -nu;
        }
        Ok(nu)
    }

    pub fn epsilon(&self) -> Epsilon {
        self.context.epsilon
    }

    /// Number and kind of special Killing spinors required for this surface.
    pub fn spinor_requirement(&self) -> Result<(usize, crate::reconstruction::SpinorKind)> {
        crate::reconstruction::spinor_count(
            self.patch.signature.p,
            self.patch.signature.q,
            self.context.epsilon,
        )
    }

    /// Largest mismatch between the chart metric and `<x_i, x_j>`.
    pub fn metric_defect(&self, u: f64, v: f64) -> f64 {
        let jet = self.jet(u, v);
        let g = self.patch.metric.jet(u, v).g;
        let ind = [
            self.model.inner(&jet.xu, &jet.xu),
            self.model.inner(&jet.xu, &jet.xv),
            self.model.inner(&jet.xv, &jet.xv),
        ];
        (0..3).map(|k| (g[k] - ind[k]).abs()).fold(0.0, f64::max)
    }

    /// `|<x,x> - 1/kappa|`, zero for `kappa = 0`.
    pub fn quadric_defect(&self, u: f64, v: f64) -> f64 {
        if self.model.kappa == 0.0 {
            return 0.0;
        }
        let x = self.jet(u, v).x;
        (self.model.inner(&x, &x) - 1.0 / self.model.kappa).abs()
    }
}

/// Frame matrix of the shape operator from the second fundamental form.
pub fn shape_from_embedding(surface: &ImmersedSurface, u: f64, v: f64) -> Result<Matrix2<f64>> {
    let nu = surface.normal(u, v)?;
    let jet = surface.jet(u, v);
    let fp = surface.frame.at(u, v)?;
    let l = Matrix2::from_fn(|i, j| surface.model.inner(&nu, jet.second(i, j)));
    let lf = fp.e * l * fp.e.transpose();
    Ok(raised(&lf, fp.eps))
}

/// Ground-truth shape field of a surface.
#[derive(Clone, Debug)]
pub struct EmbeddedShape {
    pub surface: ImmersedSurface,
}

impl ShapeField for EmbeddedShape {
    fn at(&self, u: f64, v: f64) -> Matrix2<f64> {
        shape_from_embedding(&self.surface, u, v)
            .expect("catalog surfaces have nondegenerate normals")
    }
}

impl ImmersedSurface {
    pub fn shape_field(&self) -> Arc<dyn ShapeField> {
        Arc::new(EmbeddedShape {
            surface: self.clone(),
        })
    }
}

/// Residual of `R_1212 = eps1 eps2 (delta det A + kappa)` with `delta = eps^2`.
pub fn gauss_residual_at(
    surface: &ImmersedSurface,
    shape: &dyn ShapeField,
    u: f64,
    v: f64,
) -> Result<f64> {
    let fp = surface.frame.at(u, v)?;
    let a = shape.at(u, v);
    let delta = surface.context.epsilon.square();
    let rhs = fp.eps_product() * (delta * a.determinant() + surface.model.kappa);
    Ok((fp.r1212 - rhs).abs())
}

/// Maximum Gauss equation residual over a `17 x 17` sample lattice.
pub fn gauss_equation_check(surface: &ImmersedSurface) -> Result<f64> {
    gauss_equation_check_with(surface, surface.shape_field().as_ref())
}

pub fn gauss_equation_check_with(surface: &ImmersedSurface, shape: &dyn ShapeField) -> Result<f64> {
    let grid = Grid::new(surface.patch.domain, 17, 17)?;
    let mut worst: f64 = 0.0;
    for (i, j) in grid.nodes() {
        let (u, v) = grid.coords(i, j);
        worst = worst.max(gauss_residual_at(surface, shape, u, v)?);
    }
    Ok(worst)
}

/// CSV of position, normal and shape operator on a grid.
pub fn surface_csv(surface: &ImmersedSurface, grid: &Grid) -> Result<String> {
    let n = surface.model.dim();
    let mut out = String::from("u,v");
    for k in 0..n {
        let _ = write!(out, ",x{k}");
    }
    for k in 0..n {
        let _ = write!(out, ",nu{k}");
    }
    out.push_str(",a11,a12,a21,a22,H\n");
    for (i, j) in grid.nodes() {
        let (u, v) = grid.coords(i, j);
        let x = surface.jet(u, v).x;
        let nu = surface.normal(u, v)?;
        let a = shape_from_embedding(surface, u, v)?;
        let _ = write!(out, "{u:.12e},{v:.12e}");
        for c in x.iter().chain(nu.iter()) {
            let _ = write!(out, ",{c:.12e}");
        }
        let _ = writeln!(
            out,
            ",{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            a[(0, 0)],
            a[(0, 1)],
            a[(1, 0)],
            a[(1, 1)],
            mean_curvature(&a)
        );
    }
    Ok(out)
}

/// Wavefront OBJ of a position grid in a three-dimensional flat model.
pub fn positions_obj(positions: &[DVector<f64>], grid: &Grid) -> Result<String> {
    if positions.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: positions.len(),
        });
    }
    if positions.iter().any(|p| p.len() != 3) {
        return Err(Error::InvalidContext(
            "OBJ export needs a three-dimensional flat model".into(),
        ));
    }
    let mut out = String::new();
    for p in positions {
        let _ = writeln!(out, "v {:.12} {:.12} {:.12}", p[0], p[1], p[2]);
    }
    for i in 0..grid.nu - 1 {
        for j in 0..grid.nv - 1 {
            let a = grid.index(i, j) + 1;
            let b = grid.index(i + 1, j) + 1;
            let c = grid.index(i + 1, j + 1) + 1;
            let d = grid.index(i, j + 1) + 1;
            let _ = writeln!(out, "f {a} {b} {c}");
            let _ = writeln!(out, "f {a} {c} {d}");
        }
    }
    Ok(out)
}

/// Samples the embedding on a grid.
pub fn embedding_positions(surface: &ImmersedSurface, grid: &Grid) -> Vec<DVector<f64>> {
    grid.nodes()
        .map(|(i, j)| {
            let (u, v) = grid.coords(i, j);
            surface.jet(u, v).x
        })
        .collect()
}
