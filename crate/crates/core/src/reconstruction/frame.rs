//! Moving frame integration and rigid comparison of embedded grids.
//!
//! The state along a line is the matrix `S = [x, E1, E2, N]` of column vectors
//! in the flat model `R^{eps1, eps2, eps^2[, sign kappa]}`; it obeys `S' = S K`
//! with
//!
//! ```text
//! x'  = y1 E1 + y2 E2
//! E1' = eps2 w E2 + eps1 (AY)_1 / eps^2 N - kappa eps1 y1 x
//! E2' = -eps1 w E1 + eps2 (AY)_2 / eps^2 N - kappa eps2 y2 x
//! N'  = -(AY)_1 E1 - (AY)_2 E2
//! ```
//!
//! where `Y = d_i` has frame components `y` and `w = omega12(Y)`.

use nalgebra::{DMatrix, DVector, Matrix4};
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{ImmersedSurface, ShapeField};
use crate::chart::{FrameField, Grid};
use crate::clifford::ImmersionContext;
use crate::error::{Error, Result};

use super::gauss_codazzi::gauss_codazzi_residual;

pub const DEFAULT_INTEGRABILITY_TOL: f64 = 1e-6;
pub const DEFAULT_DRIFT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrateOptions {
    pub integrability_tol: f64,
    pub drift_tol: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            integrability_tol: DEFAULT_INTEGRABILITY_TOL,
            drift_tol: DEFAULT_DRIFT_TOL,
        }
    }
}

/// Positions and adapted frames on a grid in a flat model.
#[derive(Debug, Clone)]
pub struct EmbeddedGrid {
    pub grid: Grid,
    pub signs: Vec<i8>,
    pub kappa: f64,
    pub positions: Vec<DVector<f64>>,
    /// Columns `E1, E2, N` at each node.
    pub frames: Vec<DMatrix<f64>>,
    /// Largest position mismatch between u-first and v-first sweeps.
    pub path_defect: f64,
    /// Largest Gram matrix deviation seen during integration.
    pub gram_drift: f64,
}

impl EmbeddedGrid {
    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.signs.iter().zip(a.iter().zip(b.iter())).map(|(&s, (x, y))| s as f64 * x * y).sum()
    }

    /// Full basis at node `k`: adapted frame plus position when `kappa != 0`.
    fn basis(&self, k: usize) -> DMatrix<f64> {
        let f = &self.frames[k];
        if self.kappa == 0.0 {
            f.clone()
        } else {
            let mut b = f.clone().insert_column(3, 0.0);
            b.set_column(3, &self.positions[k]);
            b
        }
    }

    /// `max |<x,x> - 1/kappa|`, zero for `kappa = 0`.
    pub fn quadric_defect(&self) -> f64 {
        if self.kappa == 0.0 {
            return 0.0;
        }
        self.positions
            .iter()
            .map(|x| (self.inner(x, x) - 1.0 / self.kappa).abs())
            .fold(0.0, f64::max)
    }

    /// Applies `x -> L x + t` to positions and frames.
    pub fn transformed(&self, l: &DMatrix<f64>, t: &DVector<f64>) -> Self {
        Self {
            positions: self.positions.iter().map(|x| l * x + t).collect(),
            frames: self.frames.iter().map(|f| l * f).collect(),
            ..self.clone()
        }
    }

    /// Ground truth from a catalog surface.
    pub fn from_surface(surface: &ImmersedSurface, grid: &Grid) -> Result<Self> {
        let n = surface.model.dim();
        let mut positions = Vec::with_capacity(grid.len());
        let mut frames = Vec::with_capacity(grid.len());
        for (i, j) in grid.nodes() {
            let (u, v) = grid.coords(i, j);
            let jet = surface.jet(u, v);
            let fp = surface.frame.at(u, v)?;
            let mut f = DMatrix::zeros(n, 3);
            for k in 0..2 {
                f.set_column(k, &(&jet.xu * fp.e[(k, 0)] + &jet.xv * fp.e[(k, 1)]));
            }
            f.set_column(2, &surface.normal(u, v)?);
            positions.push(jet.x);
            frames.push(f);
        }
        Ok(Self {
            grid: *grid,
            signs: surface.model.signs.clone(),
            kappa: surface.model.kappa,
            positions,
            frames,
            path_defect: 0.0,
            gram_drift: 0.0,
        })
    }
}

/// Coefficient matrix `K` along `d_coord` at `(u, v)`.
fn coefficients(
    frame: &FrameField,
    shape: &dyn ShapeField,
    ctx: &ImmersionContext,
    u: f64,
    v: f64,
    coord: usize,
) -> Result<Matrix4<f64>> {
    let fp = frame.at(u, v)?;
    let y = fp.coord_in_frame(coord);
    let w = y[0] * fp.omega[0] + y[1] * fp.omega[1];
    let ay = shape.at(u, v) * nalgebra::Vector2::new(y[0], y[1]);
    let (e1, e2) = (fp.eps_f(0), fp.eps_f(1));
    let d = ctx.epsilon.square();
    let kappa = ctx.kappa;
    let mut k = Matrix4::zeros();
    k[(1, 0)] = y[0];
    k[(2, 0)] = y[1];
    k[(2, 1)] = e2 * w;
    k[(3, 1)] = e1 * ay[0] / d;
    k[(0, 1)] = -kappa * e1 * y[0];
    k[(1, 2)] = -e1 * w;
    k[(3, 2)] = e2 * ay[1] / d;
    k[(0, 2)] = -kappa * e2 * y[1];
    k[(1, 3)] = -ay[0];
    k[(2, 3)] = -ay[1];
    Ok(k)
}

type Step<'a> = dyn Fn(f64, f64, usize) -> Result<Matrix4<f64>> + Sync + 'a;

fn rk4(s: &DMatrix<f64>, k: &Step, (u, v): (f64, f64), coord: usize, h: f64) -> Result<DMatrix<f64>> {
    let at = |t: f64| if coord == 0 { (u + t, v) } else { (u, v + t) };
    let f = |t: f64, s: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        let (a, b) = at(t);
        let m = k(a, b, coord)?;
        Ok(s * DMatrix::from_fn(4, 4, |r, c| m[(r, c)]))
    };
    let k1 = f(0.0, s)?;
    let k2 = f(0.5 * h, &(s + &k1 * (0.5 * h)))?;
    let k3 = f(0.5 * h, &(s + &k2 * (0.5 * h)))?;
    let k4 = f(h, &(s + &k3 * h))?;
    Ok(s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// Sweeps along `first` from the corner, then along the other direction from each node.
fn sweep(grid: &Grid, s0: &DMatrix<f64>, k: &Step, first: usize) -> Result<Vec<DMatrix<f64>>> {
    let (n_first, n_second) = if first == 0 { (grid.nu, grid.nv) } else { (grid.nv, grid.nu) };
    let h = [grid.hu(), grid.hv()];
    let node = |a: usize, b: usize| if first == 0 { grid.coords(a, b) } else { grid.coords(b, a) };
    let mut spine = vec![s0.clone()];
    for a in 1..n_first {
        let prev = &spine[a - 1];
        spine.push(rk4(prev, k, node(a - 1, 0), first, h[first])?);
    }
    let lines: Vec<Vec<DMatrix<f64>>> = spine
        .par_iter()
        .enumerate()
        .map(|(a, start)| {
            let mut line = vec![start.clone()];
            for b in 1..n_second {
                let next = rk4(&line[b - 1], k, node(a, b - 1), 1 - first, h[1 - first])?;
                line.push(next);
            }
            Ok(line)
        })
        .collect::<Result<_>>()?;
    let mut out = vec![DMatrix::zeros(0, 0); grid.len()];
    for (a, line) in lines.into_iter().enumerate() {
        for (b, s) in line.into_iter().enumerate() {
            let idx = if first == 0 { grid.index(a, b) } else { grid.index(b, a) };
            out[idx] = s;
        }
    }
    Ok(out)
}

/// Reconstructs an immersion from `(g, A)` by integrating the moving frame.
pub fn integrate_frame(
    frame: &FrameField,
    shape: &dyn ShapeField,
    ctx: &ImmersionContext,
    grid: &Grid,
    options: &IntegrateOptions,
) -> Result<EmbeddedGrid> {
    let gc = gauss_codazzi_residual(frame, shape, ctx, grid)?;
    if !(gc.max_residual() <= options.integrability_tol) {
        return Err(Error::IntegrabilityViolated {
            g_max: gc.g_max,
            c_max: gc.c_max,
            tolerance: options.integrability_tol,
        });
    }
    let kappa = ctx.kappa;
    let n = if kappa == 0.0 { 3 } else { 4 };
    let mut signs = vec![frame.eps[0], frame.eps[1], ctx.epsilon.square() as i8];
    if kappa != 0.0 {
        signs.push(kappa.signum() as i8);
    }
    let mut s0 = DMatrix::zeros(n, 4);
    for c in 0..3 {
        s0[(c, c + 1)] = 1.0;
    }
    if kappa != 0.0 {
        s0[(3, 0)] = 1.0 / kappa.abs().sqrt();
    }
    let k = |u: f64, v: f64, coord: usize| coefficients(frame, shape, ctx, u, v, coord);
    let states = sweep(grid, &s0, &k, 0)?;
    let other = sweep(grid, &s0, &k, 1)?;
    let path_defect = states
        .iter()
        .zip(&other)
        .map(|(a, b)| (a.column(0) - b.column(0)).amax())
        .fold(0.0, f64::max);
    let eta = DMatrix::from_diagonal(&DVector::from_iterator(n, signs.iter().map(|&s| s as f64)));
    let mut target = vec![0.0, signs[0] as f64, signs[1] as f64, signs[2] as f64];
    let first_col = if kappa == 0.0 { 1 } else { 0 };
    if kappa != 0.0 {
        target[0] = 1.0 / kappa;
    }
    let mut gram_drift: f64 = 0.0;
    for (i, j) in grid.nodes() {
        let s = &states[grid.index(i, j)];
        let cols = s.columns(first_col, 4 - first_col);
        let gram = cols.transpose() * &eta * cols;
        let t = DMatrix::from_diagonal(&DVector::from_row_slice(&target[first_col..]));
        let drift = (gram - t).amax();
        gram_drift = gram_drift.max(drift);
        if !(drift <= options.drift_tol) {
            return Err(Error::FrameDrift {
                i,
                j,
                drift,
                tolerance: options.drift_tol,
            });
        }
    }
    Ok(EmbeddedGrid {
        grid: *grid,
        signs,
        kappa,
        positions: states.iter().map(|s| s.column(0).into_owned()).collect(),
        frames: states.iter().map(|s| s.columns(1, 3).into_owned()).collect(),
        path_defect,
        gram_drift,
    })
}

/// Result of [`align`].
#[derive(Debug, Clone)]
pub struct Alignment {
    pub linear: DMatrix<f64>,
    pub translation: DVector<f64>,
    /// `max |L^T eta_b L - eta_a|`.
    pub isometry_defect: f64,
    pub distance: f64,
}

/// Fits the map sending the base basis of `a` onto that of `b` and measures
/// the coordinate sup-distance between the aligned positions.
pub fn align(a: &EmbeddedGrid, b: &EmbeddedGrid) -> Result<Alignment> {
    if a.grid.shape() != b.grid.shape() {
        return Err(Error::ShapeMismatch {
            a: a.grid.shape(),
            b: b.grid.shape(),
        });
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let (ra, rb) = (a.basis(0), b.basis(0));
    let inv = ra.clone().try_inverse().ok_or_else(|| Error::InvalidContext("singular base frame".into()))?;
    let linear = &rb * inv;
    let translation = &b.positions[0] - &linear * &a.positions[0];
    let eta = |s: &[i8]| DMatrix::from_diagonal(&DVector::from_iterator(s.len(), s.iter().map(|&x| x as f64)));
    let isometry_defect = (linear.transpose() * eta(&b.signs) * &linear - eta(&a.signs)).amax();
    let distance = a
        .positions
        .iter()
        .zip(&b.positions)
        .map(|(x, y)| (&linear * x + &translation - y).amax())
        .fold(0.0, f64::max);
    Ok(Alignment {
        linear,
        translation,
        isometry_defect,
        distance,
    })
}

/// Sup-distance after base-frame alignment.
pub fn align_and_compare(a: &EmbeddedGrid, b: &EmbeddedGrid) -> Result<f64> {
    Ok(align(a, b)?.distance)
}
