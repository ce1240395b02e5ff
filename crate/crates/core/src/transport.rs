//! Integration of the special Killing equation
//! `nabla_X phi = (eps/2) A(X).phi - i lambda X.phi-bar` along grid lines.
//!
//! The solver runs RK4 along the first `u`-line, then along every `v`-line.
//! Path dependence is measured by repeating the sweep in the opposite order.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::Matrix2;
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{mean_curvature, ImmersedSurface, ShapeField};
use crate::chart::{FrameField, FramePoint, Grid, GridSpinorField, SpinorJet};
use crate::clifford::{inner_product, max_abs, split_spinor, GammaRep, ImmersionContext, Mat2, Spinor, C64, I};
use crate::error::{Error, Result};
use crate::reconstruction::DiracCoefficients;

pub const OVERFLOW_GUARD: f64 = 1e12;
pub const ISOTROPY_MARGIN: f64 = 1e-8;

/// Which of the two companion equations a spinor solves.
///
/// The second spinor solves the equation with `A -> -A` and `lambda -> -lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    First,
    Second,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::First => 1.0,
            Branch::Second => -1.0,
        }
    }
}

/// Inputs of the special Killing equation on a chart.
#[derive(Clone)]
pub struct SpecialKillingData {
    pub frame: FrameField,
    pub shape: Arc<dyn ShapeField>,
    pub context: ImmersionContext,
    pub base: Spinor,
    pub branch: Branch,
}

impl std::fmt::Debug for SpecialKillingData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpecialKillingData")
            .field("context", &self.context)
            .field("base", &self.base)
            .field("branch", &self.branch)
            .finish()
    }
}

/// Default base spinor: `(1,0)` or `(0,1)` for definite signatures,
/// `(1,1)/sqrt 2` for signature `(1,1)`.
pub fn default_base(rep: &GammaRep, branch: Branch) -> Spinor {
    if rep.signature.q == 1 {
        Spinor::real(1.0, 1.0) * std::f64::consts::FRAC_1_SQRT_2
    } else {
        match branch {
            Branch::First => Spinor::real(1.0, 0.0),
            Branch::Second => Spinor::real(0.0, 1.0),
        }
    }
}

/// `|<phi+, phi->|`, the non-isotropy margin in signature (1,1).
pub fn isotropy_margin(rep: &GammaRep, phi: Spinor) -> f64 {
    let (p, m) = split_spinor(rep, phi);
    inner_product(rep, p, m).norm()
}

impl SpecialKillingData {
    pub fn new(
        frame: FrameField,
        shape: Arc<dyn ShapeField>,
        context: ImmersionContext,
        base: Spinor,
        branch: Branch,
    ) -> Result<Self> {
        let data = Self {
            frame,
            shape,
            context,
            base,
            branch,
        };
        if data.rep().signature.q == 1 {
            let margin = isotropy_margin(data.rep(), base);
            if !(margin >= ISOTROPY_MARGIN) {
                return Err(Error::IsotropicSpinor { i: 0, j: 0, margin });
            }
        }
        Ok(data)
    }

    /// Data for a catalog surface with its true shape operator.
    pub fn for_surface(surface: &ImmersedSurface, branch: Branch) -> Result<Self> {
        Self::with_shape(surface, surface.shape_field(), branch)
    }

    /// Data for a catalog surface with a prescribed shape field.
    pub fn with_shape(
        surface: &ImmersedSurface,
        shape: Arc<dyn ShapeField>,
        branch: Branch,
    ) -> Result<Self> {
        let base = default_base(&surface.frame.rep, branch);
        Self::new(surface.frame.clone(), shape, surface.context, base, branch)
    }

    pub fn rep(&self) -> &GammaRep {
        &self.frame.rep
    }

    /// Shape operator entering the equation, `+-A`.
    pub fn shape_at(&self, u: f64, v: f64) -> Matrix2<f64> {
        self.shape.at(u, v) * self.branch.sign()
    }

    /// Killing number entering the equation, `+-lambda`.
    pub fn lambda(&self) -> C64 {
        self.context.lambda * self.branch.sign()
    }

    /// Matrix of `phi -> nabla_X phi` for frame components `x`.
    pub fn nabla_matrix(&self, a: &Matrix2<f64>, x: [f64; 2]) -> Mat2 {
        let rep = self.rep();
        let ax = a * nalgebra::Vector2::new(x[0], x[1]);
        rep.vec_mat(&[ax[0], ax[1]]) * (self.context.eps() * 0.5)
            + rep.vec_mat(&x) * rep.omega * (-I * self.lambda())
    }

    /// `M` with `d_X phi = M phi` at a frame point, `x` in frame components.
    pub fn killing_matrix(&self, fp: &FramePoint, a: &Matrix2<f64>, x: [f64; 2]) -> Mat2 {
        self.nabla_matrix(a, x) - fp.connection_matrix(self.rep(), x)
    }
}

/// `M(d_coord)` with `d_coord phi = M phi`; `coord` is 0 for `u`, 1 for `v`.
pub fn killing_rhs(data: &SpecialKillingData, u: f64, v: f64, coord: usize) -> Result<Mat2> {
    if coord > 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: coord + 1,
        });
    }
    let fp = data.frame.at(u, v)?;
    let a = data.shape_at(u, v);
    Ok(data.killing_matrix(&fp, &a, fp.coord_in_frame(coord)))
}

fn rk4_step(
    data: &SpecialKillingData,
    coord: usize,
    (u, v): (f64, f64),
    h: f64,
    phi: Spinor,
) -> Result<Spinor> {
    let at = |t: f64| {
        if coord == 0 {
            (u + t, v)
        } else {
            (u, v + t)
        }
    };
    let m = |t: f64| {
        let (a, b) = at(t);
        killing_rhs(data, a, b, coord)
    };
    let m0 = m(0.0)?;
    let mh = m(0.5 * h)?;
    let m1 = m(h)?;
    let k1 = m0 * phi;
    let k2 = mh * (phi + k1 * (0.5 * h));
    let k3 = mh * (phi + k2 * (0.5 * h));
    let k4 = m1 * (phi + k3 * h);
    Ok(phi + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

fn guard(phi: Spinor, i: usize, j: usize) -> Result<Spinor> {
    let norm = phi.norm();
    if !norm.is_finite() || norm > OVERFLOW_GUARD {
        return Err(Error::StepUnstable { i, j, norm });
    }
    Ok(phi)
}

/// Sweeps the grid; `u_first` selects the order of the two passes.
fn sweep(data: &SpecialKillingData, grid: &Grid, u_first: bool) -> Result<Vec<Spinor>> {
    let (nu, nv) = grid.shape();
    let (hu, hv) = (grid.hu(), grid.hv());
    if u_first {
        let mut spine = vec![data.base];
        for i in 1..nu {
            let prev = spine[i - 1];
            let next = rk4_step(data, 0, grid.coords(i - 1, 0), hu, prev)?;
            spine.push(guard(next, i, 0)?);
        }
        let lines: Vec<Vec<Spinor>> = (0..nu)
            .into_par_iter()
            .map(|i| {
                let mut line = vec![spine[i]];
                for j in 1..nv {
                    let next = rk4_step(data, 1, grid.coords(i, j - 1), hv, line[j - 1])?;
                    line.push(guard(next, i, j)?);
                }
                Ok(line)
            })
            .collect::<Result<_>>()?;
        Ok(lines.into_iter().flatten().collect())
    } else {
        let mut spine = vec![data.base];
        for j in 1..nv {
            let next = rk4_step(data, 1, grid.coords(0, j - 1), hv, spine[j - 1])?;
            spine.push(guard(next, 0, j)?);
        }
        let lines: Vec<Vec<Spinor>> = (0..nv)
            .into_par_iter()
            .map(|j| {
                let mut line = vec![spine[j]];
                for i in 1..nu {
                    let next = rk4_step(data, 0, grid.coords(i - 1, j), hu, line[i - 1])?;
                    line.push(guard(next, i, j)?);
                }
                Ok(line)
            })
            .collect::<Result<_>>()?;
        let mut out = vec![Spinor::ZERO; grid.len()];
        for (j, line) in lines.into_iter().enumerate() {
            for (i, phi) in line.into_iter().enumerate() {
                out[grid.index(i, j)] = phi;
            }
        }
        Ok(out)
    }
}

/// Transported field and its diagnostics.
#[derive(Debug, Clone)]
pub struct TransportResult {
    pub field: GridSpinorField,
    /// `max |phi_uv - phi_vu| / |phi|` over nodes, comparing the two sweep orders.
    pub holonomy_defect: f64,
    /// Per-cell mismatch of the two edge orderings, divided by `|phi| hu hv`.
    pub cell_holonomy: f64,
    /// `max |nabla_X phi - (eps/2) A(X) phi + i lambda X.phi-bar|` for `X = e1, e2`.
    pub killing_residual: f64,
    pub grid: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportSummary {
    pub nu: usize,
    pub nv: usize,
    pub hu: f64,
    pub hv: f64,
    pub holonomy_defect: f64,
    pub cell_holonomy: f64,
    pub killing_residual: f64,
}

impl TransportResult {
    pub fn summary(&self) -> TransportSummary {
        TransportSummary {
            nu: self.grid.nu,
            nv: self.grid.nv,
            hu: self.grid.hu(),
            hv: self.grid.hv(),
            holonomy_defect: self.holonomy_defect,
            cell_holonomy: self.cell_holonomy,
            killing_residual: self.killing_residual,
        }
    }
}

/// Integrates the special Killing equation over `grid`.
pub fn transport_solve(data: &SpecialKillingData, grid: &Grid) -> Result<TransportResult> {
    let values = sweep(data, grid, true)?;
    let alt = sweep(data, grid, false)?;
    let holonomy_defect = values
        .iter()
        .zip(&alt)
        .map(|(a, b)| (*a - *b).norm() / a.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let cell_holonomy = cell_holonomy(data, grid, &values)?;
    let field = GridSpinorField::new(data.rep().clone(), *grid, values)?;
    let killing_residual = killing_residual(data, &field)?;
    Ok(TransportResult {
        field,
        holonomy_defect,
        cell_holonomy,
        killing_residual,
        grid: *grid,
    })
}

fn cell_holonomy(data: &SpecialKillingData, grid: &Grid, values: &[Spinor]) -> Result<f64> {
    let (hu, hv) = (grid.hu(), grid.hv());
    let cells: Vec<(usize, usize)> = (0..grid.nu - 1)
        .flat_map(|i| (0..grid.nv - 1).map(move |j| (i, j)))
        .collect();
    let worst = cells
        .par_iter()
        .map(|&(i, j)| {
            let phi = values[grid.index(i, j)];
            let (u, v) = grid.coords(i, j);
            let a = rk4_step(data, 0, (u, v), hu, phi)?;
            let a = rk4_step(data, 1, (u + hu, v), hv, a)?;
            let b = rk4_step(data, 1, (u, v), hv, phi)?;
            let b = rk4_step(data, 0, (u, v + hv), hu, b)?;
            Ok((a - b).norm() / (phi.norm().max(f64::MIN_POSITIVE) * hu * hv))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

fn node_data(
    data: &SpecialKillingData,
    field: &GridSpinorField,
    i: usize,
    j: usize,
) -> Result<(FramePoint, SpinorJet, Matrix2<f64>)> {
    let grid = &field.grid;
    let (u, v) = grid.coords(i, j);
    let (du, dv) = grid.partials(&field.values, i, j);
    let jet = SpinorJet {
        u,
        v,
        value: field.at(i, j),
        du,
        dv,
    };
    Ok((data.frame.at(u, v)?, jet, data.shape_at(u, v)))
}

/// Largest residual of the special Killing equation, by finite differences.
pub fn killing_residual(data: &SpecialKillingData, field: &GridSpinorField) -> Result<f64> {
    let grid = field.grid;
    let res = grid
        .nodes()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(i, j)| {
            let (fp, jet, a) = node_data(data, field, i, j)?;
            let mut r: f64 = 0.0;
            for k in 0..2 {
                let mut x = [0.0; 2];
                x[k] = 1.0;
                let lhs = fp.covariant(data.rep(), &jet, k);
                let rhs = data.nabla_matrix(&a, x) * jet.value;
                r = r.max((lhs - rhs).norm());
            }
            Ok(r)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(res.into_iter().fold(0.0, f64::max))
}

/// Largest residual of `D phi = a eps H phi + b i lambda phi-bar` over the grid.
///
/// For the second branch `H` and `lambda` enter with flipped signs.
pub fn dirac_residual(
    result: &TransportResult,
    data: &SpecialKillingData,
    coefficients: &DiracCoefficients,
) -> Result<f64> {
    let field = &result.field;
    let rep = data.rep();
    let eps = data.context.eps();
    let lambda = data.lambda();
    let res = field
        .grid
        .nodes()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(i, j)| {
            let (fp, jet, a) = node_data(data, field, i, j)?;
            let d = fp.dirac(rep, &jet);
            let h = mean_curvature(&a);
            let bar = rep.omega * jet.value;
            let rhs = jet.value * (eps * (coefficients.a * h)) + bar * (I * lambda * coefficients.b);
            Ok((d - rhs).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(res.into_iter().fold(0.0, f64::max))
}

/// Holonomy of the spin connection around the coordinate square of side `h`
/// anchored at `(u, v)`, compared with the curvature endomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolonomyProbe {
    pub h: f64,
    /// `max |(Id - P)/h^2 - R(d_u, d_v)|` entrywise.
    pub defect: f64,
    /// `max |R(d_u, d_v)|` entrywise.
    pub curvature: f64,
}

/// Transports a spinor basis counterclockwise around the square and compares
/// `(Id - P)/h^2` with `R(d_u,d_v) = (1/2) eps1 eps2 R_1221 e1.e2 / det(e)`.
pub fn connection_holonomy(frame: &FrameField, u: f64, v: f64, h: f64) -> Result<HolonomyProbe> {
    let rep = &frame.rep;
    let conn = |a: f64, b: f64, coord: usize| -> Result<Mat2> {
        let fp = frame.at(a, b)?;
        Ok(-fp.connection_matrix(rep, fp.coord_in_frame(coord)))
    };
    let step = |p: Mat2, (a, b): (f64, f64), coord: usize, dt: f64| -> Result<Mat2> {
        let shift = |t: f64| if coord == 0 { (a + t, b) } else { (a, b + t) };
        let m = |t: f64| {
            let (x, y) = shift(t);
            conn(x, y, coord)
        };
        let (m0, mh, m1) = (m(0.0)?, m(0.5 * dt)?, m(dt)?);
        let k1 = m0 * p;
        let k2 = mh * (p + k1 * C64::from(0.5 * dt));
        let k3 = mh * (p + k2 * C64::from(0.5 * dt));
        let k4 = m1 * (p + k3 * C64::from(dt));
        Ok(p + (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(dt / 6.0))
    };
    let mut p = Mat2::identity();
    p = step(p, (u, v), 0, h)?;
    p = step(p, (u + h, v), 1, h)?;
    p = step(p, (u + h, v + h), 0, -h)?;
    p = step(p, (u, v + h), 1, -h)?;
    let fp = frame.at(u, v)?;
    let det_e = fp.e.determinant();
    let r1221 = -fp.r1212;
    let expected = rep.e1e2() * C64::from(0.5 * fp.eps_product() * r1221 / det_e);
    let estimate = (Mat2::identity() - p) * C64::from(1.0 / (h * h));
    Ok(HolonomyProbe {
        h,
        defect: max_abs(&(estimate - expected)),
        curvature: max_abs(&expected),
    })
}

/// Holonomy defects under refinement and the observed convergence orders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolonomyConvergence {
    pub sizes: Vec<usize>,
    pub steps: Vec<f64>,
    /// Largest probe defect over the anchors, per size.
    pub defects: Vec<f64>,
    /// `log2` ratios of consecutive defects.
    pub orders: Vec<f64>,
    /// Whether every defect is at round-off level (flat connection).
    pub exact: bool,
}

impl HolonomyConvergence {
    pub fn min_order(&self) -> f64 {
        if self.exact {
            f64::INFINITY
        } else {
            self.orders.iter().copied().fold(f64::INFINITY, f64::min)
        }
    }
}

const ROUND_OFF: f64 = 1e-11;

/// Runs [`connection_holonomy`] on a 3 x 3 set of anchors with cell side
/// `min(width_u, width_v) / n` for each `n` in `sizes`.
pub fn holonomy_convergence(frame: &FrameField, sizes: &[usize]) -> Result<HolonomyConvergence> {
    let d = frame.patch.domain;
    let width = (d.u1 - d.u0).min(d.v1 - d.v0);
    let anchors: Vec<(f64, f64)> = [0.25, 0.5, 0.75]
        .iter()
        .flat_map(|&a| [0.25, 0.5, 0.75].map(|b| (d.u0 + a * (d.u1 - d.u0), d.v0 + b * (d.v1 - d.v0))))
        .collect();
    let mut steps = Vec::new();
    let mut defects = Vec::new();
    for &n in sizes {
        let h = width / n as f64;
        let worst = anchors
            .par_iter()
            .map(|&(u, v)| connection_holonomy(frame, u, v, h).map(|p| p.defect))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        steps.push(h);
        defects.push(worst);
    }
    let orders = defects
        .windows(2)
        .zip(steps.windows(2))
        .map(|(d, h)| (d[0] / d[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    Ok(HolonomyConvergence {
        sizes: sizes.to_vec(),
        steps,
        exact: defects.iter().all(|&x| x <= ROUND_OFF),
        defects,
        orders,
    })
}

/// `|<phi1, phi2>|` at every node of two fields on the same grid.
pub fn pair_products(a: &GridSpinorField, b: &GridSpinorField) -> Result<Vec<f64>> {
    if a.grid.shape() != b.grid.shape() {
        return Err(Error::ShapeMismatch {
            a: a.grid.shape(),
            b: b.grid.shape(),
        });
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| inner_product(&a.rep, *x, *y).norm())
        .collect())
}

/// `|phi1^H phi2|` at every node of two fields on the same grid.
pub fn hermitian_products(a: &GridSpinorField, b: &GridSpinorField) -> Result<Vec<f64>> {
    if a.grid.shape() != b.grid.shape() {
        return Err(Error::ShapeMismatch {
            a: a.grid.shape(),
            b: b.grid.shape(),
        });
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x.plus.conj() * y.plus + x.minus.conj() * y.minus).norm())
        .collect())
}

/// CSV with columns `u,v,re_plus,im_plus,re_minus,im_minus`.
pub fn spinor_csv(field: &GridSpinorField) -> String {
    let mut out = String::from("u,v,re_plus,im_plus,re_minus,im_minus\n");
    for (i, j) in field.grid.nodes() {
        let (u, v) = field.grid.coords(i, j);
        let s = field.at(i, j);
        let _ = writeln!(
            out,
            "{u:.12e},{v:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            s.plus.re, s.plus.im, s.minus.re, s.minus.im
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{load_preset, PerturbedShape};
    use crate::chart::Grid;

    fn solve(name: &str, n: usize, branch: Branch) -> (SpecialKillingData, TransportResult) {
        let s = load_preset(name).unwrap();
        let data = SpecialKillingData::for_surface(&s, branch).unwrap();
        let grid = Grid::new(s.patch.domain, n, n).unwrap();
        let r = transport_solve(&data, &grid).unwrap();
        (data, r)
    }

    #[test]
    fn flat_plane_is_constant() {
        let (_, r) = solve("flat-plane-R3", 16, Branch::First);
        assert!(r.killing_residual <= 1e-14);
        assert!(r.holonomy_defect <= 1e-14);
        assert!(r.field.values.iter().all(|s| *s == Spinor::real(1.0, 0.0)));
    }

    #[test]
    fn sphere_transport_is_consistent() {
        let (data, r) = solve("round-sphere-R3", 33, Branch::First);
        assert!(r.killing_residual < 1e-6, "{}", r.killing_residual);
        assert!(r.holonomy_defect < 1e-8, "{}", r.holonomy_defect);
        let oracle = dirac_residual(&r, &data, &DiracCoefficients::ORACLE).unwrap();
        let doubled = dirac_residual(&r, &data, &DiracCoefficients::DOUBLED).unwrap();
        assert!(oracle < 1e-6, "{oracle}");
        assert!(doubled > 0.1, "{doubled}");
    }

    #[test]
    fn sphere_norm_is_constant() {
        let (_, r) = solve("round-sphere-R3", 33, Branch::First);
        let n0 = r.field.values[0].norm_sqr();
        let worst = r
            .field
            .values
            .iter()
            .map(|s| (s.norm_sqr() - n0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn killing_rhs_bar_is_omega() {
        let s = load_preset("round-sphere-R3").unwrap();
        let data = SpecialKillingData::for_surface(&s, Branch::First).unwrap();
        let m = killing_rhs(&data, 1.0, 0.5, 1).unwrap();
        let phi = Spinor::new(C64::new(0.2, 0.1), C64::new(-0.3, 0.7));
        let fp = s.frame.at(1.0, 0.5).unwrap();
        let x = fp.coord_in_frame(1);
        let a = data.shape_at(1.0, 0.5);
        let ax = a * nalgebra::Vector2::new(x[0], x[1]);
        let rep = &s.frame.rep;
        let manual = rep.vec_mat(&[ax[0], ax[1]]) * phi * C64::from(0.5)
            - rep.vec_mat(&x) * crate::clifford::bar_conjugate(rep, phi) * (I * data.lambda())
            - fp.connection_matrix(rep, x) * phi;
        assert!((m * phi - manual).norm() < 1e-15);
    }

    #[test]
    fn isotropic_base_rejected() {
        let s = load_preset("de-sitter-R21").unwrap();
        let r = SpecialKillingData::new(
            s.frame.clone(),
            s.shape_field(),
            s.context,
            Spinor::real(1.0, 0.0),
            Branch::First,
        );
        assert!(matches!(r, Err(Error::IsotropicSpinor { .. })));
    }

    #[test]
    fn perturbed_shape_shows_holonomy() {
        let s = load_preset("round-sphere-R3").unwrap();
        let p = PerturbedShape::new(s.shape_field(), 0.01, s.patch.domain);
        let data = SpecialKillingData::with_shape(&s, Arc::new(p), Branch::First).unwrap();
        let grid = Grid::new(s.patch.domain, 17, 17).unwrap();
        let r = transport_solve(&data, &grid).unwrap();
        assert!(r.holonomy_defect > 1e-3, "{}", r.holonomy_defect);
    }

    #[test]
    fn holonomy_matches_curvature() {
        let s = load_preset("round-sphere-R3").unwrap();
        let d1 = connection_holonomy(&s.frame, 1.0, 0.3, 0.02).unwrap();
        let d2 = connection_holonomy(&s.frame, 1.0, 0.3, 0.01).unwrap();
        assert!(d1.curvature > 0.1);
        assert!(d2.defect < d1.defect && d1.defect < 0.05, "{d1:?} {d2:?}");
    }

    #[test]
    fn holonomy_converges_at_first_order() {
        let s = load_preset("round-sphere-R3").unwrap();
        let c = holonomy_convergence(&s.frame, &[32, 64, 128]).unwrap();
        assert!(!c.exact);
        assert!(c.min_order() >= 0.9, "{c:?}");
        let flat = load_preset("flat-plane-R3").unwrap();
        assert!(holonomy_convergence(&flat.frame, &[32, 64]).unwrap().exact);
    }

    #[test]
    fn csv_dump() {
        let (_, r) = solve("flat-plane-R3", 5, Branch::First);
        let csv = spinor_csv(&r.field);
        assert_eq!(csv.lines().count(), 26);
    }
}
