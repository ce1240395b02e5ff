//! Metric and spinor field sources: analytic closures, finite-difference
//! wrappers and sampled grids.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::fd;
use crate::clifford::{GammaRep, Spinor};
use crate::error::{Error, Result};

pub const MIN_NODES: usize = 5;

/// Metric components with first and second partial derivatives.
///
/// Component arrays are ordered `[g11, g12, g22]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricJet {
    pub g: [f64; 3],
    pub du: [f64; 3],
    pub dv: [f64; 3],
    pub duu: [f64; 3],
    pub duv: [f64; 3],
    pub dvv: [f64; 3],
}

fn sym(c: &[f64; 3]) -> Matrix2<f64> {
    Matrix2::new(c[0], c[1], c[1], c[2])
}

impl MetricJet {
    /// Jet of a diagonal metric `a(u,v) du^2 + b(u,v) dv^2` from jets of `a` and `b`.
    ///
    /// Each jet is `[value, d_u, d_v, d_uu, d_uv, d_vv]`.
    pub fn diagonal(a: [f64; 6], b: [f64; 6]) -> Self {
        Self {
            g: [a[0], 0.0, b[0]],
            du: [a[1], 0.0, b[1]],
            dv: [a[2], 0.0, b[2]],
            duu: [a[3], 0.0, b[3]],
            duv: [a[4], 0.0, b[4]],
            dvv: [a[5], 0.0, b[5]],
        }
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        sym(&self.g)
    }

    /// `d g / d x^k` for `k = 0 (u), 1 (v)`.
    pub fn first(&self, k: usize) -> Matrix2<f64> {
        sym(if k == 0 { &self.du } else { &self.dv })
    }

    /// `d^2 g / d x^k d x^l`.
    pub fn second(&self, k: usize, l: usize) -> Matrix2<f64> {
        sym(match (k, l) {
            (0, 0) => &self.duu,
            (1, 1) => &self.dvv,
            _ => &self.duv,
        })
    }

    pub fn det(&self) -> f64 {
        self.g[0] * self.g[2] - self.g[1] * self.g[1]
    }

    pub fn scaled(&self, s: f64) -> Self {
        let m = |c: [f64; 3]| [c[0] * s, c[1] * s, c[2] * s];
        Self {
            g: m(self.g),
            du: m(self.du),
            dv: m(self.dv),
            duu: m(self.duu),
            duv: m(self.duv),
            dvv: m(self.dvv),
        }
    }
}

/// A source of metric jets over a chart.
pub trait MetricField: Send + Sync {
    fn jet(&self, u: f64, v: f64) -> MetricJet;
}

/// Metric with closed-form partial derivatives.
#[derive(Clone)]
pub struct AnalyticMetric {
    f: Arc<dyn Fn(f64, f64) -> MetricJet + Send + Sync>,
}

impl AnalyticMetric {
    pub fn new(f: impl Fn(f64, f64) -> MetricJet + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }
}

impl MetricField for AnalyticMetric {
    fn jet(&self, u: f64, v: f64) -> MetricJet {
        (self.f)(u, v)
    }
}

impl fmt::Debug for AnalyticMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("AnalyticMetric")
    }
}

/// Metric given by component values only; partials by fourth-order differences.
#[derive(Clone)]
pub struct FdMetric {
    f: Arc<dyn Fn(f64, f64) -> [f64; 3] + Send + Sync>,
    pub h: f64,
}

impl FdMetric {
    pub fn new(h: f64, f: impl Fn(f64, f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), h }
    }
}

impl MetricField for FdMetric {
    fn jet(&self, u: f64, v: f64) -> MetricJet {
        let h = self.h;
        let comp = |c: usize| {
            let f = &self.f;
            let g = move |a: f64, b: f64| f(a, b)[c];
            let du = fd::central(|x| g(x, v), u, h);
            let dv = fd::central(|y| g(u, y), v, h);
            let duu = fd::central2(|x| g(x, v), u, h);
            let dvv = fd::central2(|y| g(u, y), v, h);
            let duv = fd::central(|y| fd::central(|x| g(x, y), u, h), v, h);
            [du, dv, duu, duv, dvv]
        };
        let c: Vec<[f64; 5]> = (0..3).map(comp).collect();
        let pick = |k: usize| [c[0][k], c[1][k], c[2][k]];
        MetricJet {
            g: (self.f)(u, v),
            du: pick(0),
            dv: pick(1),
            duu: pick(2),
            duv: pick(3),
            dvv: pick(4),
        }
    }
}

/// Rectangle `[u0,u1] x [v0,v1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Domain {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Self { u0, u1, v0, v1 }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let tol = 1e-12 * (1.0 + self.u1.abs().max(self.v1.abs()));
        u >= self.u0 - tol && u <= self.u1 + tol && v >= self.v0 - tol && v <= self.v1 + tol
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.u0 + self.u1), 0.5 * (self.v0 + self.v1))
    }
}

/// Uniform node grid over a domain, `nu x nv` nodes including the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub domain: Domain,
    pub nu: usize,
    pub nv: usize,
}

impl Grid {
    pub fn new(domain: Domain, nu: usize, nv: usize) -> Result<Self> {
        if nu < MIN_NODES || nv < MIN_NODES {
            return Err(Error::GridTooCoarse {
                min: MIN_NODES,
                nu,
                nv,
            });
        }
        Ok(Self { domain, nu, nv })
    }

    pub fn hu(&self) -> f64 {
        (self.domain.u1 - self.domain.u0) / (self.nu - 1) as f64
    }

    pub fn hv(&self) -> f64 {
        (self.domain.v1 - self.domain.v0) / (self.nv - 1) as f64
    }

    pub fn u(&self, i: usize) -> f64 {
        self.domain.u0 + i as f64 * self.hu()
    }

    pub fn v(&self, j: usize) -> f64 {
        self.domain.v0 + j as f64 * self.hv()
    }

    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (self.u(i), self.v(j))
    }

    /// Row-major index with `u` varying slowest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nu, self.nv)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nu).flat_map(move |i| (0..self.nv).map(move |j| (i, j)))
    }

    /// Node at `(u, v)` if it coincides with one up to round-off.
    pub fn node_at(&self, u: f64, v: f64) -> Option<(usize, usize)> {
        let fi = (u - self.domain.u0) / self.hu();
        let fj = (v - self.domain.v0) / self.hv();
        let (i, j) = (fi.round(), fj.round());
        let ok = (fi - i).abs() < 1e-9 && (fj - j).abs() < 1e-9;
        (ok && i >= 0.0 && j >= 0.0 && (i as usize) < self.nu && (j as usize) < self.nv)
            .then_some((i as usize, j as usize))
    }

    /// Fourth-order partials `(d/du, d/dv)` of sampled data at node `(i, j)`.
    pub fn partials<T: fd::Differentiable>(&self, data: &[T], i: usize, j: usize) -> (T, T) {
        let du = fd::derivative(|k| data[self.index(k, j)], self.nu, i, self.hu());
        let dv = fd::derivative(|k| data[self.index(i, k)], self.nv, j, self.hv());
        (du, dv)
    }
}

/// Where a spinor field is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Node(usize, usize),
    Point(f64, f64),
}

/// Value and coordinate partials of a spinor field at one location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorJet {
    pub u: f64,
    pub v: f64,
    pub value: Spinor,
    pub du: Spinor,
    pub dv: Spinor,
}

/// Spinor field over a chart, sampled or closed-form.
pub trait SpinorField: Send + Sync {
    fn rep(&self) -> &GammaRep;
    fn jet(&self, at: Location) -> Result<SpinorJet>;
}

/// Spinor values on a [`Grid`].
#[derive(Debug, Clone)]
pub struct GridSpinorField {
    pub rep: GammaRep,
    pub grid: Grid,
    pub values: Vec<Spinor>,
}

impl GridSpinorField {
    pub fn new(rep: GammaRep, grid: Grid, values: Vec<Spinor>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { rep, grid, values })
    }

    /// Samples a closed-form map on the grid.
    pub fn sample(rep: GammaRep, grid: Grid, f: impl Fn(f64, f64) -> Spinor) -> Self {
        let values = grid
            .nodes()
            .map(|(i, j)| {
                let (u, v) = grid.coords(i, j);
                f(u, v)
            })
            .collect();
        Self { rep, grid, values }
    }

    pub fn at(&self, i: usize, j: usize) -> Spinor {
        self.values[self.grid.index(i, j)]
    }

    /// Pointwise linear combination `a self + b other` on the same grid.
    pub fn combine(&self, a: crate::clifford::C64, other: &Self, b: crate::clifford::C64) -> Result<Self> {
        if self.grid.shape() != other.grid.shape() {
            return Err(Error::ShapeMismatch {
                a: self.grid.shape(),
                b: other.grid.shape(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| *x * a + *y * b)
            .collect();
        Ok(Self {
            rep: self.rep.clone(),
            grid: self.grid,
            values,
        })
    }
}

impl SpinorField for GridSpinorField {
    fn rep(&self) -> &GammaRep {
        &self.rep
    }

    fn jet(&self, at: Location) -> Result<SpinorJet> {
        let (i, j) = match at {
            Location::Node(i, j) if i < self.grid.nu && j < self.grid.nv => (i, j),
            Location::Node(i, j) => {
                return Err(Error::InvalidContext(format!(
                    "node ({i},{j}) outside {}x{} grid",
                    self.grid.nu, self.grid.nv
                )))
            }
            Location::Point(u, v) => self.grid.node_at(u, v).ok_or_else(|| {
                Error::InvalidContext(format!("({u}, {v}) is not a grid node"))
            })?,
        };
        let (u, v) = self.grid.coords(i, j);
        let (du, dv) = self.grid.partials(&self.values, i, j);
        Ok(SpinorJet {
            u,
            v,
            value: self.at(i, j),
            du,
            dv,
        })
    }
}

/// Closed-form spinor field, differentiated by fourth-order central differences.
#[derive(Clone)]
pub struct ClosedSpinorField {
    pub rep: GammaRep,
    f: Arc<dyn Fn(f64, f64) -> Spinor + Send + Sync>,
    pub h: f64,
}

impl ClosedSpinorField {
    pub fn new(rep: GammaRep, h: f64, f: impl Fn(f64, f64) -> Spinor + Send + Sync + 'static) -> Self {
        Self {
            rep,
            f: Arc::new(f),
            h,
        }
    }

    pub fn value(&self, u: f64, v: f64) -> Spinor {
        (self.f)(u, v)
    }
}

impl SpinorField for ClosedSpinorField {
    fn rep(&self) -> &GammaRep {
        &self.rep
    }

    fn jet(&self, at: Location) -> Result<SpinorJet> {
        let (u, v) = match at {
            Location::Point(u, v) => (u, v),
            Location::Node(..) => {
                return Err(Error::InvalidContext(
                    "closed-form fields are evaluated at points".into(),
                ))
            }
        };
        Ok(SpinorJet {
            u,
            v,
            value: self.value(u, v),
            du: fd::central(|x| self.value(x, v), u, self.h),
            dv: fd::central(|y| self.value(u, y), v, self.h),
        })
    }
}
