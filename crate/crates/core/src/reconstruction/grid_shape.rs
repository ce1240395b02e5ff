//! Shape operator sampled on a grid.

use nalgebra::Matrix2;

use crate::ambient::{ShapeField, ShapeJet};
use crate::chart::Grid;
use crate::error::{Error, Result};

/// Points per direction of the interpolation stencil.
const STENCIL: usize = 6;

/// Grid samples of `A`; sixth-order Lagrange interpolation between nodes,
/// grid stencils at nodes.
#[derive(Debug, Clone, Default)]
pub struct GridShapeField {
    pub grid: Option<Grid>,
    pub values: Vec<Matrix2<f64>>,
}

impl GridShapeField {
    pub fn new(grid: Grid, values: Vec<Matrix2<f64>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            grid: Some(grid),
            values,
        })
    }

    fn grid(&self) -> &Grid {
        self.grid.as_ref().expect("grid shape field is initialized")
    }

    fn component(&self, r: usize, c: usize) -> Vec<f64> {
        self.values.iter().map(|m| m[(r, c)]).collect()
    }

    fn interpolate(&self, u: f64, v: f64) -> ShapeJet {
        let g = self.grid();
        let (su, wu, dwu) = weights(g.domain.u0, g.hu(), g.nu, u);
        let (sv, wv, dwv) = weights(g.domain.v0, g.hv(), g.nv, v);
        let mut jet = ShapeJet {
            a: Matrix2::zeros(),
            du: Matrix2::zeros(),
            dv: Matrix2::zeros(),
        };
        for a in 0..STENCIL {
            for b in 0..STENCIL {
                let m = self.values[g.index(su + a, sv + b)];
                jet.a += m * (wu[a] * wv[b]);
                jet.du += m * (dwu[a] * wv[b]);
                jet.dv += m * (wu[a] * dwv[b]);
            }
        }
        jet
    }
}

/// Stencil start, weights and derivative weights at `x`.
fn weights(x0: f64, h: f64, n: usize, x: f64) -> (usize, [f64; STENCIL], [f64; STENCIL]) {
    let t = (x - x0) / h;
    let start = (t.floor() as isize - (STENCIL as isize / 2 - 1)).clamp(0, (n - STENCIL) as isize) as usize;
    let nodes: [f64; STENCIL] = std::array::from_fn(|k| (start + k) as f64);
    let mut w = [0.0; STENCIL];
    let mut dw = [0.0; STENCIL];
    for k in 0..STENCIL {
        let denom: f64 = (0..STENCIL).filter(|&m| m != k).map(|m| nodes[k] - nodes[m]).product();
        let others: Vec<f64> = (0..STENCIL).filter(|&m| m != k).map(|m| t - nodes[m]).collect();
        w[k] = others.iter().product::<f64>() / denom;
        dw[k] = (0..others.len())
            .map(|skip| {
                others
                    .iter()
                    .enumerate()
                    .filter(|&(m, _)| m != skip)
                    .map(|(_, x)| x)
                    .product::<f64>()
            })
            .sum::<f64>()
            / (denom * h);
    }
    (start, w, dw)
}

impl ShapeField for GridShapeField {
    fn at(&self, u: f64, v: f64) -> Matrix2<f64> {
        let g = self.grid();
        match g.node_at(u, v) {
            Some((i, j)) => self.values[g.index(i, j)],
            None => self.interpolate(u, v).a,
        }
    }

    fn jet(&self, u: f64, v: f64) -> ShapeJet {
        let g = self.grid();
        match g.node_at(u, v) {
            Some((i, j)) => {
                let mut du = Matrix2::zeros();
                let mut dv = Matrix2::zeros();
                for r in 0..2 {
                    for c in 0..2 {
                        let (a, b) = g.partials(&self.component(r, c), i, j);
                        du[(r, c)] = a;
                        dv[(r, c)] = b;
                    }
                }
                ShapeJet {
                    a: self.values[g.index(i, j)],
                    du,
                    dv,
                }
            }
            None => self.interpolate(u, v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Domain;

    #[test]
    fn reproduces_low_degree_polynomials() {
        let grid = Grid::new(Domain::new(0.0, 1.0, -1.0, 1.0), 9, 11).unwrap();
        let f = |u: f64, v: f64| Matrix2::new(u * u * v, v * v * v - u, 1.0, u * v);
        let values = grid.nodes().map(|(i, j)| {
            let (u, v) = grid.coords(i, j);
            f(u, v)
        });
        let s = GridShapeField::new(grid, values.collect()).unwrap();
        for (u, v) in [(0.13, 0.37), (0.99, -0.97), (0.5, 0.01)] {
            let jet = s.jet(u, v);
            assert!((jet.a - f(u, v)).abs().max() < 1e-12);
            let du = Matrix2::new(2.0 * u * v, -1.0, 0.0, v);
            let dv = Matrix2::new(u * u, 3.0 * v * v, 0.0, u);
            assert!((jet.du - du).abs().max() < 1e-10);
            assert!((jet.dv - dv).abs().max() < 1e-10);
        }
        let (u, v) = grid.coords(3, 4);
        assert_eq!(s.at(u, v), f(u, v));
    }
}
