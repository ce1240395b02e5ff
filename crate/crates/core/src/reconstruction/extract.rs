//! Shape operator extraction from a spinor field solving the Dirac equation.
//!
//! Signature (1,1) uses the tensors `beta+-(e_i,e_j) = <eps (nabla_i phi)+-, e_j.phi+->`
//! normalized by `P = <phi+, phi->`:
//! `B = beta+/conj(P) + beta-/P = eps^2 A + 2 conj(i eps lambda) c`,
//! with `c` the unit antisymmetric form.
//!
//! Definite signatures use `Q+(X,Y) = Re<eps (nabla_X phi)+, Y.phi->/h-` and its
//! mirror `Q-`, where `h+-` are the diagonal entries of the pairing. Then
//! `Q+ = |phi-|^2 ((eps^2/2) A - Im(eps lambda) g - s Re(eps lambda) c)` and
//! `Q- = |phi+|^2 ((eps^2/2) A + Im(eps lambda) g - s Re(eps lambda) c)`,
//! with `s = 1` for (2,0) and `s = -1` for (0,2).

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{lowered, raised};
use crate::chart::{FrameField, FramePoint, GridSpinorField, SpinorJet};
use crate::clifford::{inner_product, split_spinor, GammaRep, ImmersionContext, Spinor, C64, I};
use crate::error::{Error, Result};
use crate::transport::Branch;

use super::grid_shape::GridShapeField;
use super::oracle::DiracCoefficients;

pub type CMatrix2 = Matrix2<Complex64>;

pub const ISOTROPY_TOL: f64 = 1e-8;
pub const HALF_SPINOR_TOL: f64 = 1e-10;
pub const CASE_TOL: f64 = 1e-12;
pub const DEFAULT_DIRAC_TOL: f64 = 1e-6;
pub const DEFAULT_NORM_TOL: f64 = 1e-6;

/// Case split on `i lambda / eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LambdaCase {
    /// `i lambda / eps` real and nonzero.
    Real,
    /// `i lambda / eps` purely imaginary, including `lambda = 0`.
    Imaginary,
}

/// Which extraction formula applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExtractionBranch {
    IndefiniteReal,
    IndefiniteImaginary,
    DefiniteCase1,
    DefiniteCase2,
}

pub fn lambda_case(ctx: &ImmersionContext) -> Result<LambdaCase> {
    let z = ctx.i_lambda_over_eps();
    if z.norm() <= CASE_TOL || z.re.abs() <= CASE_TOL {
        Ok(LambdaCase::Imaginary)
    } else if z.im.abs() <= CASE_TOL {
        Ok(LambdaCase::Real)
    } else {
        Err(Error::CaseUndetermined { re: z.re, im: z.im })
    }
}

pub fn extraction_branch(rep: &GammaRep, ctx: &ImmersionContext) -> Result<ExtractionBranch> {
    let case = lambda_case(ctx)?;
    Ok(match (rep.signature.q == 1, case) {
        (true, LambdaCase::Real) => ExtractionBranch::IndefiniteReal,
        (true, LambdaCase::Imaginary) => ExtractionBranch::IndefiniteImaginary,
        (false, LambdaCase::Real) => ExtractionBranch::DefiniteCase1,
        (false, LambdaCase::Imaginary) => ExtractionBranch::DefiniteCase2,
    })
}

/// Field value, partials and covariant derivatives at one node.
#[derive(Debug, Clone, Copy)]
pub struct NodeSpinor {
    pub frame: FramePoint,
    pub jet: SpinorJet,
    pub nabla: [Spinor; 2],
    pub dirac: Spinor,
}

pub fn node_spinor(field: &GridSpinorField, frame: &FrameField, i: usize, j: usize) -> Result<NodeSpinor> {
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
    let fp = frame.at(u, v)?;
    let nabla = [0, 1].map(|k| fp.covariant(&frame.rep, &jet, k));
    let dirac = (0..2).fold(Spinor::ZERO, |acc, k| {
        acc + (frame.rep.gamma[k] * nabla[k]) * fp.eps_f(k)
    });
    Ok(NodeSpinor {
        frame: fp,
        jet,
        nabla,
        dirac,
    })
}

fn nodes_of(field: &GridSpinorField) -> Vec<(usize, usize)> {
    field.grid.nodes().collect()
}

/// The `beta` tensors at one point of a (1,1) surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaAt {
    pub beta_plus: CMatrix2,
    pub beta_minus: CMatrix2,
    /// `<phi+, phi->`.
    pub pairing: C64,
    /// `B = beta+/conj(P) + beta-/P`.
    pub b: CMatrix2,
    /// `B(e1,e2) - B(e2,e1)`.
    pub symmetry_defect: C64,
    /// `g`-trace of `B` computed from the Dirac operator alone.
    pub dirac_trace: C64,
}

/// Pointwise `beta` tensors; `lambda` does not enter.
pub fn beta_at(rep: &GammaRep, ctx: &ImmersionContext, node: &NodeSpinor, at: (usize, usize)) -> Result<BetaAt> {
    let eps = ctx.eps();
    let phi = node.jet.value;
    let (pp, pm) = split_spinor(rep, phi);
    let p = inner_product(rep, pp, pm);
    if !(p.norm() >= ISOTROPY_TOL) {
        return Err(Error::IsotropicSpinor {
            i: at.0,
            j: at.1,
            margin: p.norm(),
        });
    }
    let halves: Vec<(Spinor, Spinor)> = node.nabla.iter().map(|n| split_spinor(rep, *n)).collect();
    let beta_plus = CMatrix2::from_fn(|i, j| inner_product(rep, halves[i].0 * eps, rep.gamma[j] * pp));
    let beta_minus = CMatrix2::from_fn(|i, j| inner_product(rep, halves[i].1 * eps, rep.gamma[j] * pm));
    let b = beta_plus / p.conj() + beta_minus / p;
    let (dp, dm) = split_spinor(rep, node.dirac);
    let tr_plus = -inner_product(rep, dm * eps, pp);
    let tr_minus = -inner_product(rep, dp * eps, pm);
    Ok(BetaAt {
        beta_plus,
        beta_minus,
        pairing: p,
        b,
        symmetry_defect: b[(0, 1)] - b[(1, 0)],
        dirac_trace: tr_plus / p.conj() + tr_minus / p,
    })
}

/// `beta` tensors over a grid field of signature (1,1).
pub fn beta_tensor(field: &GridSpinorField, frame: &FrameField, ctx: &ImmersionContext) -> Result<Vec<BetaAt>> {
    if field.rep.signature.q != 1 {
        return Err(Error::InvalidSignature {
            p: field.rep.signature.p,
            q: field.rep.signature.q,
            reason: "beta tensors are defined for signature (1,1)".into(),
        });
    }
    nodes_of(field)
        .par_iter()
        .map(|&(i, j)| {
            let node = node_spinor(field, frame, i, j)?;
            beta_at(&field.rep, ctx, &node, (i, j))
        })
        .collect()
}

/// The `Q` tensors at one point of a definite surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QAt {
    pub q_plus: Matrix2<f64>,
    pub q_minus: Matrix2<f64>,
    pub norm_plus: f64,
    pub norm_minus: f64,
    /// `g`-traces of `Q+-` computed from the Dirac operator alone.
    pub dirac_trace_plus: f64,
    pub dirac_trace_minus: f64,
}

impl QAt {
    pub fn trace_plus(&self, eps: [i8; 2]) -> f64 {
        eps[0] as f64 * self.q_plus[(0, 0)] + eps[1] as f64 * self.q_plus[(1, 1)]
    }

    pub fn trace_minus(&self, eps: [i8; 2]) -> f64 {
        eps[0] as f64 * self.q_minus[(0, 0)] + eps[1] as f64 * self.q_minus[(1, 1)]
    }

    /// `|phi+|^2 Q+ - |phi-|^2 Q-`, which is `|phi+|^2 |phi-|^2 W`.
    pub fn weighted_w(&self) -> Matrix2<f64> {
        self.q_plus * self.norm_plus - self.q_minus * self.norm_minus
    }
}

pub fn q_at(rep: &GammaRep, ctx: &ImmersionContext, node: &NodeSpinor, at: (usize, usize)) -> Result<QAt> {
    let eps = ctx.eps();
    let h = rep.pairing();
    let (hp, hm) = (h[(0, 0)].re, h[(1, 1)].re);
    let phi = node.jet.value;
    let (pp, pm) = split_spinor(rep, phi);
    let (np, nm) = (pp.norm_sqr(), pm.norm_sqr());
    if np < HALF_SPINOR_TOL && nm < HALF_SPINOR_TOL {
        return Err(Error::VanishingHalfSpinor {
            i: at.0,
            j: at.1,
            plus: np,
            minus: nm,
        });
    }
    let halves: Vec<(Spinor, Spinor)> = node.nabla.iter().map(|n| split_spinor(rep, *n)).collect();
    let q_plus = Matrix2::from_fn(|i, j| inner_product(rep, halves[i].0 * eps, rep.gamma[j] * pm).re / hm);
    let q_minus = Matrix2::from_fn(|i, j| inner_product(rep, halves[i].1 * eps, rep.gamma[j] * pp).re / hp);
    let (dp, dm) = split_spinor(rep, node.dirac);
    Ok(QAt {
        q_plus,
        q_minus,
        norm_plus: np,
        norm_minus: nm,
        dirac_trace_plus: -inner_product(rep, dm * eps, pm).re / hm,
        dirac_trace_minus: -inner_product(rep, dp * eps, pp).re / hp,
    })
}

/// `Q` tensors over a grid field of definite signature.
pub fn q_tensors(field: &GridSpinorField, frame: &FrameField, ctx: &ImmersionContext) -> Result<Vec<QAt>> {
    if field.rep.signature.q == 1 {
        return Err(Error::InvalidSignature {
            p: 1,
            q: 1,
            reason: "Q tensors are defined for definite signatures".into(),
        });
    }
    nodes_of(field)
        .par_iter()
        .map(|&(i, j)| {
            let node = node_spinor(field, frame, i, j)?;
            q_at(&field.rep, ctx, &node, (i, j))
        })
        .collect()
}

/// Residuals of the `Q` trace and symmetry identities against a known `H`.
///
/// Returns `(ours, displayed)` where `ours` uses
/// `tr Q+- = -(eps^2 H +- 2 Im(eps lambda)) |phi-+|^2` and
/// `Q+-(e1,e2) - Q+-(e2,e1) = -2 s Re(eps lambda) |phi-+|^2`, and `displayed` uses
/// `tr Q+- = -eps^2 (H +- 2 Re lambda) |phi-+|^2` and a defect of `+2 Re(eps lambda) |phi-+|^2`.
pub fn q_identity_residuals(
    q: &QAt,
    eps_frame: [i8; 2],
    ctx: &ImmersionContext,
    lambda: C64,
    h: f64,
) -> ([f64; 2], [f64; 2]) {
    let e2 = ctx.epsilon.square();
    let el = ctx.eps() * lambda;
    let s = if eps_frame == [-1, -1] { -1.0 } else { 1.0 };
    let (np, nm) = (q.norm_plus, q.norm_minus);
    let trace_ours = (q.trace_plus(eps_frame) + (e2 * h + 2.0 * el.im) * nm).abs()
        .max((q.trace_minus(eps_frame) + (e2 * h - 2.0 * el.im) * np).abs());
    let trace_disp = (q.trace_plus(eps_frame) + e2 * (h + 2.0 * lambda.re) * nm).abs()
        .max((q.trace_minus(eps_frame) + e2 * (h - 2.0 * lambda.re) * np).abs());
    let sym_p = q.q_plus[(0, 1)] - q.q_plus[(1, 0)];
    let sym_m = q.q_minus[(0, 1)] - q.q_minus[(1, 0)];
    let sym_ours = (sym_p + 2.0 * s * el.re * nm).abs().max((sym_m + 2.0 * s * el.re * np).abs());
    let sym_disp = (sym_p - 2.0 * el.re * nm).abs().max((sym_m - 2.0 * el.re * np).abs());
    ([trace_ours, sym_ours], [trace_disp, sym_disp])
}

/// Options of [`extract_shape_operator`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtractOptions {
    pub dirac_tol: f64,
    pub norm_tol: f64,
    pub coefficients: DiracCoefficients,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            dirac_tol: DEFAULT_DIRAC_TOL,
            norm_tol: DEFAULT_NORM_TOL,
            coefficients: DiracCoefficients::ORACLE,
        }
    }
}

/// Per-node output of the extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractedAt {
    /// Frame matrix of `A` (column `k` is `A(e_k)`).
    pub a: Matrix2<f64>,
    /// Mean curvature from the Dirac traces.
    pub h: f64,
    /// Antisymmetric part: `T(e1,e2)` in (1,1), `F(e1,e2) - F(e2,e1)` otherwise.
    pub antisymmetric: C64,
    /// Deviation of the antisymmetric part from its predicted value.
    pub antisymmetric_defect: f64,
    /// `W` deviation from `-2 Im(eps lambda) g`, scaled by `|phi|^-4` (definite only).
    pub w_defect: f64,
    /// Largest entry of the scaled `W` itself (definite only).
    pub w_norm: f64,
    /// Imaginary part of `Sym(B)` (1,1 only).
    pub imaginary_defect: f64,
}

/// Summary of the extraction over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionTrace {
    pub branch: ExtractionBranch,
    pub dirac_residual: f64,
    pub norm: NormReport,
    /// Largest `|g(Ae1,e2) - g(e1,Ae2)|`.
    pub symmetry_defect: f64,
    /// Largest `|tr A + 2H|`.
    pub trace_law_defect: f64,
    pub antisymmetric_defect: f64,
    pub w_max: f64,
    pub w_defect: f64,
    pub imaginary_defect: f64,
    /// Residual of the special Killing equation with the extracted `A`.
    pub statement_residual: f64,
    #[serde(skip)]
    pub nodes: Vec<ExtractedAt>,
    #[serde(skip)]
    pub shape: GridShapeField,
}

impl ReconstructionTrace {
    pub fn extracted_h(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.h).collect()
    }
}

/// Pointwise extraction, returning `A` for the equation the field solves.
pub fn extract_at(
    rep: &GammaRep,
    ctx: &ImmersionContext,
    lambda: C64,
    node: &NodeSpinor,
    at: (usize, usize),
) -> Result<ExtractedAt> {
    let e2 = ctx.epsilon.square();
    let el = ctx.eps() * lambda;
    let eps_frame = node.frame.eps;
    let g = Matrix2::new(eps_frame[0] as f64, 0.0, 0.0, eps_frame[1] as f64);
    if rep.signature.q == 1 {
        let beta = beta_at(rep, ctx, node, at)?;
        let sym = (beta.b + beta.b.transpose()) * C64::from(0.5);
        let bil = sym.map(|z| z.re) / e2;
        let imaginary_defect = sym.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let t12 = (beta.b[(0, 1)] - beta.b[(1, 0)]) * 0.5;
        let predicted = (I * el).conj() * 2.0;
        let tr = beta.dirac_trace;
        Ok(ExtractedAt {
            a: raised(&bil, eps_frame),
            h: -tr.re / (2.0 * e2),
            antisymmetric: t12,
            antisymmetric_defect: (t12 - predicted).norm(),
            w_defect: 0.0,
            w_norm: 0.0,
            imaginary_defect: imaginary_defect.max(tr.im.abs()),
        })
    } else {
        let q = q_at(rep, ctx, node, at)?;
        let (np, nm) = (q.norm_plus, q.norm_minus);
        let total = np + nm;
        let case = lambda_case(ctx)?;
        let f = match case {
            LambdaCase::Real => (q.q_plus + q.q_minus - g * (el.im * (np - nm))) * (2.0 / total),
            LambdaCase::Imaginary => (q.q_plus + q.q_minus) / total,
        };
        let bil = match case {
            LambdaCase::Real => (f + f.transpose()) * (0.5 / e2),
            LambdaCase::Imaginary => (f + f.transpose()) / e2,
        };
        let s = if eps_frame == [-1, -1] { -1.0 } else { 1.0 };
        let anti = f[(0, 1)] - f[(1, 0)];
        let predicted = match case {
            LambdaCase::Real => -4.0 * s * el.re,
            LambdaCase::Imaginary => -2.0 * s * el.re,
        };
        let w = q.weighted_w() / (total * total);
        let w_expected = g * (-2.0 * el.im * np * nm / (total * total));
        let trace_sum = q.dirac_trace_plus + q.dirac_trace_minus;
        let h = -(trace_sum + 2.0 * el.im * (nm - np)) / (e2 * total);
        Ok(ExtractedAt {
            a: raised(&bil, eps_frame),
            h,
            antisymmetric: C64::from(anti),
            antisymmetric_defect: (anti - predicted).abs(),
            w_defect: (w - w_expected).abs().max(),
            w_norm: w.abs().max(),
            imaginary_defect: 0.0,
        })
    }
}

/// Residual of the Dirac equation `D phi = a eps H phi + b i lambda phi-bar` with
/// `H` unknown: `D phi - b i lambda phi-bar` must be `eps` times a real multiple of `phi`.
pub fn dirac_fit_residual(rep: &GammaRep, ctx: &ImmersionContext, lambda: C64, b: f64, node: &NodeSpinor) -> f64 {
    let phi = node.jet.value;
    let r = node.dirac - (rep.omega * phi) * (I * lambda * b);
    let n2 = phi.norm_sqr().max(f64::MIN_POSITIVE);
    let c = (phi.plus.conj() * r.plus + phi.minus.conj() * r.minus) / n2;
    let off = (r - phi * c).norm();
    let along = (c / ctx.eps()).im.abs() * phi.norm();
    off.max(along)
}

/// Norm assumption check result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    pub sign: char,
    pub passed: bool,
    /// Largest defect (definite) or smallest non-isotropy margin (1,1).
    pub value: f64,
    pub tolerance: f64,
}

/// Checks the norm assumption with parameter `eta = -eps^2 lambda`.
///
/// Definite signatures, `eps = 1`: `X<phi,phi> -+ 2 Re<i eta X.phi-bar, phi> = 0`;
/// `eps = i`: `X<phi,phi-bar> -+ 2 Re<i eta X.phi, phi> = 0`. Derivatives of the
/// scalar are taken by finite differences on the grid. Signature (1,1) requires
/// `|<phi+,phi->| >= 1e-8` everywhere.
pub fn norm_assumption_check(
    field: &GridSpinorField,
    frame: &FrameField,
    ctx: &ImmersionContext,
    branch: Branch,
    tolerance: f64,
) -> Result<NormReport> {
    norm_assumption_check_with_eta(field, frame, ctx, branch, ctx.norm_eta(), tolerance)
}

/// [`norm_assumption_check`] with an explicit `eta`.
pub fn norm_assumption_check_with_eta(
    field: &GridSpinorField,
    frame: &FrameField,
    ctx: &ImmersionContext,
    branch: Branch,
    eta: C64,
    tolerance: f64,
) -> Result<NormReport> {
    let rep = &field.rep;
    let sign = match branch {
        Branch::First => '+',
        Branch::Second => '-',
    };
    let grid = field.grid;
    if rep.signature.q == 1 {
        let margin = field
            .values
            .iter()
            .map(|phi| {
                let (p, m) = split_spinor(rep, *phi);
                inner_product(rep, p, m).norm()
            })
            .fold(f64::INFINITY, f64::min);
        return Ok(NormReport {
            sign,
            passed: margin >= ISOTROPY_TOL,
            value: margin,
            tolerance: ISOTROPY_TOL,
        });
    }
    let timelike = ctx.epsilon.square() < 0.0;
    let scalar: Vec<f64> = field
        .values
        .iter()
        .map(|phi| {
            let other = if timelike { rep.omega * *phi } else { *phi };
            inner_product(rep, *phi, other).re
        })
        .collect();
    let pm = branch.sign();
    let mut defect: f64 = 0.0;
    for (i, j) in grid.nodes() {
        let (u, v) = grid.coords(i, j);
        let fp = frame.at(u, v)?;
        let (su, sv) = grid.partials(&scalar, i, j);
        let phi = field.at(i, j);
        for k in 0..2 {
            let mut x = [0.0; 2];
            x[k] = 1.0;
            let xs = fp.e[(k, 0)] * su + fp.e[(k, 1)] * sv;
            let moved = if timelike {
                rep.vec_mat(&x) * phi
            } else {
                rep.vec_mat(&x) * (rep.omega * phi)
            };
            let term = 2.0 * inner_product(rep, moved * (I * eta), phi).re;
            defect = defect.max((xs - pm * term).abs());
        }
    }
    Ok(NormReport {
        sign,
        passed: defect <= tolerance,
        value: defect,
        tolerance,
    })
}

/// Recovers the shape operator from a field solving the `branch` equation.
pub fn extract_shape_operator(
    field: &GridSpinorField,
    frame: &FrameField,
    ctx: &ImmersionContext,
    branch: Branch,
    options: &ExtractOptions,
) -> Result<ReconstructionTrace> {
    let rep = &field.rep;
    let extraction_branch = extraction_branch(rep, ctx)?;
    let lambda = ctx.lambda * branch.sign();
    let nodes: Vec<NodeSpinor> = nodes_of(field)
        .par_iter()
        .map(|&(i, j)| node_spinor(field, frame, i, j))
        .collect::<Result<_>>()?;
    let dirac_residual = nodes
        .iter()
        .map(|n| dirac_fit_residual(rep, ctx, lambda, options.coefficients.b, n))
        .fold(0.0, f64::max);
    if !(dirac_residual <= options.dirac_tol) {
        return Err(Error::DiracResidualTooLarge {
            residual: dirac_residual,
            tolerance: options.dirac_tol,
        });
    }
    let norm = norm_assumption_check(field, frame, ctx, branch, options.norm_tol)?;
    if !norm.passed {
        return Err(Error::NormAssumptionViolated {
            sign: norm.sign,
            defect: norm.value,
            tolerance: norm.tolerance,
        });
    }
    let grid = field.grid;
    let raw: Vec<ExtractedAt> = nodes
        .par_iter()
        .enumerate()
        .map(|(idx, n)| extract_at(rep, ctx, lambda, n, (idx / grid.nv, idx % grid.nv)))
        .collect::<Result<_>>()?;
    let sgn = branch.sign();
    let mut out = Vec::with_capacity(raw.len());
    let (mut sym, mut trace, mut anti, mut wmax, mut wdef, mut imag, mut stmt) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (n, x) in nodes.iter().zip(raw) {
        let bil = lowered(&x.a, n.frame.eps);
        sym = sym.max((bil[(0, 1)] - bil[(1, 0)]).abs());
        trace = trace.max((x.a.trace() + 2.0 * x.h).abs());
        anti = anti.max(x.antisymmetric_defect);
        wmax = wmax.max(x.w_norm);
        wdef = wdef.max(x.w_defect);
        imag = imag.max(x.imaginary_defect);
        for k in 0..2 {
            let mut e = [0.0; 2];
            e[k] = 1.0;
            let ax = x.a * nalgebra::Vector2::new(e[0], e[1]);
            let rhs = rep.vec_mat(&[ax[0], ax[1]]) * n.jet.value * (ctx.eps() * 0.5)
                + rep.vec_mat(&e) * (rep.omega * n.jet.value) * (-I * lambda);
            stmt = stmt.max((n.nabla[k] - rhs).norm());
        }
        out.push(ExtractedAt {
            a: x.a * sgn,
            h: x.h * sgn,
            ..x
        });
    }
    let shape = GridShapeField::new(grid, out.iter().map(|x| x.a).collect())?;
    Ok(ReconstructionTrace {
        branch: extraction_branch,
        dirac_residual,
        norm,
        symmetry_defect: sym,
        trace_law_defect: trace,
        antisymmetric_defect: anti,
        w_max: wmax,
        w_defect: wdef,
        imaginary_defect: imag,
        statement_residual: stmt,
        nodes: out,
        shape,
    })
}
