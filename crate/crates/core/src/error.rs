use thiserror::Error;

/// Errors raised by the geometry and spinor routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid signature ({p},{q}): {reason}")]
    InvalidSignature { p: usize, q: usize, reason: String },

    #[error("no 2x2 representation for signature ({p},{q}) under sigma={sigma}, tau={tau}: {reason}")]
    NoRepresentation {
        p: usize,
        q: usize,
        sigma: i8,
        tau: i8,
        reason: String,
    },

    #[error("dimension mismatch: expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("convention audit inconclusive: {passing} conventions passed")]
    AuditInconclusive { passing: usize },

    #[error("degenerate chart at ({u:.6}, {v:.6}): {reason}")]
    DegenerateChart { u: f64, v: f64, reason: String },

    #[error("chart signature mismatch at ({u:.6}, {v:.6}): declared ({p},{q}), found frame signs ({eps1},{eps2})")]
    SignatureMismatch {
        u: f64,
        v: f64,
        p: usize,
        q: usize,
        eps1: i8,
        eps2: i8,
    },

    #[error("grid too coarse: need at least {min} nodes per direction, got {nu}x{nv}")]
    GridTooCoarse { min: usize, nu: usize, nv: usize },

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("degenerate normal at ({u:.6}, {v:.6}): <nu,nu> = {norm:e}")]
    NormalDegenerate { u: f64, v: f64, norm: f64 },

    #[error("isotropic spinor at node ({i},{j}): |<phi+,phi->| = {margin:e}")]
    IsotropicSpinor { i: usize, j: usize, margin: f64 },

    #[error("vanishing half-spinors at node ({i},{j}): |phi+|^2 = {plus:e}, |phi-|^2 = {minus:e}")]
    VanishingHalfSpinor { i: usize, j: usize, plus: f64, minus: f64 },

    #[error("spinor transport unstable at node ({i},{j}): |phi| = {norm:e}")]
    StepUnstable { i: usize, j: usize, norm: f64 },

    #[error("Dirac residual {residual:e} exceeds tolerance {tolerance:e}")]
    DiracResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("norm assumption N{sign} violated: defect {defect:e} > {tolerance:e}")]
    NormAssumptionViolated {
        sign: char,
        defect: f64,
        tolerance: f64,
    },

    #[error("case undetermined: i*lambda/epsilon = {re:e} + {im:e}i is neither real nor imaginary")]
    CaseUndetermined { re: f64, im: f64 },

    #[error("integrability violated: max|G| = {g_max:e}, max|C| = {c_max:e}, tolerance {tolerance:e}")]
    IntegrabilityViolated {
        g_max: f64,
        c_max: f64,
        tolerance: f64,
    },

    #[error("frame drift {drift:e} exceeds {tolerance:e} at node ({i},{j})")]
    FrameDrift {
        i: usize,
        j: usize,
        drift: f64,
        tolerance: f64,
    },

    #[error("grid shape mismatch: {a:?} vs {b:?}")]
    ShapeMismatch { a: (usize, usize), b: (usize, usize) },

    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
