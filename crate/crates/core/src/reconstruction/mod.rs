//! Shape operator recovery, integrability residuals and frame integration.

pub mod extract;
pub mod frame;
pub mod gauss_codazzi;
pub mod grid_shape;
pub mod oracle;
pub mod table;

pub use extract::{
    beta_tensor, extract_shape_operator, norm_assumption_check, norm_assumption_check_with_eta, q_tensors, ExtractOptions, ExtractionBranch,
    LambdaCase, NormReport, ReconstructionTrace,
};
pub use frame::{align, align_and_compare, integrate_frame, Alignment, EmbeddedGrid, IntegrateOptions};
pub use gauss_codazzi::{gauss_codazzi_residual, GaussCodazziReport};
pub use grid_shape::GridShapeField;
pub use oracle::{derive_coefficients, CoefficientSource, DiracCoefficients, OracleFit};
pub use table::{spinor_count, SpinorKind};
