//! Numerical tensor calculus on sub-Riemannian manifolds.
//!
//! Frames, metrics and one-forms are expression trees evaluated through
//! second-order Taylor jets, so every frame derivative in the curvature
//! formulas is exact up to rounding. On top of that sit the horizontal
//! connection ∇, the semi-symmetric connection D, their Schouten curvatures,
//! and a verifier that checks the identities relating them at sampled points.

pub mod connection;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod field;
pub mod frontend;
pub mod jet;
mod linalg;
pub mod manifold;
pub mod tensor;
pub mod verifier;

pub use connection::{koszul_connection, semi_connection, ConnectionField, ConnectionKind, OneFormData};
pub use curvature::{characteristic_tensor, schouten_curvature, CharacteristicTensor, CurvatureBundle};
pub use error::{Error, Result};
pub use expr::{jet_eval, Expression, Func};
pub use field::{directional_derivative, fd_crosscheck, ScalarField, VectorField};
pub use frontend::catalog::{builtin, CatalogEntry};
pub use frontend::parser::parse_manifold;
pub use jet::Jet;
pub use manifold::{lie_bracket, project_h, snapshot, FrameSnapshot, ManifoldSpec, VectorFieldSpec};
pub use verifier::{run_suite, Report, SuiteConfig};
