//! Numerical spin geometry.
//!
//! The crate builds real Clifford representations, frame-trivialized
//! Riemannian models (round spheres, the Lie group S³, hypersurfaces of
//! Euclidean space), and generalized Killing spinor candidates on them, then
//! verifies pointwise — via forward-mode automatic differentiation — the
//! family of identities a generalized Killing spinor must satisfy, including
//! the dimension-specific structures in dimensions 2, 3, 4 and 5.
//!
//! Entry points:
//! - [`clifford::build_clifford_rep`] for the algebra layer,
//! - [`models`] for the manifold models,
//! - [`constructions`] for the shipped spinor candidates,
//! - [`suite::run_suite`] for the named check suites driven by the `verify`
//!   binary.

pub mod ad;
pub mod clifford;
pub mod constructions;
pub mod dims;
pub mod fields;
pub mod gks;
pub mod linalg;
pub mod models;
pub mod report;
pub mod suite;
