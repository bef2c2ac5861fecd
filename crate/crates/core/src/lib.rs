//! Symbolic engine for Lagrangian field theory in the variational bicomplex.
//!
//! The crate computes the premultisymplectic data of a field theory (the
//! Euler-Lagrange form, boundary form, and `omega = EL + d_v gamma`), checks
//! Noether and manifest symmetries, verifies homotopy momentum maps against
//! the L-infinity bracket relations, runs the cohomological obstruction
//! checks on the Lie-algebra/de-Rham double complex, and classifies concrete
//! fields against the homotopy zero locus.
//!
//! The symbolic kernel is generic over the coefficient ring; the crate-root
//! aliases fix it to exact big rationals, which is what every comparison in
//! the engine relies on. The numeric lane (grid samples, quadrature, finite
//! differences) runs on `f64`.

pub mod algebra;
pub mod error;
pub mod expr;
pub mod form;
pub mod jet;
pub mod corpus;
pub mod linfty;
pub mod obstruction;
pub mod reduction;
pub mod print;
pub mod sample;
pub mod scalar;
pub mod selftest;
pub mod theory;
pub mod vector_field;

pub use error::{CoreError, Result};

/// Exact coefficient ring used throughout the artifact.
pub type Rat = num_rational::BigRational;

/// Canonical scalar expression over exact rationals.
pub type Expr = expr::ScalarExpr<Rat>;

/// Bigraded differential form over exact rationals.
pub type Form = form::BigradedForm<Rat>;

/// Jet-space vector field over exact rationals.
pub type VectorField = vector_field::JetVectorField<Rat>;

/// Raw expression tree over exact rationals.
pub type RawRat = expr::RawExpr<Rat>;
