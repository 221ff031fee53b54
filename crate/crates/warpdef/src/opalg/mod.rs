//! Exact operator algebra over the Heisenberg pair `(X, P)`.

pub mod coord;
pub mod eval;
pub mod expr;
pub mod json;
pub mod matrix;
pub mod parse;
pub mod scalar;

pub use coord::{CoordFunction, CoordKey};
pub use expr::{adjoint, anticommutator, commutator, commutator_in, multiply, multiply_in, Convention, MomentumIndex, OperatorExpr};
pub use scalar::{CRational, Monomial, Rational, Scalar, ScalarError, KNOWN_CONSTANTS};
pub use eval::{coord_equals, equals, equals_with, evaluate, evaluate_coord, find_difference, EvalError, NumericCoord, RadicalValue};
pub use parse::{canonical_constant, parse, parse_coord, parse_scalar, parse_with, ParseError};
pub use json::{from_json, to_json, JsonError};
pub use matrix::{levi_civita, DeformationMatrix, MatrixError, QPreset, QSpec};
