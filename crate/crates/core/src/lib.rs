//! Grid point sets with no `d + 2` points on a common sphere or hyperplane.
//!
//! The pipeline picks a prime `p ≡ 1 (mod 4)`, builds polynomials
//! `f_1, ..., f_d, g, h` over `F_p` with `Σ f_i² = g·h` ([`curve`]), samples the
//! rational curve `t ↦ (f_1(t)/h(t), ..., f_d(t)/h(t))` ([`points`]), moves it
//! into the grid `[n]^d` by a translation, and checks the result with exact
//! determinant predicates ([`verify`]). The `spherefree` binary ([`cli`]) runs
//! the whole pipeline and writes reproducible point files.

pub mod cli;
pub mod curve;
pub mod field;
pub mod linalg;
pub mod points;
pub mod poly;
pub mod verify;

pub use curve::{CurveError, CurveSystem, Mode};
pub use field::{FieldContext, FieldError, PrimeThreshold};
pub use poly::{DensePolynomial, PolyError};
