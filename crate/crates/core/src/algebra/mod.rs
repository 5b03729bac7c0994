//! Exact arithmetic: prime-field scalars and matrices, and big rationals.

pub mod field;
pub mod matrix;
pub mod rational;

pub use field::{FieldElement, FieldOp, PrimeField};
pub use matrix::FieldMatrix;
pub use rational::{ratio, Rational};
