//! Exact arithmetic in ℚ(n) and linear algebra over it.

mod linsys;
mod parse;
mod poly;
mod ratfn;

pub use linsys::{dot, LinearSystem, Matrix, Rref, Solution};
pub use poly::Poly;
pub use ratfn::{RationalFn, Style};

pub use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QfieldError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at n = {n}: factor ({factor}) vanishes")]
    Pole { n: i64, factor: String },
    #[error("cannot parse '{input}' at offset {pos}: {msg}")]
    Parse {
        input: String,
        pos: usize,
        msg: String,
    },
    #[error("inconsistent system: row {row} reduces to 0 = {residual}")]
    Inconsistent { row: usize, residual: RationalFn },
    #[error("dimension mismatch: {0}")]
    Shape(String),
}
