//! Sp(1)·Sp(n) bundles, dimensions and generalized gradients.

mod bundle;
mod gradient;
mod weight;

pub use bundle::{Bundle, Family};
pub use gradient::{
    conformal_weight, edge, edges, relative_dim_constant, sp1_weight, universal_coeff, EdgeIndex,
    GradientEdge, Rank,
};
pub use weight::{binomial, SpnWeight};

use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepError {
    #[error("weight {0:?} is not dominant")]
    NonDominant(Vec<u32>),
    #[error("{what} does not exist at n = {n}")]
    RankTooSmall { what: String, n: i64 },
    #[error("{0}")]
    Syntax(String),
}

/// Weyl dimension of `V_ρ` at rank `n`.
pub fn weyl_dim(w: &SpnWeight, n: i64) -> Result<BigInt, RepError> {
    w.weyl_dim(n)
}

/// `(k+1)·dim V_ρ`.
pub fn bundle_dim(b: &Bundle, n: i64) -> Result<BigInt, RepError> {
    b.dim(n)
}
