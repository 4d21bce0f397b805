//! Operator expressions, the identity database and the derivation engine.

mod db;
mod derive;
mod expr;
mod scalar;
mod symbol;
mod universal;
mod verify;

pub use db::{database_load, Database, FormFamily, Identity, Provenance, Recipe, DB_ENV};
pub use derive::{
    derive, derive_composite, derive_identity, eliminate, input_expr, run_recipe, target_expr,
    Derivation, Goal,
};
pub use expr::OpExpr;
pub use scalar::{
    check_qr_consistency, qr_formula_difference, scalar_solve, scalar_solve_with, LinearForm,
    QrCheck, QrDifference, QrStatus, ScalarSolution,
};
pub use symbol::OpSymbol;
pub use universal::{pseudo_identity, universal_exprs, Universal, PSEUDO_IDS};
pub use verify::{verify_all, verify_one, CheckStatus, IdentityCheck, VerifyOptions, VerifyReport};

use crate::qfield::QfieldError;
use crate::repcalc::RepError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WbkError {
    #[error("unknown symbol '{0}'")]
    UnknownSymbol(String),
    #[error("unknown identity '{0}'")]
    UnknownIdentity(String),
    #[error("identity '{0}' has no provenance")]
    MissingProvenance(String),
    #[error("identity '{id}': {msg}")]
    Malformed { id: String, msg: String },
    #[error("elimination is ambiguous: {dim} independent results")]
    Ambiguous { dim: usize },
    #[error("elimination is impossible: every combination of rank {rank} inputs vanishes")]
    Impossible { rank: usize },
    #[error("scalar system is inconsistent at identity '{id}'")]
    Inconsistent { id: String },
    #[error("not a consequence of the given identities: {0}")]
    NotInSpan(String),
    #[error("unsupported derivation: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
    #[error(transparent)]
    Qfield(#[from] QfieldError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

impl From<serde_json::Error> for WbkError {
    fn from(e: serde_json::Error) -> Self {
        WbkError::Json(e.to_string())
    }
}
