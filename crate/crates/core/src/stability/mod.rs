//! Stability verdicts and twisted Dirac indices from spectral input, and the
//! explicit divergence-free tensor `h = h₁ + h₂` built from an eigenfunction.
//!
//! Spectral data is never computed here; it is supplied per manifold, either
//! directly or through the shipped Wolf-space table.

mod ied;
mod wolf;

pub use ied::{ied_coefficients, ied_delta_check, DeltaCheck, IedCoefficients};
pub use wolf::{
    classify_wolf, fino_salamon_check, Betti, WolfClassification, WolfSpaceRecord, WolfTable,
};

use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::qfield::{QfieldError, RationalFn};
use crate::repcalc::Rank;
use crate::spectra::{special_eigenvalues, SpectraError};
use crate::wbk::WbkError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StabilityError {
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("incomplete spectral input: {0}")]
    Incomplete(String),
    #[error("singular construction: {0}")]
    Singular(String),
    #[error("{0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
    #[error(transparent)]
    Qfield(#[from] QfieldError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Wbk(#[from] WbkError),
}

impl From<serde_json::Error> for StabilityError {
    fn from(e: serde_json::Error) -> Self {
        StabilityError::Json(e.to_string())
    }
}

/// What is known about the first nonzero Laplace eigenvalue on functions,
/// as a multiple of `scal` (an expression in `n` is allowed).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaMin {
    Exact(RationalFn),
    /// Every nonzero eigenvalue is strictly larger.
    Above(RationalFn),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenDim {
    pub lambda: RationalFn,
    pub dim: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralInput {
    pub n: i64,
    pub lambda_min_functions: LambdaMin,
    /// `dim C^∞(M)_λ` for eigenvalues `λ` in `(λ₁, λ₂]`.
    #[serde(default)]
    pub eigenvalue_dims: Vec<EigenDim>,
    /// Every eigenvalue up to this value is listed in `eigenvalue_dims`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_listed_through: Option<RationalFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_sym2hsym2e_at_lambda1: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_he_at_lambda1: Option<u64>,
    /// `i^{1,n+1}`, used when `dim_sym2hsym2e_at_lambda1` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_i1: Option<i64>,
    pub iso_dim: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "strictly stable")]
    StrictlyStable,
    #[serde(rename = "semistable-with-IED")]
    SemistableWithIed,
    #[serde(rename = "unstable")]
    Unstable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::StrictlyStable => "strictly stable",
            Verdict::SemistableWithIed => "semistable-with-IED",
            Verdict::Unstable => "unstable",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub ied_dim: u64,
    pub destabilising_dim: u64,
    pub verdict: Verdict,
    pub nu_stability: String,
}

impl StabilityReport {
    fn from_dims(ied_dim: u64, destabilising_dim: u64) -> Self {
        let verdict = match (ied_dim, destabilising_dim) {
            (_, d) if d > 0 => Verdict::Unstable,
            (0, 0) => Verdict::StrictlyStable,
            _ => Verdict::SemistableWithIed,
        };
        StabilityReport {
            ied_dim,
            destabilising_dim,
            verdict,
            nu_stability: "linear stability of the Einstein metric only; nu-entropy not evaluated"
                .into(),
        }
    }
}

pub(crate) fn eval_q(f: &RationalFn, n: i64) -> Result<BigRational, StabilityError> {
    Ok(f.evaluate(n)?)
}

pub(crate) fn eval_count(f: &RationalFn, n: i64, what: &str) -> Result<i64, StabilityError> {
    let v = eval_q(f, n)?;
    if !v.is_integer() {
        return Err(StabilityError::Domain(format!(
            "{what} = {v} at n = {n} is not an integer"
        )));
    }
    v.to_integer()
        .to_i64()
        .ok_or_else(|| StabilityError::Domain(format!("{what} out of range")))
}

/// The input evaluated at its rank, with the bookkeeping `theorem_a` and
/// `index_i1` share.
struct Resolved {
    lambda1: BigRational,
    lambda2: BigRational,
    lambda_min: BigRational,
    min_exact: bool,
    dims: Vec<(BigRational, u64)>,
}

fn resolve(input: &SpectralInput) -> Result<Resolved, StabilityError> {
    let n = input.n;
    if n < 2 {
        return Err(StabilityError::Domain(format!("n = {n}, need n >= 2")));
    }
    let s = special_eigenvalues(Rank::At(n));
    let lambda1 = eval_q(&s.lambda1, n)?;
    let lambda2 = eval_q(&s.lambda2, n)?;
    let (lambda_min, min_exact) = match &input.lambda_min_functions {
        LambdaMin::Exact(v) => (eval_q(v, n)?, true),
        LambdaMin::Above(v) => (eval_q(v, n)?, false),
    };
    if min_exact && lambda_min < lambda1 {
        return Err(StabilityError::Domain(format!(
            "lambda_min = {lambda_min} scal is below lambda1 = {lambda1} scal"
        )));
    }
    let mut dims = Vec::new();
    for d in &input.eigenvalue_dims {
        let l = eval_q(&d.lambda, n)?;
        let below = if min_exact {
            l < lambda_min
        } else {
            l <= lambda_min
        };
        if below {
            return Err(StabilityError::Domain(format!(
                "eigenvalue {l} scal lies below the first eigenvalue"
            )));
        }
        if dims.iter().any(|(m, _)| m == &l) {
            return Err(StabilityError::Domain(format!(
                "eigenvalue {l} scal listed twice"
            )));
        }
        dims.push((l, d.dim));
    }
    Ok(Resolved {
        lambda1,
        lambda2,
        lambda_min,
        min_exact,
        dims,
    })
}

impl Resolved {
    fn dim_at(&self, l: &BigRational) -> Option<u64> {
        self.dims.iter().find(|(m, _)| m == l).map(|(_, d)| *d)
    }

    /// `dim (HE)_{λ₁}`; zero is implied once `λ_min > λ₁`.
    fn dim_he(&self, input: &SpectralInput) -> Option<u64> {
        input.dim_he_at_lambda1.or_else(|| {
            let above = if self.min_exact {
                self.lambda_min > self.lambda1
            } else {
                self.lambda_min >= self.lambda1
            };
            above.then_some(0)
        })
    }

    fn dim_sym2(&self, input: &SpectralInput) -> Result<u64, StabilityError> {
        if let Some(d) = input.dim_sym2hsym2e_at_lambda1 {
            return Ok(d);
        }
        match (input.index_i1, self.dim_he(input)) {
            (Some(i1), Some(he)) => u64::try_from(he as i64 - i1).map_err(|_| {
                StabilityError::Domain(format!("i1 = {i1} exceeds dim (HE)_lambda1 = {he}"))
            }),
            _ => Err(StabilityError::Incomplete(
                "dim (Sym2HSym2E)_lambda1 needs either the dimension or i^{1,n+1} with dim (HE)_lambda1".into(),
            )),
        }
    }
}

/// Infinitesimal Einstein deformations and destabilising directions:
/// `ied = dim C^∞(M)_{λ₂}` and
/// `destab = dim (Sym²HSym²E)_{λ₁} + Σ_{λ₁<λ<λ₂} dim C^∞(M)_λ`.
pub fn theorem_a(input: &SpectralInput) -> Result<StabilityReport, StabilityError> {
    let r = resolve(input)?;
    // Every eigenvalue in (λ₁, covered] is known.
    let mut covered = r.lambda_min.clone();
    if r.min_exact
        && r.lambda_min > r.lambda1
        && r.lambda_min <= r.lambda2
        && r.dim_at(&r.lambda_min).is_none()
    {
        return Err(StabilityError::Incomplete(format!(
            "dimension of C^inf(M) at lambda_min = {} scal is missing",
            r.lambda_min
        )));
    }
    if let Some(t) = &input.spectrum_listed_through {
        covered = covered.max(eval_q(t, input.n)?);
    }
    if covered < r.lambda2 {
        return Err(StabilityError::Incomplete(format!(
            "no eigenvalue data on ({}, {}] scal",
            covered.max(r.lambda1.clone()),
            r.lambda2
        )));
    }
    let ied = r.dim_at(&r.lambda2).unwrap_or(0);
    let open: u64 = r
        .dims
        .iter()
        .filter(|(l, _)| *l > r.lambda1 && *l < r.lambda2)
        .map(|(_, d)| d)
        .sum();
    Ok(StabilityReport::from_dims(ied, r.dim_sym2(input)? + open))
}

/// `i^{1,n+1} = −dim (Sym²HSym²E)_{λ₁} + dim (HE)_{λ₁}`.
pub fn index_i1(input: &SpectralInput) -> Result<i64, StabilityError> {
    let r = resolve(input)?;
    let he = r
        .dim_he(input)
        .ok_or_else(|| StabilityError::Incomplete("dim (HE)_lambda1 is missing".into()))?;
    let sym2 = input
        .dim_sym2hsym2e_at_lambda1
        .ok_or_else(|| StabilityError::Incomplete("dim (Sym2HSym2E)_lambda1 is missing".into()))?;
    Ok(he as i64 - sym2 as i64)
}

/// `i^{2,n} = dim (Sym²HΛ^{2,2}_0E)_{λ₃} − dim (HΛ^{2,1}_0E)_{λ₃}`.
pub fn index_i2(dim_sym2hl22_at_lambda3: u64, dim_hl21_at_lambda3: u64) -> i64 {
    dim_sym2hl22_at_lambda3 as i64 - dim_hl21_at_lambda3 as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RationalFn {
        s.parse().unwrap()
    }

    fn input(n: i64, min: LambdaMin, dims: &[(&str, u64)]) -> SpectralInput {
        SpectralInput {
            n,
            lambda_min_functions: min,
            eigenvalue_dims: dims
                .iter()
                .map(|(l, d)| EigenDim {
                    lambda: r(l),
                    dim: *d,
                })
                .collect(),
            spectrum_listed_through: None,
            dim_sym2hsym2e_at_lambda1: Some(0),
            dim_he_at_lambda1: None,
            index_i1: None,
            iso_dim: 35,
        }
    }

    #[test]
    fn grassmannian_style_input() {
        let i = input(4, LambdaMin::Exact(r("1/(2n)")), &[("1/8", 35)]);
        let rep = theorem_a(&i).unwrap();
        assert_eq!(rep.verdict, Verdict::SemistableWithIed);
        assert_eq!((rep.ied_dim, rep.destabilising_dim), (35, 0));
    }

    #[test]
    fn generic_wolf_input() {
        let rep = theorem_a(&input(3, LambdaMin::Above(r("1/(2n)")), &[])).unwrap();
        assert_eq!(rep.verdict, Verdict::StrictlyStable);
        assert_eq!((rep.ied_dim, rep.destabilising_dim), (0, 0));
    }

    #[test]
    fn eigenvalue_inside_the_window_destabilises() {
        // n = 2: λ₁ = 3/16, λ₂ = 1/4
        let mut i = input(2, LambdaMin::Exact(r("7/32")), &[("7/32", 1)]);
        i.spectrum_listed_through = Some(r("1/4"));
        let rep = theorem_a(&i).unwrap();
        assert_eq!(rep.verdict, Verdict::Unstable);
        assert_eq!(rep.destabilising_dim, 1);
    }

    #[test]
    fn gaps_are_reported() {
        let i = input(2, LambdaMin::Above(r("3/16")), &[]);
        assert!(matches!(theorem_a(&i), Err(StabilityError::Incomplete(_))));
        let i = input(2, LambdaMin::Exact(r("7/32")), &[]);
        assert!(matches!(theorem_a(&i), Err(StabilityError::Incomplete(_))));
        let i = input(2, LambdaMin::Exact(r("1/8")), &[]);
        assert!(matches!(theorem_a(&i), Err(StabilityError::Domain(_))));
    }

    #[test]
    fn sym2_dimension_from_the_index() {
        let mut i = input(4, LambdaMin::Exact(r("(n+1)/(2n(n+2))")), &[]);
        i.spectrum_listed_through = Some(r("1/(2n)"));
        i.dim_sym2hsym2e_at_lambda1 = None;
        i.dim_he_at_lambda1 = Some(44);
        i.index_i1 = Some(44);
        assert_eq!(theorem_a(&i).unwrap().verdict, Verdict::StrictlyStable);
        i.index_i1 = Some(40);
        assert_eq!(theorem_a(&i).unwrap().destabilising_dim, 4);
    }

    #[test]
    fn indices() {
        let mut i = input(3, LambdaMin::Above(r("1/(2n)")), &[]);
        assert_eq!(index_i1(&i).unwrap(), 0);
        i.dim_he_at_lambda1 = Some(5);
        i.dim_sym2hsym2e_at_lambda1 = Some(5);
        assert_eq!(index_i1(&i).unwrap(), 0);
        assert_eq!(index_i2(0, 7), -7);
        assert_eq!(index_i2(0, 0), 0);
        assert_eq!(index_i2(3, 1), 2);
    }
}
