//! Minimal-eigenvalue bounds for `Sym^k H ⊗ Λ^{a,b}_0 E`, the distinguished
//! eigenvalues `λ₁, λ₂, λ₃`, and which commuting gradients vanish below a
//! given eigenvalue.
//!
//! Every eigenvalue is an element of ℚ(n) standing for that multiple of
//! `scal`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::qfield::{QfieldError, RationalFn};
use crate::repcalc::{edges, Bundle, EdgeIndex, Family, Rank, RepError};

/// Last rank of the evaluation sweep that confirms symbolic comparisons.
pub const SWEEP_MAX: i64 = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectraError {
    #[error("parameters out of range: {0}")]
    Domain(String),
    #[error("{bundle} is not of the form Sym^k H ⊗ Λ^{{a,b}}_0 E")]
    NotLambda { bundle: String },
    #[error("cannot decide {what} for all n >= {n0}")]
    Undecided { what: String, n0: i64 },
    #[error(transparent)]
    Qfield(#[from] QfieldError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// Smallest `n` with `a ≤ n` and `k ≤ 2n − a − b`.
pub fn bound_n_min(k: u32, a: u32, b: u32) -> i64 {
    let need = (k + a + b).div_ceil(2) as i64;
    need.max(a as i64).max(1)
}

/// The lower bound for the spectrum of `Δ` on `Sym^k H ⊗ Λ^{a,b}_0 E`:
/// `(a−b+k)(2n−a−b+k+2)·scal/(8n(n+2))` for `k ≠ 0` and
/// `(a−b)(2n−a−b+4)·scal/(8n(n+2))` for `k = 0`.
///
/// The range `0 ≤ b ≤ a ≤ n`, `k ≤ 2n − a − b` is enforced; at generic rank
/// the formula is returned for `n ≥ bound_n_min(k, a, b)`.
pub fn minimal_eigenvalue(k: u32, a: u32, b: u32, rank: Rank) -> Result<RationalFn, SpectraError> {
    if b > a {
        return Err(SpectraError::Domain(format!("b = {b} exceeds a = {a}")));
    }
    if let Rank::At(n) = rank {
        if n < 1 || a as i64 > n || k as i64 > 2 * n - a as i64 - b as i64 {
            return Err(SpectraError::Domain(format!(
                "(k, a, b) = ({k}, {a}, {b}) needs 0 <= b <= a <= n and k <= 2n - a - b, got n = {n}"
            )));
        }
    }
    let n = rank.n();
    let (k, a, b) = (k as i64, a as i64, b as i64);
    let (first, shift) = if k != 0 {
        (a - b + k, k + 2)
    } else {
        (a - b, 4)
    };
    let second = &(&RationalFn::from_int(2) * &n) + &RationalFn::from_int(shift - a - b);
    let den = &(&RationalFn::from_int(8) * &n) * &(&n + &RationalFn::from_int(2));
    Ok(&(&RationalFn::from_int(first) * &second) / &den)
}

/// `(k, a, b)` of a bundle in the `Λ^{a,b}_0 E` family.
pub fn lambda_params(bundle: &Bundle) -> Result<(u32, u32, u32), SpectraError> {
    match bundle.family() {
        Some(Family::Lambda { a, b }) => Ok((bundle.k, a, b)),
        _ => Err(SpectraError::NotLambda {
            bundle: bundle.to_string(),
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenBound {
    pub bundle: Bundle,
    pub k: u32,
    pub a: u32,
    pub b: u32,
    /// Multiple of `scal`.
    pub value: RationalFn,
    pub n_min: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharpness_note: Option<String>,
}

pub fn eigen_bound(bundle: &Bundle, rank: Rank) -> Result<EigenBound, SpectraError> {
    let (k, a, b) = lambda_params(bundle)?;
    Ok(EigenBound {
        bundle: bundle.clone(),
        k,
        a,
        b,
        value: minimal_eigenvalue(k, a, b, rank)?,
        n_min: bound_n_min(k, a, b).max(bundle.min_rank()),
        sharpness_note: None,
    })
}

/// The bundles whose bounds are quoted individually, as `(k, a, b)`.
pub const QUOTED_BOUNDS: [(&str, (u32, u32, u32)); 9] = [
    ("HE", (1, 1, 0)),
    ("Sym2H", (2, 0, 0)),
    ("Sym2HL2E", (2, 2, 0)),
    ("HL21E", (1, 2, 1)),
    ("HL3E", (1, 3, 0)),
    ("Sym3HE", (3, 1, 0)),
    ("Sym3HL21E", (3, 2, 1)),
    ("L20E", (0, 2, 0)),
    ("Sym2HSym2E", (2, 1, 1)),
];

/// `μ = scal/(4n)` together with `λ₁, λ₂, λ₃`, all as multiples of `scal`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialEigenvalues {
    pub mu: RationalFn,
    pub lambda1: RationalFn,
    pub lambda2: RationalFn,
    pub lambda3: RationalFn,
}

pub fn special_eigenvalues(rank: Rank) -> SpecialEigenvalues {
    let n = rank.n();
    let two = RationalFn::from_int(2);
    let n2 = &n + &two;
    let mu = (&RationalFn::from_int(4) * &n).inv().expect("n is nonzero");
    let lambda2 = &two * &mu;
    let lambda1 = &(&(&n + &RationalFn::one()) / &n2) * &lambda2;
    let lambda3 = &(&n / &n2) * &lambda2;
    SpecialEigenvalues {
        mu,
        lambda1,
        lambda2,
        lambda3,
    }
}

/// Sign of `x − y` for every integer `n ≥ n0`, decided symbolically and
/// confirmed by evaluation for `n0..=SWEEP_MAX`. `None` when the sign is
/// not constant on that range.
pub fn compare_for_n_ge(
    x: &RationalFn,
    y: &RationalFn,
    n0: i64,
) -> Result<Option<Ordering>, SpectraError> {
    let d = x - y;
    let sym = d.sign_for_n_ge(n0);
    if let Some(s) = sym {
        for n in n0..=SWEEP_MAX {
            let v = d.evaluate(n)?;
            if v.cmp(&BigRational::from_integer(0.into())) != s {
                return Err(SpectraError::Undecided {
                    what: format!("sign of {d} (sweep disagrees at n = {n})"),
                    n0,
                });
            }
        }
    }
    Ok(sym)
}

/// `x ≥ y` for every integer `n ≥ n0` (`x > y` when `strict`).
pub fn exceeds_for_n_ge(
    x: &RationalFn,
    y: &RationalFn,
    strict: bool,
    n0: i64,
) -> Result<bool, SpectraError> {
    if let Some(s) = compare_for_n_ge(x, y, n0)? {
        return Ok(s == Ordering::Greater || (!strict && s == Ordering::Equal));
    }
    if strict {
        return Ok(false);
    }
    // x − y may touch zero at finitely many n; check up to the last zero and
    // decide the tail symbolically.
    let d = x - y;
    if d.integer_poles().iter().any(|&p| p >= n0) {
        return Ok(false);
    }
    let last = d
        .integer_zeros()
        .into_iter()
        .filter(|&z| z >= n0)
        .max()
        .unwrap_or(n0);
    for n in n0..=last {
        if d.evaluate(n)? < BigRational::from_integer(0.into()) {
            return Ok(false);
        }
    }
    Ok(d.sign_for_n_ge(last + 1) == Some(Ordering::Greater))
}

/// Ranks a comparison is made over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    At(i64),
    /// Every `n ≥ n0`.
    From(i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingSet {
    pub bundle: Bundle,
    pub lambda: RationalFn,
    pub strict: bool,
    pub vanishing: BTreeSet<EdgeIndex>,
}

/// Commuting gradients on `b` whose target minimal eigenvalue exceeds
/// `lambda` (`>` when `strict`, `≥` otherwise); these vanish on
/// `Δ`-eigensections for eigenvalue `lambda`. Under `Scope::From` an edge is
/// compared only at ranks where it exists.
pub fn vanishing_set(
    b: &Bundle,
    lambda: &RationalFn,
    strict: bool,
    scope: Scope,
) -> Result<VanishingSet, SpectraError> {
    let rank = match scope {
        Scope::At(n) => Rank::At(n),
        Scope::From(_) => Rank::Generic,
    };
    let mut vanishing = BTreeSet::new();
    for e in edges(b, rank)?.into_iter().filter(|e| e.commuting) {
        let (k, a, bb) = lambda_params(&e.target)?;
        let include = match scope {
            Scope::At(n) => match minimal_eigenvalue(k, a, bb, Rank::At(n)) {
                Ok(bound) => {
                    let d = (&bound - &lambda.specialize(n)?).evaluate(n)?;
                    let zero = BigRational::from_integer(0.into());
                    d > zero || (!strict && d == zero)
                }
                Err(SpectraError::Domain(_)) => false,
                Err(e) => return Err(e),
            },
            Scope::From(n0) => {
                let n0 = n0.max(bound_n_min(k, a, bb)).max(e.target.min_rank());
                let bound = minimal_eigenvalue(k, a, bb, Rank::Generic)?;
                exceeds_for_n_ge(&bound, lambda, strict, n0)?
            }
        };
        if include {
            vanishing.insert(e.index);
        }
    }
    Ok(VanishingSet {
        bundle: b.clone(),
        lambda: lambda.clone(),
        strict,
        vanishing,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub k: u32,
    pub a: u32,
    pub b: u32,
    pub bundle: String,
    pub value: RationalFn,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_n: Option<String>,
}

/// One row per `(k, a, b)`, optionally evaluated at a concrete `n`.
pub fn bound_table(
    rows: &[(u32, u32, u32)],
    n: Option<i64>,
) -> Result<Vec<BoundRow>, SpectraError> {
    rows.iter()
        .map(|&(k, a, b)| {
            let bundle = Bundle::lambda(k, a, b)?;
            let value = minimal_eigenvalue(k, a, b, Rank::Generic)?;
            let at_n = match n {
                Some(n) => Some(minimal_eigenvalue(k, a, b, Rank::At(n))?.to_grammar()),
                None => None,
            };
            Ok(BoundRow {
                k,
                a,
                b,
                bundle: bundle
                    .alias()
                    .map_or_else(|| bundle.to_string(), str::to_string),
                value,
                at_n,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RationalFn {
        s.parse().unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let g = Rank::Generic;
        assert_eq!(
            minimal_eigenvalue(1, 1, 0, g).unwrap(),
            r("(n+1)/(2n(n+2))")
        );
        assert_eq!(minimal_eigenvalue(1, 2, 1, g).unwrap(), r("1/(2(n+2))"));
        assert_eq!(minimal_eigenvalue(3, 1, 0, g).unwrap(), r("1/n"));
        assert_eq!(
            minimal_eigenvalue(0, 2, 0, g).unwrap(),
            r("(n+1)/(2n(n+2))")
        );
        assert_eq!(minimal_eigenvalue(0, 0, 0, g).unwrap(), RationalFn::zero());
    }

    #[test]
    fn range_is_enforced() {
        assert!(matches!(
            minimal_eigenvalue(0, 1, 2, Rank::Generic),
            Err(SpectraError::Domain(_))
        ));
        assert!(matches!(
            minimal_eigenvalue(1, 3, 0, Rank::At(2)),
            Err(SpectraError::Domain(_))
        ));
        assert!(matches!(
            minimal_eigenvalue(3, 1, 0, Rank::At(1)),
            Err(SpectraError::Domain(_))
        ));
        assert!(minimal_eigenvalue(3, 1, 0, Rank::At(2)).is_ok());
        assert_eq!(bound_n_min(3, 1, 0), 2);
        assert_eq!(bound_n_min(1, 3, 0), 3);
    }

    #[test]
    fn special_values_at_two() {
        let s = special_eigenvalues(Rank::At(2));
        assert_eq!(s.lambda1, r("3/16"));
        assert_eq!(s.lambda2, r("1/4"));
        assert_eq!(s.lambda3, r("1/8"));
        assert_eq!(s.mu, r("1/8"));
    }

    #[test]
    fn non_strict_comparison_through_a_touching_point() {
        let l2 = special_eigenvalues(Rank::Generic).lambda2;
        let hl3 = minimal_eigenvalue(1, 3, 0, Rank::Generic).unwrap();
        assert_eq!(compare_for_n_ge(&hl3, &l2, 2).unwrap(), None);
        assert!(exceeds_for_n_ge(&hl3, &l2, false, 2).unwrap());
        assert!(!exceeds_for_n_ge(&hl3, &l2, true, 2).unwrap());
        assert!(exceeds_for_n_ge(&hl3, &l2, true, 3).unwrap());
    }

    #[test]
    fn he_below_lambda2() {
        let s = special_eigenvalues(Rank::Generic);
        let v = vanishing_set(&Bundle::he(), &s.lambda1, true, Scope::From(2)).unwrap();
        let want: BTreeSet<_> = [EdgeIndex::new(1, 2), EdgeIndex::new(1, -1)].into();
        assert_eq!(v.vanishing, want);
    }

    #[test]
    fn table_rows() {
        let t = bound_table(&[(0, 2, 0)], Some(2)).unwrap();
        assert_eq!(t[0].bundle, "L20E");
        assert_eq!(t[0].at_n.as_deref(), Some("3/16"));
    }
}
