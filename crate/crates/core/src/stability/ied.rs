//! `h₁ = c₁·pr_{Sym²HSym²E} δ* df` and `h₂ = c₂·pr_{Λ²₀E} δ* df` for an
//! eigenfunction `f` with eigenvalue `λ ∈ (λ₁, λ₂]`.

use std::collections::BTreeSet;

use serde::Serialize;

use super::StabilityError;
use crate::qfield::RationalFn;
use crate::repcalc::{Bundle, Rank};
use crate::spectra::{exceeds_for_n_ge, special_eigenvalues};
use crate::wbk::{scalar_solve_with, Database, LinearForm, OpExpr, OpSymbol, ScalarSolution};

/// Identities supplying `B_{1,1}` and `B_{−1,2}` on `df`.
const SCALAR_IDS: [&str; 2] = ["eq3", "eq4"];
/// `δ pr_{Sym²HSym²E} δ*` and `δ pr_{Λ²₀E} δ*` on `HE`.
const DIVERGENCE_IDS: [(&str, &str); 2] = [
    ("div-2", "DELDELSTAR[Sym2HSym2E]"),
    ("div-3", "DELDELSTAR[L20E]"),
];
/// Gradients vanishing on closed 1-forms.
const CLOSED: [&str; 3] = ["B[+1,+2]", "B[+1,-1]", "B[-1,+1]"];

/// `δh₁ + δh₂` expressed through `df`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaCheck {
    /// `δ pr_{Sym²HSym²E} δ* df` as a multiple of `df`, linear in `λ`, `scal`.
    pub first: LinearForm,
    /// `δ pr_{Λ²₀E} δ* df`.
    pub second: LinearForm,
    /// `δh₁ = h1·df` when the ratio does not depend on `λ`.
    pub h1: Option<RationalFn>,
    pub h2: Option<RationalFn>,
    /// Numerator of `δh/df` over `(λ − (n+1)scal/(2n(n+2)))(λ + scal/(2(n+2)))`:
    /// coefficients of `λ²`, `λ·scal`, `scal²`.
    pub residual: [RationalFn; 3],
}

impl DeltaCheck {
    pub fn passes(&self) -> bool {
        self.residual.iter().all(RationalFn::is_zero)
    }

    /// `δh₁ + δh₂` in words, e.g. `-df + df = 0`.
    pub fn summary(&self) -> String {
        let show = |c: &Option<RationalFn>| match c {
            Some(c) => c.times_symbol("df", crate::qfield::Style::Grammar),
            None => "(lambda-dependent)*df".into(),
        };
        let rhs = if self.passes() {
            "0".to_string()
        } else {
            "nonzero".to_string()
        };
        let h2 = show(&self.h2);
        let h2 = match h2.strip_prefix('-') {
            Some(rest) => format!("- {rest}"),
            None => format!("+ {h2}"),
        };
        format!("{} {} = {}", show(&self.h1), h2, rhs)
    }
}

/// `c₁`, `c₂` as multiples of `1/scal`, with the divergence check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IedCoefficients {
    pub lambda: RationalFn,
    pub c1: RationalFn,
    pub c2: RationalFn,
    pub delta: DeltaCheck,
}

fn denominators(n: &RationalFn) -> (LinearForm, LinearForm) {
    let two = RationalFn::from_int(2);
    let n2 = n + &two;
    let d1 = LinearForm::lambda().add(&LinearForm::scal(
        -&(&(n + &RationalFn::one()) / &(&(&two * n) * &n2)),
    ));
    let d2 = LinearForm::lambda().add(&LinearForm::scal(
        (&two * &n2).inv().expect("n + 2 is nonzero"),
    ));
    (d1, d2)
}

fn numerators(n: &RationalFn) -> (RationalFn, RationalFn) {
    let c1 = RationalFn::ratio(-2, 3);
    let c2 = &(&RationalFn::from_int(2) * n) / &(n - &RationalFn::one());
    (c1, c2)
}

fn composite_value(
    db: &Database,
    sol: &ScalarSolution,
    id: &str,
    composite: &str,
) -> Result<LinearForm, StabilityError> {
    let ident = db.require(id)?;
    let sym: OpSymbol = composite.parse()?;
    let c = ident.expr.coeff(&sym);
    if c.is_zero() {
        return Err(StabilityError::Domain(format!(
            "{id} does not involve {composite}"
        )));
    }
    let rest: OpExpr = ident
        .expr
        .without(&BTreeSet::from([sym]))
        .scaled(&(-&c.inv()?));
    sol.evaluate(&rest).ok_or_else(|| {
        StabilityError::Domain(format!("{id}: B values on df are not all determined"))
    })
}

fn ratio(p: &LinearForm, d: &LinearForm) -> Option<RationalFn> {
    let r = &p.lambda / &d.lambda;
    (p.scal == &r * &d.scal).then_some(r)
}

/// Computes `δh₁` and `δh₂` for symbolic `λ` and `n` from the database values
/// of `B_{1,1}`, `B_{−1,2}` on closed 1-forms and the divergence constants.
pub fn ied_delta_check(db: &Database) -> Result<DeltaCheck, StabilityError> {
    let he = Bundle::he();
    let assume = CLOSED
        .iter()
        .map(|s| s.parse())
        .collect::<Result<BTreeSet<OpSymbol>, _>>()?;
    let active: Vec<String> = SCALAR_IDS.iter().map(|s| s.to_string()).collect();
    let sol = scalar_solve_with(db, &he, &active, &assume, None)?;
    let first = composite_value(db, &sol, DIVERGENCE_IDS[0].0, DIVERGENCE_IDS[0].1)?;
    let second = composite_value(db, &sol, DIVERGENCE_IDS[1].0, DIVERGENCE_IDS[1].1)?;

    let n = RationalFn::n();
    let (d1, d2) = denominators(&n);
    let (c1, c2) = numerators(&n);
    let p1 = first.scaled(&c1);
    let p2 = second.scaled(&c2);
    // p1·d2 + p2·d1 as a quadratic form in (λ, scal)
    let quad = |p: &LinearForm, d: &LinearForm| {
        [
            &p.lambda * &d.lambda,
            &(&p.lambda * &d.scal) + &(&p.scal * &d.lambda),
            &p.scal * &d.scal,
        ]
    };
    let a = quad(&p1, &d2);
    let b = quad(&p2, &d1);
    let residual = [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]];
    Ok(DeltaCheck {
        h1: ratio(&p1, &d1),
        h2: ratio(&p2, &d2),
        first,
        second,
        residual,
    })
}

/// `c₁ = −(2/3)(λ − (n+1)scal/(2n(n+2)))⁻¹` and
/// `c₂ = (2n/(n−1))(λ + scal/(2(n+2)))⁻¹` for `λ` a multiple of `scal`.
pub fn ied_coefficients(
    db: &Database,
    lambda: &RationalFn,
    rank: Rank,
) -> Result<IedCoefficients, StabilityError> {
    let (lambda, n0) = match rank {
        Rank::At(n) if n < 2 => {
            return Err(StabilityError::Domain(format!("n = {n}, need n >= 2")))
        }
        Rank::At(n) => (lambda.specialize(n)?, n),
        Rank::Generic => (lambda.clone(), 2),
    };
    let n = rank.n();
    let (d1, d2) = denominators(&n);
    let at = |d: &LinearForm| &(&d.lambda * &lambda) + &d.scal;
    let (v1, v2) = (at(&d1), at(&d2));
    for (v, which) in [(&v1, "first"), (&v2, "second")] {
        let vanishes = match rank {
            Rank::At(_) => v.is_zero(),
            Rank::Generic => v.is_zero() || v.integer_zeros().iter().any(|&z| z >= n0),
        };
        if vanishes {
            return Err(StabilityError::Singular(format!(
                "{which} coefficient has a pole at lambda = {lambda}"
            )));
        }
    }
    let s = special_eigenvalues(rank);
    let inside = exceeds_for_n_ge(&lambda, &s.lambda1, true, n0)?
        && exceeds_for_n_ge(&s.lambda2, &lambda, false, n0)?;
    if !inside {
        return Err(StabilityError::Domain(format!(
            "lambda = {lambda} scal is not in (lambda1, lambda2] for every n >= {n0}"
        )));
    }
    let (c1, c2) = numerators(&n);
    Ok(IedCoefficients {
        c1: &c1 / &v1,
        c2: &c2 / &v2,
        lambda,
        delta: ied_delta_check(db)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RationalFn {
        s.parse().unwrap()
    }

    #[test]
    fn delta_check_on_builtin_data() {
        let d = ied_delta_check(&Database::builtin()).unwrap();
        assert_eq!(d.h1, Some(RationalFn::from_int(-1)));
        assert_eq!(d.h2, Some(RationalFn::one()));
        assert!(d.passes());
        assert_eq!(d.summary(), "-df + df = 0");
    }

    #[test]
    fn coefficients_at_lambda2() {
        let db = Database::builtin();
        // n = 3: λ₂ − 4/30 = 1/30
        let c = ied_coefficients(&db, &r("1/(2n)"), Rank::At(3)).unwrap();
        assert_eq!(c.c1, RationalFn::from_int(-20));
        // λ₂ + 1/10 = 4/15, c₂ = 3·15/4
        assert_eq!(c.c2, r("45/4"));
        let g = ied_coefficients(&db, &r("1/(2n)"), Rank::Generic).unwrap();
        assert_eq!(g.c1, r("-4n(n+2)/3"));
    }

    #[test]
    fn singular_and_out_of_range() {
        let db = Database::builtin();
        let lambda1 = r("(n+1)/(2n(n+2))");
        assert!(matches!(
            ied_coefficients(&db, &lambda1, Rank::Generic),
            Err(StabilityError::Singular(_))
        ));
        assert!(matches!(
            ied_coefficients(&db, &r("3/16"), Rank::At(2)),
            Err(StabilityError::Singular(_))
        ));
        assert!(matches!(
            ied_coefficients(&db, &r("1/n"), Rank::Generic),
            Err(StabilityError::Domain(_))
        ));
    }

    #[test]
    fn mutated_eq4_fails() {
        let base = Database::builtin();
        let c = base.require("eq4").unwrap().expr.coeff(&OpSymbol::Lap);
        let db = base
            .with_coefficient("eq4", OpSymbol::Lap, &c + &RationalFn::one())
            .unwrap();
        let d = ied_delta_check(&db).unwrap();
        assert!(!d.passes());
        assert!(d.residual.iter().any(|c| !c.is_zero()));
    }
}
