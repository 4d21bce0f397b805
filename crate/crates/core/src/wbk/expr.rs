//! Linear combinations of operator symbols on a fixed bundle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::symbol::OpSymbol;
use crate::qfield::{QfieldError, RationalFn};
use crate::repcalc::Bundle;

/// `Σ c_s · s` with coefficients in ℚ(n). Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpExpr {
    pub bundle: Bundle,
    terms: BTreeMap<OpSymbol, RationalFn>,
}

impl OpExpr {
    pub fn zero(bundle: Bundle) -> Self {
        OpExpr {
            bundle,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        bundle: Bundle,
        terms: impl IntoIterator<Item = (OpSymbol, RationalFn)>,
    ) -> Self {
        let mut e = OpExpr::zero(bundle);
        for (s, c) in terms {
            e.add_term(s, &c);
        }
        e
    }

    pub fn terms(&self) -> &BTreeMap<OpSymbol, RationalFn> {
        &self.terms
    }

    pub fn symbols(&self) -> impl Iterator<Item = &OpSymbol> {
        self.terms.keys()
    }

    pub fn coeff(&self, s: &OpSymbol) -> RationalFn {
        self.terms.get(s).cloned().unwrap_or_else(RationalFn::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, s: OpSymbol, c: &RationalFn) {
        if c.is_zero() {
            return;
        }
        let v = &self.coeff(&s) + c;
        if v.is_zero() {
            self.terms.remove(&s);
        } else {
            self.terms.insert(s, v);
        }
    }

    /// `self + c · other`.
    pub fn add_scaled(&mut self, other: &OpExpr, c: &RationalFn) {
        if c.is_zero() {
            return;
        }
        for (s, v) in &other.terms {
            self.add_term(s.clone(), &(c * v));
        }
    }

    pub fn scaled(&self, c: &RationalFn) -> OpExpr {
        let mut out = OpExpr::zero(self.bundle.clone());
        out.add_scaled(self, c);
        out
    }

    /// Drops every symbol in `set`.
    pub fn without(&self, set: &BTreeSet<OpSymbol>) -> OpExpr {
        OpExpr {
            bundle: self.bundle.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(s, _)| !set.contains(s))
                .map(|(s, c)| (s.clone(), c.clone()))
                .collect(),
        }
    }

    /// Replaces `n` by an integer in every coefficient.
    pub fn specialize(&self, n: i64) -> Result<OpExpr, QfieldError> {
        let mut out = OpExpr::zero(self.bundle.clone());
        for (s, c) in &self.terms {
            out.add_term(s.clone(), &c.specialize(n)?);
        }
        Ok(out)
    }

    /// Rescaled so the first symbol in canonical order has coefficient 1.
    /// Since `B` symbols sort first, this is the first surviving `B` when
    /// there is one.
    pub fn canonical(&self) -> OpExpr {
        match self.terms.values().next() {
            None => self.clone(),
            Some(lead) => self.scaled(&lead.inv().expect("stored coefficients are nonzero")),
        }
    }

    /// `Some(c)` when `self = c · other`.
    pub fn ratio_to(&self, other: &OpExpr) -> Option<RationalFn> {
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let (s, c) = other.terms.iter().next()?;
        let k = &self.coeff(s) / c;
        (self.clone() == other.scaled(&k)).then_some(k)
    }

    /// `SYM: coeff` pairs separated by commas, in canonical order.
    pub fn listing(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(s, c)| format!("{s}: {c}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for OpExpr {
    /// Written as a sum, e.g. `B[-1,+2] - (n-1)*B[-1,-1]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            let text = c.times_symbol(&s.to_string(), crate::qfield::Style::Grammar);
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, text),
            };
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => f.write_str(&body)?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RationalFn {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_drops_zeros() {
        let he = Bundle::he();
        let mut e = OpExpr::from_terms(
            he.clone(),
            [(OpSymbol::b(1, 1), r("n")), (OpSymbol::Scal, r("1"))],
        );
        let f = OpExpr::from_terms(he, [(OpSymbol::b(1, 1), r("1"))]);
        e.add_scaled(&f, &r("-n"));
        assert_eq!(e.terms().len(), 1);
        assert_eq!(e.coeff(&OpSymbol::Scal), r("1"));
    }

    #[test]
    fn canonical_and_listing() {
        let e = OpExpr::from_terms(
            Bundle::he(),
            [
                (OpSymbol::b(-1, 2), r("-6(n+1)")),
                (OpSymbol::b(-1, -1), r("6(n+1)(n-1)")),
                (OpSymbol::Scal, r("3(n^2-1)/(4n(n+2))")),
            ],
        );
        assert_eq!(
            e.canonical().listing(),
            "B[-1,+2]: 1, B[-1,-1]: -(n-1), SCAL: -(n-1)/(8*n*(n+2))"
        );
        assert_eq!(e.ratio_to(&e.canonical()), Some(r("-6(n+1)")));
    }

    #[test]
    fn display_as_sum() {
        let e = OpExpr::from_terms(
            Bundle::l20e(),
            [
                (OpSymbol::b(1, 1), r("-1")),
                (OpSymbol::b(1, 3), r("2")),
                (OpSymbol::Scal, r("-1/(n+2)")),
            ],
        );
        assert_eq!(e.to_string(), "-B[+1,+1] + 2*B[+1,+3] - SCAL/(n+2)");
    }
}
