//! Rough Laplacian, curvature term and standard Laplacian as sums over gradients.

use super::expr::OpExpr;
use super::symbol::OpSymbol;
use super::WbkError;
use crate::qfield::RationalFn;
use crate::repcalc::{edges, Bundle, Rank};

/// Ids accepted wherever a derivation lists its inputs.
pub const PSEUDO_IDS: [&str; 4] = ["@rough", "@qr", "@lap", "@universal"];

/// Right-hand sides of `∇*∇ = Σ B`, `q(R) = Σ w B`, `Δ = Σ (1+w) B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universal {
    pub rough: OpExpr,
    pub qr: OpExpr,
    pub lap: OpExpr,
}

pub fn universal_exprs(b: &Bundle, rank: Rank) -> Result<Universal, WbkError> {
    let mut rough = OpExpr::zero(b.clone());
    let mut qr = OpExpr::zero(b.clone());
    let mut lap = OpExpr::zero(b.clone());
    let one = RationalFn::one();
    for e in edges(b, rank)? {
        let s = OpSymbol::B(e.index);
        rough.add_term(s.clone(), &one);
        qr.add_term(s.clone(), &e.universal_coeff);
        lap.add_term(s, &(&one + &e.universal_coeff));
    }
    Ok(Universal { rough, qr, lap })
}

/// A universal relation written as an expression that vanishes.
pub fn pseudo_identity(b: &Bundle, id: &str, rank: Rank) -> Result<OpExpr, WbkError> {
    let u = universal_exprs(b, rank)?;
    let minus = RationalFn::from_int(-1);
    let lhs = |s: OpSymbol, rhs: &OpExpr| {
        let mut e = rhs.scaled(&minus);
        e.add_term(s, &RationalFn::one());
        e
    };
    Ok(match id {
        "@rough" => lhs(OpSymbol::Rough, &u.rough),
        "@qr" => lhs(OpSymbol::Qr, &u.qr),
        "@lap" => lhs(OpSymbol::Lap, &u.lap),
        "@universal" => OpExpr::from_terms(
            b.clone(),
            [
                (OpSymbol::Lap, RationalFn::one()),
                (OpSymbol::Rough, minus.clone()),
                (OpSymbol::Qr, minus),
            ],
        ),
        other => return Err(WbkError::UnknownIdentity(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RationalFn {
        s.parse().unwrap()
    }

    #[test]
    fn sym2e_expansions() {
        let u = universal_exprs(&Bundle::sym2e(), Rank::Generic).unwrap();
        assert_eq!(u.qr.to_string(), "-B[+1,+1] + B[+1,+2]/2 + (n+1)*B[+1,-1]");
        assert_eq!(u.lap.coeff(&OpSymbol::b(1, 1)), RationalFn::zero());
        assert_eq!(u.lap.coeff(&OpSymbol::b(1, 2)), r("3/2"));
        assert_eq!(u.lap.coeff(&OpSymbol::b(1, -1)), r("n+2"));
    }

    #[test]
    fn lap_is_rough_plus_qr() {
        for (_, b) in Bundle::aliases() {
            let u = universal_exprs(&b, Rank::Generic).unwrap();
            let mut sum = u.rough.clone();
            sum.add_scaled(&u.qr, &RationalFn::one());
            assert_eq!(sum, u.lap, "{b}");
        }
    }

    #[test]
    fn pseudo_rows() {
        let e = pseudo_identity(&Bundle::sym2h(), "@rough", Rank::Generic).unwrap();
        assert_eq!(e.to_string(), "-B[-1,+1] - B[+1,+1] + ROUGH");
        assert!(pseudo_identity(&Bundle::he(), "@nope", Rank::Generic).is_err());
    }
}
