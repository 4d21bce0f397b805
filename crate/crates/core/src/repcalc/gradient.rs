//! Generalized gradients: the summands of `V ⊗ (H ⊗ E)`.

use std::fmt;

use serde::Serialize;

use super::bundle::{Bundle, Family};
use super::RepError;
use crate::qfield::{Poly, RationalFn};

/// Whether quantities are computed for symbolic `n` or a fixed rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Rank {
    /// Symbolic `n`, assumed at least the bundle's stable rank.
    #[default]
    Generic,
    At(i64),
}

impl Rank {
    /// `n` as an element of ℚ(n).
    pub fn n(self) -> RationalFn {
        match self {
            Rank::Generic => RationalFn::n(),
            Rank::At(n) => RationalFn::from_int(n),
        }
    }
}

/// Index `(N, ν)` of a gradient, `N = ±1`, `ν ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeIndex {
    pub big_n: i8,
    pub nu: i32,
}

impl EdgeIndex {
    pub fn new(big_n: i8, nu: i32) -> Self {
        debug_assert!(big_n == 1 || big_n == -1);
        debug_assert!(nu != 0);
        EdgeIndex { big_n, nu }
    }

    pub fn reversed(self) -> Self {
        EdgeIndex::new(-self.big_n, -self.nu)
    }

    /// Sort key: `N` ascending, then positive `ν` ascending, then negative
    /// `ν` by increasing `|ν|`.
    pub fn order_key(self) -> (i8, u8, u32) {
        (self.big_n, u8::from(self.nu < 0), self.nu.unsigned_abs())
    }
}

impl fmt::Display for EdgeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+},{:+}", self.big_n, self.nu)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradientEdge {
    pub index: EdgeIndex,
    pub source: Bundle,
    pub target: Bundle,
    pub rank: Rank,
    /// `w_ν` or `w_{−ν}`.
    pub conformal_weight: RationalFn,
    /// `w_{N,ν} = W_N/(2n) + w_ν/2`.
    pub universal_coeff: RationalFn,
    pub commuting: bool,
}

/// `W_N`: `−k` for `N = +1`, `k + 2` for `N = −1`.
pub fn sp1_weight(k: u32, big_n: i8) -> RationalFn {
    if big_n > 0 {
        RationalFn::from_int(-(k as i64))
    } else {
        RationalFn::from_int(k as i64 + 2)
    }
}

/// `w_ν = −ρ_ν + ν − 1` and `w_{−ν} = −w_ν + 2n`.
pub fn conformal_weight(source: &Bundle, nu: i32, rank: Rank) -> RationalFn {
    let i = nu.unsigned_abs() as usize;
    let w = RationalFn::from_int(-(source.weight.get(i) as i64) + i as i64 - 1);
    if nu > 0 {
        w
    } else {
        &(&RationalFn::from_int(2) * &rank.n()) - &w
    }
}

/// `W_N/(2n) + w_ν/2`.
pub fn universal_coeff(source: &Bundle, index: EdgeIndex, rank: Rank) -> RationalFn {
    let two = RationalFn::from_int(2);
    let big_w = sp1_weight(source.k, index.big_n);
    let w = conformal_weight(source, index.nu, rank);
    &(&big_w / &(&two * &rank.n())) + &(&w / &two)
}

/// Commutator rule: `Λ^{a,b}` to `Λ^{a±1,b}` or `Λ^{a,b±1}`.
fn is_commuting(source: &Bundle, target: &Bundle) -> bool {
    match (source.family(), target.family()) {
        (Some(Family::Lambda { a, b }), Some(Family::Lambda { a: a2, b: b2 })) => {
            let da = a2 as i64 - a as i64;
            let db = b2 as i64 - b as i64;
            (da.abs() == 1 && db == 0) || (da == 0 && db.abs() == 1)
        }
        _ => false,
    }
}

fn target_of(source: &Bundle, index: EdgeIndex) -> Option<Bundle> {
    let k = source.k as i64 + index.big_n as i64;
    if k < 0 {
        return None;
    }
    let w = source
        .weight
        .shifted(index.nu.unsigned_abs() as usize, index.nu > 0)?;
    Some(Bundle::new(k as u32, w))
}

/// The summands of `b ⊗ H ⊗ E` in canonical order.
pub fn edges(b: &Bundle, rank: Rank) -> Result<Vec<GradientEdge>, RepError> {
    let max_nu = match rank {
        Rank::Generic => b.stable_rank(),
        Rank::At(n) => {
            b.check_rank(n)?;
            n
        }
    } as i32;
    let mut out = Vec::new();
    for big_n in [1i8, -1] {
        for nu in (1..=max_nu).chain((1..=max_nu).map(|v| -v)) {
            let index = EdgeIndex::new(big_n, nu);
            let Some(target) = target_of(b, index) else {
                continue;
            };
            if let Rank::At(n) = rank {
                if target.weight.len() as i64 > n {
                    continue;
                }
            }
            out.push(GradientEdge {
                index,
                commuting: is_commuting(b, &target),
                source: b.clone(),
                target,
                rank,
                conformal_weight: conformal_weight(b, nu, rank),
                universal_coeff: universal_coeff(b, index, rank),
            });
        }
    }
    out.sort_by_key(|e| e.index.order_key());
    Ok(out)
}

/// The edge with the given index, if it exists on `b`.
pub fn edge(b: &Bundle, index: EdgeIndex, rank: Rank) -> Result<Option<GradientEdge>, RepError> {
    Ok(edges(b, rank)?.into_iter().find(|e| e.index == index))
}

impl GradientEdge {
    /// The edge `(−N, −ν)` from the target back to the source.
    pub fn reversed(&self) -> Result<GradientEdge, RepError> {
        edge(&self.target, self.index.reversed(), self.rank)?
            .ok_or_else(|| RepError::Syntax(format!("edge {} has no reverse", self.index)))
    }

    /// `dim(target)/dim(source)`.
    pub fn relative_dim_constant(&self) -> Result<RationalFn, RepError> {
        relative_dim_constant(&self.source, &self.target, self.rank)
    }
}

/// `dim(target)/dim(source)` as an element of ℚ(n) (generic) or ℚ (fixed rank).
pub fn relative_dim_constant(
    source: &Bundle,
    target: &Bundle,
    rank: Rank,
) -> Result<RationalFn, RepError> {
    match rank {
        Rank::Generic => {
            let s = source.dim_poly();
            let t = target.dim_poly();
            Ok(RationalFn::normalize(t, s).expect("dimension polynomial is nonzero"))
        }
        Rank::At(n) => {
            let s = source.dim(n)?;
            let t = target.dim(n)?;
            Ok(RationalFn::from_poly(Poly::constant((t, s).into())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RationalFn {
        s.parse().unwrap()
    }

    fn idx(e: &GradientEdge) -> (i8, i32) {
        (e.index.big_n, e.index.nu)
    }

    #[test]
    fn he_has_six_gradients() {
        let es = edges(&Bundle::he(), Rank::Generic).unwrap();
        let got: Vec<_> = es.iter().map(|e| (idx(e), e.target.to_string())).collect();
        assert_eq!(
            got,
            vec![
                ((-1, 1), "Sym2E".to_string()),
                ((-1, 2), "L20E".to_string()),
                ((-1, -1), "trivial".to_string()),
                ((1, 1), "Sym2HSym2E".to_string()),
                ((1, 2), "Sym2HL2E".to_string()),
                ((1, -1), "Sym2H".to_string()),
            ]
        );
    }

    #[test]
    fn sym2h_and_sym2e() {
        let es = edges(&Bundle::sym2h(), Rank::Generic).unwrap();
        assert_eq!(
            es.iter().map(idx).collect::<Vec<_>>(),
            vec![(-1, 1), (1, 1)]
        );
        let es = edges(&Bundle::sym2e(), Rank::Generic).unwrap();
        let got: Vec<_> = es
            .iter()
            .map(|e| (idx(e), e.target.to_string(), e.commuting))
            .collect();
        assert_eq!(
            got,
            vec![
                ((1, 1), "HSym3E".to_string(), false),
                ((1, 2), "HL21E".to_string(), true),
                ((1, -1), "HE".to_string(), true),
            ]
        );
    }

    #[test]
    fn universal_coefficients() {
        let es = edges(&Bundle::sym2e(), Rank::Generic).unwrap();
        assert_eq!(es[0].universal_coeff, r("-1"));
        assert_eq!(es[1].universal_coeff, r("1/2"));
        assert_eq!(es[2].universal_coeff, r("n+1"));
        let he = edges(&Bundle::he(), Rank::Generic).unwrap();
        assert_eq!(he[2].universal_coeff, r("3/(2n) + (2n+1)/2"));
        assert_eq!(he[5].universal_coeff, r("-1/(2n) + (2n+1)/2"));
    }

    #[test]
    fn small_rank_drops_edges() {
        let es = edges(&Bundle::l20e(), Rank::At(2)).unwrap();
        assert!(es.iter().all(|e| e.index.nu != 3));
        let es = edges(&Bundle::l20e(), Rank::At(3)).unwrap();
        assert!(es.iter().any(|e| e.index.nu == 3));
    }

    #[test]
    fn relative_dimensions() {
        let he = Bundle::he();
        let rd = |t: Bundle| relative_dim_constant(&he, &t, Rank::Generic).unwrap();
        assert_eq!(rd(Bundle::sym2e()), r("(2n+1)/4"));
        assert_eq!(rd(Bundle::sym2h()), r("3/(4n)"));
        assert_eq!(rd(Bundle::sym2h_sym2e()), r("3(2n+1)/4"));
    }
}
