//! Bundles `Sym^k H ⊗ V_ρ` and their text syntax.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::weight::SpnWeight;
use super::RepError;
use crate::qfield::Poly;

/// Shape of the Sp(n) weight, when it is one of the named families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `Λ^{a,b}_0 E`: `b` parts equal to 2 followed by `a − b` parts equal to 1.
    Lambda { a: u32, b: u32 },
    /// `Sym^m E` for `m ≥ 3`; `Sym² E` is reported as `Λ^{1,1}_0 E`.
    SymPower(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bundle {
    pub k: u32,
    pub weight: SpnWeight,
}

const ALIASES: &[(&str, u32, &[u32])] = &[
    ("trivial", 0, &[]),
    ("HE", 1, &[1]),
    ("Sym2H", 2, &[]),
    ("Sym2E", 0, &[2]),
    ("L20E", 0, &[1, 1]),
    ("Sym2HSym2E", 2, &[2]),
    ("HL21E", 1, &[2, 1]),
    ("HL3E", 1, &[1, 1, 1]),
    ("Sym3HE", 3, &[1]),
    ("Sym2HL2E", 2, &[1, 1]),
    ("Sym3HL21E", 3, &[2, 1]),
    ("Sym2HL22E", 2, &[2, 2]),
    ("HSym3E", 1, &[3]),
    ("Sym3HSym3E", 3, &[3]),
];

impl Bundle {
    pub fn new(k: u32, weight: SpnWeight) -> Self {
        Bundle { k, weight }
    }

    fn named(k: u32, parts: &[u32]) -> Self {
        Bundle::new(k, SpnWeight::new(parts.to_vec()).expect("dominant alias"))
    }

    pub fn trivial() -> Self {
        Bundle::named(0, &[])
    }
    pub fn he() -> Self {
        Bundle::named(1, &[1])
    }
    pub fn sym2h() -> Self {
        Bundle::named(2, &[])
    }
    pub fn sym2e() -> Self {
        Bundle::named(0, &[2])
    }
    pub fn l20e() -> Self {
        Bundle::named(0, &[1, 1])
    }
    pub fn sym2h_sym2e() -> Self {
        Bundle::named(2, &[2])
    }
    pub fn hl21e() -> Self {
        Bundle::named(1, &[2, 1])
    }
    pub fn hl3e() -> Self {
        Bundle::named(1, &[1, 1, 1])
    }
    pub fn sym3he() -> Self {
        Bundle::named(3, &[1])
    }
    pub fn hsym3e() -> Self {
        Bundle::named(1, &[3])
    }
    pub fn sym3h_sym3e() -> Self {
        Bundle::named(3, &[3])
    }
    pub fn sym2h_l2e() -> Self {
        Bundle::named(2, &[1, 1])
    }
    pub fn sym3h_l21e() -> Self {
        Bundle::named(3, &[2, 1])
    }
    pub fn sym2h_l22e() -> Self {
        Bundle::named(2, &[2, 2])
    }

    /// `Sym^k H ⊗ Λ^{a,b}_0 E`.
    pub fn lambda(k: u32, a: u32, b: u32) -> Result<Self, RepError> {
        if b > a {
            return Err(RepError::Syntax(format!("L({a},{b}) needs b <= a")));
        }
        let mut parts = vec![2; b as usize];
        parts.extend(std::iter::repeat_n(1, (a - b) as usize));
        Ok(Bundle::new(k, SpnWeight::new(parts)?))
    }

    /// All named aliases, in a fixed order.
    pub fn aliases() -> impl Iterator<Item = (&'static str, Bundle)> {
        ALIASES
            .iter()
            .map(|(name, k, p)| (*name, Bundle::named(*k, p)))
    }

    pub fn alias(&self) -> Option<&'static str> {
        ALIASES
            .iter()
            .find(|(_, k, p)| *k == self.k && self.weight.parts() == *p)
            .map(|(name, _, _)| *name)
    }

    pub fn family(&self) -> Option<Family> {
        let p = self.weight.parts();
        if p.iter().all(|&x| x == 1 || x == 2) {
            let b = p.iter().filter(|&&x| x == 2).count() as u32;
            let a = p.len() as u32;
            return Some(Family::Lambda { a, b });
        }
        match p {
            [m] if *m >= 3 => Some(Family::SymPower(*m)),
            _ => None,
        }
    }

    /// Smallest rank at which the bundle exists.
    pub fn min_rank(&self) -> i64 {
        self.weight.len().max(1) as i64
    }

    /// Smallest rank from which the edge set no longer changes with `n`.
    pub fn stable_rank(&self) -> i64 {
        self.weight.len() as i64 + 1
    }

    pub fn check_rank(&self, n: i64) -> Result<(), RepError> {
        if n < self.min_rank() {
            return Err(RepError::RankTooSmall {
                what: self.to_string(),
                n,
            });
        }
        Ok(())
    }

    /// Complex dimension `(k+1)·dim V_ρ`.
    pub fn dim(&self, n: i64) -> Result<BigInt, RepError> {
        Ok(BigInt::from(self.k + 1) * self.weight.weyl_dim(n)?)
    }

    /// Dimension as a polynomial in `n`.
    pub fn dim_poly(&self) -> Poly {
        self.weight
            .dim_poly()
            .scale(&BigInt::from(self.k + 1).into())
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = self.alias() {
            return f.write_str(a);
        }
        let rep = match self.family() {
            Some(Family::Lambda { a, b }) => format!("L({a},{b})"),
            Some(Family::SymPower(m)) => format!("Sym^{m} E"),
            None => {
                let s: Vec<String> = self.weight.parts().iter().map(u32::to_string).collect();
                format!("V({})", s.join(","))
            }
        };
        write!(f, "Sym^{} H * {rep}", self.k)
    }
}

impl FromStr for Bundle {
    type Err = RepError;

    /// Accepts an alias or `Sym^k H * R` with `R` one of `L(a,b)`,
    /// `Sym^m E`, `V(p1,p2,...)`. Either factor may be omitted.
    fn from_str(s: &str) -> Result<Self, RepError> {
        let t = s.trim();
        if let Some((_, b)) = Bundle::aliases().find(|(a, _)| *a == t) {
            return Ok(b);
        }
        let bad = || RepError::Syntax(format!("unknown bundle '{s}'"));
        let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
        let mut k = 0;
        let mut weight = SpnWeight::trivial();
        let mut seen_rep = false;
        for factor in compact.split('*') {
            if let Some(rest) = factor.strip_prefix("Sym^") {
                if let Some(m) = rest.strip_suffix('H') {
                    k = m.parse().map_err(|_| bad())?;
                    continue;
                }
                if let Some(m) = rest.strip_suffix('E') {
                    let m: u32 = m.parse().map_err(|_| bad())?;
                    weight = SpnWeight::new(vec![m])?;
                    seen_rep = true;
                    continue;
                }
                return Err(bad());
            }
            if factor == "H" {
                k = 1;
                continue;
            }
            if factor == "E" {
                weight = SpnWeight::new(vec![1])?;
                seen_rep = true;
                continue;
            }
            let ints = |body: &str| -> Result<Vec<u32>, RepError> {
                body.split(',')
                    .filter(|x| !x.is_empty())
                    .map(|x| x.parse().map_err(|_| bad()))
                    .collect()
            };
            if let Some(body) = factor.strip_prefix("L(").and_then(|r| r.strip_suffix(')')) {
                let v = ints(body)?;
                let [a, b] = v[..] else { return Err(bad()) };
                weight = Bundle::lambda(0, a, b)?.weight;
                seen_rep = true;
                continue;
            }
            if let Some(body) = factor.strip_prefix("V(").and_then(|r| r.strip_suffix(')')) {
                weight = SpnWeight::new(ints(body)?)?;
                seen_rep = true;
                continue;
            }
            return Err(bad());
        }
        if k == 0 && !seen_rep {
            return Err(bad());
        }
        Ok(Bundle::new(k, weight))
    }
}

impl Serialize for Bundle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Bundle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_round_trip() {
        for (name, b) in Bundle::aliases() {
            assert_eq!(b.to_string(), name);
            assert_eq!(name.parse::<Bundle>().unwrap(), b);
        }
    }

    #[test]
    fn generic_syntax() {
        assert_eq!("Sym^1 H * L(1,0)".parse::<Bundle>().unwrap(), Bundle::he());
        assert_eq!(
            "Sym^2 H * L(1,1)".parse::<Bundle>().unwrap(),
            Bundle::sym2h_sym2e()
        );
        assert_eq!("L(2,0)".parse::<Bundle>().unwrap(), Bundle::l20e());
        let b: Bundle = "Sym^4 H * L(3,1)".parse().unwrap();
        assert_eq!(b.weight.parts(), &[2, 1, 1]);
        assert_eq!(b.to_string(), "Sym^4 H * L(3,1)");
        assert_eq!(b.to_string().parse::<Bundle>().unwrap(), b);
        assert!("Sym^2 H * L(1,2)".parse::<Bundle>().is_err());
        assert!("nonsense".parse::<Bundle>().is_err());
    }

    #[test]
    fn families() {
        assert_eq!(
            Bundle::sym2e().family(),
            Some(Family::Lambda { a: 1, b: 1 })
        );
        assert_eq!(Bundle::l20e().family(), Some(Family::Lambda { a: 2, b: 0 }));
        assert_eq!(
            Bundle::hl21e().family(),
            Some(Family::Lambda { a: 2, b: 1 })
        );
        assert_eq!(Bundle::hsym3e().family(), Some(Family::SymPower(3)));
        assert_eq!(
            Bundle::trivial().family(),
            Some(Family::Lambda { a: 0, b: 0 })
        );
    }

    #[test]
    fn bundle_dims() {
        assert_eq!(Bundle::he().dim(3).unwrap(), 12.into());
        assert_eq!(Bundle::sym2h().dim(7).unwrap(), 3.into());
        assert_eq!(Bundle::l20e().dim(4).unwrap(), 27.into());
    }
}
