//! Highest weights of Sp(n) and the Weyl dimension formula.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::RepError;
use crate::qfield::Poly;

/// A dominant weight `ρ₁ ≥ ρ₂ ≥ … ≥ 0`, stored as its nonzero prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct SpnWeight {
    parts: Vec<u32>,
}

impl SpnWeight {
    pub fn trivial() -> Self {
        SpnWeight::default()
    }

    /// Trailing zeros are dropped; the rest must be non-increasing.
    pub fn new(mut parts: Vec<u32>) -> Result<Self, RepError> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(RepError::NonDominant(parts));
        }
        Ok(SpnWeight { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Length of the nonzero prefix; the smallest rank carrying this weight.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// `ρ_i` with 1-based index and implicit zeros.
    pub fn get(&self, i: usize) -> u32 {
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// `ρ ± e_ν` if the result is dominant.
    pub fn shifted(&self, nu: usize, up: bool) -> Option<SpnWeight> {
        let mut p = self.parts.clone();
        if p.len() < nu {
            p.resize(nu, 0);
        }
        if up {
            p[nu - 1] += 1;
        } else {
            p[nu - 1] = p[nu - 1].checked_sub(1)?;
        }
        SpnWeight::new(p).ok()
    }

    /// Weyl dimension of `V_ρ` for Sp(n), with `l_i = ρ_i + n − i + 1`.
    pub fn weyl_dim(&self, n: i64) -> Result<BigInt, RepError> {
        if n < 1 || (n as usize) < self.len() {
            return Err(RepError::RankTooSmall {
                what: self.to_string(),
                n,
            });
        }
        let l: Vec<BigInt> = (1..=n as usize)
            .map(|i| BigInt::from(self.get(i) as i64 + n - i as i64 + 1))
            .collect();
        let m: Vec<BigInt> = (1..=n as usize)
            .map(|i| BigInt::from(n - i as i64 + 1))
            .collect();
        let prod = |v: &[BigInt]| {
            let mut acc: BigInt = v.iter().product();
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    acc *= &v[i] * &v[i] - &v[j] * &v[j];
                }
            }
            acc
        };
        let (q, r) = prod(&l).div_rem(&prod(&m));
        debug_assert!(r.is_zero());
        Ok(q)
    }

    /// The dimension polynomial in `n`, valid for every `n ≥ max(len, 1)`.
    pub fn dim_poly(&self) -> Poly {
        let start = self.len().max(1) as i64;
        let deg = self.size() as i64;
        let pts: Vec<(BigRational, BigRational)> = (start..=start + deg)
            .map(|n| {
                (
                    BigRational::from_integer(n.into()),
                    BigRational::from_integer(self.weyl_dim(n).expect("n in range")),
                )
            })
            .collect();
        let p = Poly::interpolate(&pts);
        let check = start + deg + 1;
        debug_assert_eq!(
            p.eval_int(check),
            BigRational::from_integer(self.weyl_dim(check).unwrap())
        );
        p
    }
}

impl TryFrom<Vec<u32>> for SpnWeight {
    type Error = RepError;
    fn try_from(v: Vec<u32>) -> Result<Self, RepError> {
        SpnWeight::new(v)
    }
}

impl From<SpnWeight> for Vec<u32> {
    fn from(w: SpnWeight) -> Vec<u32> {
        w.parts
    }
}

impl fmt::Display for SpnWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Binomial coefficient, used by tests and the CLI.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}
