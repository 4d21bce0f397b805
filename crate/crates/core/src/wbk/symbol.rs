//! Operator symbols appearing in Weitzenböck identities.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::WbkError;
use crate::repcalc::{Bundle, EdgeIndex};

/// A basis symbol of an operator expression on a fixed bundle.
///
/// Composite symbols act on the ambient bundle `V`:
/// `DDSTAR = pr_V d d*`, `DSTARD = pr_V d* d`, `DSTARD[W] = d* pr_W d`,
/// and likewise `DELSTARDEL`, `DELDELSTAR`, `DELDELSTAR[W]` for the
/// divergence `δ` on symmetric tensors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OpSymbol {
    B(EdgeIndex),
    DdStar,
    DStarD(Option<Bundle>),
    DelStarDel,
    DelDelStar(Option<Bundle>),
    Lap,
    Rough,
    Qr,
    QHyper,
    Scal,
}

impl OpSymbol {
    pub fn b(big_n: i8, nu: i32) -> Self {
        OpSymbol::B(EdgeIndex::new(big_n, nu))
    }

    pub fn is_b(&self) -> bool {
        matches!(self, OpSymbol::B(_))
    }

    pub fn edge(&self) -> Option<EdgeIndex> {
        match self {
            OpSymbol::B(e) => Some(*e),
            _ => None,
        }
    }

    /// The first-order composites built from `d`, `d*`, `δ`, `δ*`.
    pub fn is_composite(&self) -> bool {
        matches!(
            self,
            OpSymbol::DdStar | OpSymbol::DStarD(_) | OpSymbol::DelStarDel | OpSymbol::DelDelStar(_)
        )
    }

    /// Bundle named inside the brackets, if any.
    pub fn projection(&self) -> Option<&Bundle> {
        match self {
            OpSymbol::DStarD(Some(w)) | OpSymbol::DelDelStar(Some(w)) => Some(w),
            _ => None,
        }
    }

    fn class(&self) -> u8 {
        match self {
            OpSymbol::B(_) => 0,
            OpSymbol::DdStar => 1,
            OpSymbol::DStarD(None) => 2,
            OpSymbol::DStarD(Some(_)) => 3,
            OpSymbol::DelStarDel => 4,
            OpSymbol::DelDelStar(None) => 5,
            OpSymbol::DelDelStar(Some(_)) => 6,
            OpSymbol::Lap => 7,
            OpSymbol::Rough => 8,
            OpSymbol::Qr => 9,
            OpSymbol::QHyper => 10,
            OpSymbol::Scal => 11,
        }
    }
}

impl Ord for OpSymbol {
    /// `B` symbols in edge order, then composites, then `LAP`, `ROUGH`,
    /// `QR`, `QHYPER`, `SCAL`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.class()
            .cmp(&other.class())
            .then_with(|| match (self, other) {
                (OpSymbol::B(a), OpSymbol::B(b)) => a.order_key().cmp(&b.order_key()),
                _ => self.projection().cmp(&other.projection()),
            })
    }
}

impl PartialOrd for OpSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OpSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpSymbol::B(e) => write!(f, "B[{e}]"),
            OpSymbol::DdStar => f.write_str("DDSTAR"),
            OpSymbol::DStarD(None) => f.write_str("DSTARD"),
            OpSymbol::DStarD(Some(w)) => write!(f, "DSTARD[{w}]"),
            OpSymbol::DelStarDel => f.write_str("DELSTARDEL"),
            OpSymbol::DelDelStar(None) => f.write_str("DELDELSTAR"),
            OpSymbol::DelDelStar(Some(w)) => write!(f, "DELDELSTAR[{w}]"),
            OpSymbol::Lap => f.write_str("LAP"),
            OpSymbol::Rough => f.write_str("ROUGH"),
            OpSymbol::Qr => f.write_str("QR"),
            OpSymbol::QHyper => f.write_str("QHYPER"),
            OpSymbol::Scal => f.write_str("SCAL"),
        }
    }
}

impl FromStr for OpSymbol {
    type Err = WbkError;

    fn from_str(s: &str) -> Result<Self, WbkError> {
        let t = s.trim();
        let bad = || WbkError::UnknownSymbol(s.to_string());
        let simple = match t {
            "DDSTAR" => Some(OpSymbol::DdStar),
            "DSTARD" => Some(OpSymbol::DStarD(None)),
            "DELSTARDEL" => Some(OpSymbol::DelStarDel),
            "DELDELSTAR" => Some(OpSymbol::DelDelStar(None)),
            "LAP" => Some(OpSymbol::Lap),
            "ROUGH" => Some(OpSymbol::Rough),
            "QR" => Some(OpSymbol::Qr),
            "QHYPER" => Some(OpSymbol::QHyper),
            "SCAL" => Some(OpSymbol::Scal),
            _ => None,
        };
        if let Some(sym) = simple {
            return Ok(sym);
        }
        let (head, body) = t
            .strip_suffix(']')
            .and_then(|r| r.split_once('['))
            .ok_or_else(bad)?;
        match head {
            "B" => {
                let (a, b) = body.split_once(',').ok_or_else(bad)?;
                let big_n: i8 = a.trim().parse().map_err(|_| bad())?;
                let nu: i32 = b.trim().parse().map_err(|_| bad())?;
                if (big_n != 1 && big_n != -1) || nu == 0 {
                    return Err(bad());
                }
                Ok(OpSymbol::b(big_n, nu))
            }
            "DSTARD" | "DELDELSTAR" => {
                let w: Bundle = body.parse().map_err(|_| bad())?;
                Ok(if head == "DSTARD" {
                    OpSymbol::DStarD(Some(w))
                } else {
                    OpSymbol::DelDelStar(Some(w))
                })
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for OpSymbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OpSymbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for s in [
            "B[+1,-2]",
            "B[-1,+1]",
            "SCAL",
            "QR",
            "QHYPER",
            "LAP",
            "ROUGH",
            "DDSTAR",
            "DSTARD",
            "DSTARD[HE]",
            "DELDELSTAR[Sym2HSym2E]",
            "DELSTARDEL",
        ] {
            assert_eq!(s.parse::<OpSymbol>().unwrap().to_string(), s);
        }
        assert_eq!("B[1,-2]".parse::<OpSymbol>().unwrap(), OpSymbol::b(1, -2));
        assert!("B[2,1]".parse::<OpSymbol>().is_err());
        assert!("B[+1,0]".parse::<OpSymbol>().is_err());
        assert!("FOO".parse::<OpSymbol>().is_err());
        assert!("DSTARD[nope]".parse::<OpSymbol>().is_err());
    }

    #[test]
    fn canonical_order() {
        let mut v: Vec<OpSymbol> = [
            "SCAL", "B[+1,-1]", "LAP", "B[-1,-1]", "B[-1,+2]", "DDSTAR", "B[+1,+1]",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
        v.sort();
        let got: Vec<String> = v.iter().map(ToString::to_string).collect();
        assert_eq!(
            got,
            ["B[-1,+2]", "B[-1,-1]", "B[+1,+1]", "B[+1,-1]", "DDSTAR", "LAP", "SCAL"]
        );
    }
}
