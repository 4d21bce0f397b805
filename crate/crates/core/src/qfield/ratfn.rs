//! Rational functions in `n`: the coefficient field ℚ(n).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::parse;
use super::poly::Poly;
use super::QfieldError;

/// An element of ℚ(n) in canonical form.
///
/// Numerator and denominator are coprime and the denominator is monic, so
/// two values are equal exactly when their fields are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    /// Reduces `num/den` to canonical form.
    pub fn normalize(num: Poly, den: Poly) -> Result<Self, QfieldError> {
        if den.is_zero() {
            return Err(QfieldError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RationalFn::zero());
        }
        if den.is_constant() {
            let lead = den.leading().recip();
            return Ok(RationalFn::from_poly(num.scale(&lead)));
        }
        let g = Poly::gcd(&num, &den);
        let (mut n, _) = num.div_rem(&g);
        let (mut d, _) = den.div_rem(&g);
        let lead = d.leading().recip();
        n = n.scale(&lead);
        d = d.scale(&lead);
        Ok(RationalFn { num: n, den: d })
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFn {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn zero() -> Self {
        RationalFn::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RationalFn::from_poly(Poly::one())
    }

    /// The indeterminate `n`.
    pub fn n() -> Self {
        RationalFn::from_poly(Poly::var())
    }

    pub fn from_int(c: i64) -> Self {
        RationalFn::from_poly(Poly::from_int(c))
    }

    /// `a/b` as a constant. Panics if `b == 0`.
    pub fn ratio(a: i64, b: i64) -> Self {
        RationalFn::constant(BigRational::new(a.into(), b.into()))
    }

    pub fn constant(c: BigRational) -> Self {
        RationalFn::from_poly(Poly::constant(c))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == Poly::one() && self.den == Poly::one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        self.is_constant()
            .then(|| self.num.constant_term() / self.den.constant_term())
    }

    /// Exact value at an integer `n`.
    pub fn evaluate(&self, n: i64) -> Result<BigRational, QfieldError> {
        let d = self.den.eval_int(n);
        if d.is_zero() {
            return Err(QfieldError::Pole {
                n,
                factor: self.pole_factor(n),
            });
        }
        Ok(self.num.eval_int(n) / d)
    }

    /// Specializes to the constant `self(n)`.
    pub fn specialize(&self, n: i64) -> Result<RationalFn, QfieldError> {
        self.evaluate(n).map(RationalFn::constant)
    }

    fn pole_factor(&self, n: i64) -> String {
        let lin = RationalFn::from_poly(Poly::from_ints(&[-n, 1]));
        lin.to_string()
    }

    /// Integer values of `n` at which the denominator vanishes.
    pub fn integer_poles(&self) -> Vec<i64> {
        self.den.integer_roots()
    }

    /// Integer values of `n` at which the numerator vanishes.
    pub fn integer_zeros(&self) -> Vec<i64> {
        self.num.integer_roots()
    }

    pub fn inv(&self) -> Result<RationalFn, QfieldError> {
        if self.is_zero() {
            return Err(QfieldError::DivisionByZero);
        }
        RationalFn::normalize(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &RationalFn) -> Result<RationalFn, QfieldError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> RationalFn {
        (0..e).fold(RationalFn::one(), |acc, _| &acc * self)
    }

    /// Sign of `self(n)` if it is the same for every integer `n >= n0`,
    /// `None` if it changes sign or has a pole in that range.
    pub fn sign_for_n_ge(&self, n0: i64) -> Option<Ordering> {
        if self.is_zero() {
            return Some(Ordering::Equal);
        }
        let sn = poly_sign_for_n_ge(&self.num, n0)?;
        let sd = poly_sign_for_n_ge(&self.den, n0)?;
        if sn == Ordering::Equal || sd == Ordering::Equal {
            return None;
        }
        Some(if sn == sd {
            Ordering::Greater
        } else {
            Ordering::Less
        })
    }

    /// Factored text form in the exchange grammar, e.g. `(n-1)/(2*(n+2))`.
    pub fn to_grammar(&self) -> String {
        self.render(Style::Grammar)
    }

    /// Factored text form with implicit multiplication, e.g. `(n+1)/(2n(n+2))`.
    pub fn to_compact(&self) -> String {
        self.render(Style::Compact)
    }

    /// `self * symbol`, rendered with the symbol placed in the numerator,
    /// e.g. `scal/(2*(n+2))`.
    pub fn times_symbol(&self, symbol: &str, style: Style) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts = self.parts();
        let num = parts.num_factors(style);
        let numerator = if num.is_empty() {
            symbol.to_string()
        } else {
            format!("{}{}{symbol}", join_factors(&num, style), style.mul())
        };
        let sign = if parts.negative { "-" } else { "" };
        match parts.den_string(style) {
            None => format!("{sign}{numerator}"),
            Some(d) => format!("{sign}{numerator}/{d}"),
        }
    }

    fn render(&self, style: Style) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts = self.parts();
        let num = parts.num_factors(style);
        let den = parts.den_string(style);
        let sign = if parts.negative { "-" } else { "" };
        let numerator = match num.len() {
            0 => "1".to_string(),
            1 => {
                let f = &num[0];
                if (den.is_some() || parts.negative) && needs_parens(f) {
                    format!("({f})")
                } else {
                    f.clone()
                }
            }
            _ => join_factors(&num, style),
        };
        match den {
            None => format!("{sign}{numerator}"),
            Some(d) => format!("{sign}{numerator}/{d}"),
        }
    }

    fn parts(&self) -> Parts {
        let (cn, pn) = self.num.primitive_part();
        let (cd, pd) = self.den.primitive_part();
        let c = cn / cd;
        Parts {
            negative: c.is_negative(),
            num_const: c.numer().abs(),
            den_const: c.denom().clone(),
            num: factor_primitive(&pn),
            den: factor_primitive(&pd),
        }
    }
}

fn has_additive(s: &str) -> bool {
    s.contains('+') || s[1..].contains('-')
}

fn needs_parens(s: &str) -> bool {
    has_additive(s) && !s.starts_with('(')
}

fn join_factors(fs: &[String], style: Style) -> String {
    let wrapped: Vec<String> = fs
        .iter()
        .map(|f| {
            if needs_parens(f) {
                format!("({f})")
            } else {
                f.clone()
            }
        })
        .collect();
    match style {
        Style::Grammar => wrapped.join("*"),
        Style::Compact => {
            let mut out = String::new();
            for (i, f) in wrapped.iter().enumerate() {
                let prev_digit = out.chars().last().is_some_and(|c| c.is_ascii_digit());
                let next_digit = f.chars().next().is_some_and(|c| c.is_ascii_digit());
                if i > 0 && prev_digit && next_digit {
                    out.push('*');
                }
                out.push_str(f);
            }
            out
        }
    }
}

/// Output flavour for [`RationalFn`] text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Grammar,
    Compact,
}

impl Style {
    fn mul(self) -> &'static str {
        match self {
            Style::Grammar => "*",
            Style::Compact => " ",
        }
    }
}

struct Parts {
    negative: bool,
    num_const: BigInt,
    den_const: BigInt,
    num: Vec<(Vec<BigInt>, u32)>,
    den: Vec<(Vec<BigInt>, u32)>,
}

impl Parts {
    fn num_factors(&self, style: Style) -> Vec<String> {
        let mut out = Vec::new();
        if !self.num_const.is_one() {
            out.push(self.num_const.to_string());
        }
        out.extend(self.num.iter().map(|(p, e)| factor_text(p, *e, style)));
        out
    }

    fn den_string(&self, style: Style) -> Option<String> {
        let mut fs = Vec::new();
        if !self.den_const.is_one() {
            fs.push(self.den_const.to_string());
        }
        fs.extend(self.den.iter().map(|(p, e)| factor_text(p, *e, style)));
        match fs.len() {
            0 => None,
            1 if !needs_parens(&fs[0]) => Some(fs[0].clone()),
            1 => Some(format!("({})", fs[0])),
            _ => Some(format!("({})", join_factors(&fs, style))),
        }
    }
}

/// Splits a primitive integer polynomial into linear factors over ℤ plus an
/// irreducible-over-ℚ remainder. Factors are returned with multiplicity.
fn factor_primitive(p: &[BigInt]) -> Vec<(Vec<BigInt>, u32)> {
    if p.len() <= 1 {
        return Vec::new();
    }
    let poly = Poly::from_coeffs(
        p.iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect(),
    );
    let mut rest = poly.clone();
    let mut out: Vec<(Vec<BigInt>, u32)> = Vec::new();
    for r in poly.rational_roots() {
        // root -b/a  ->  factor a*n + b with a > 0
        let a = r.denom().clone();
        let b = -r.numer().clone();
        let lin = vec![b, a];
        let lin_poly = Poly::from_coeffs(
            lin.iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        );
        rest = rest.div_rem(&lin_poly).0;
        match out.iter_mut().find(|(f, _)| *f == lin) {
            Some((_, e)) => *e += 1,
            None => out.push((lin, 1)),
        }
    }
    let (_, rest_prim) = rest.primitive_part();
    if rest_prim.len() > 1 {
        out.push((rest_prim, 1));
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    out
}

fn factor_text(p: &[BigInt], e: u32, style: Style) -> String {
    let base = poly_text(p, style);
    if e == 1 {
        base
    } else if has_additive(&base) || (style == Style::Compact && base.len() > 1) {
        format!("({base})^{e}")
    } else {
        format!("{base}^{e}")
    }
}

fn poly_text(p: &[BigInt], style: Style) -> String {
    let mul = match style {
        Style::Grammar => "*",
        Style::Compact => "",
    };
    let mut out = String::new();
    for (i, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push(if neg { '-' } else { '+' });
        }
        let mono = match i {
            0 => String::new(),
            1 => "n".to_string(),
            _ => format!("n^{i}"),
        };
        if i == 0 {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{abs}{mul}{mono}"));
        }
    }
    out
}

fn poly_sign_for_n_ge(p: &Poly, n0: i64) -> Option<Ordering> {
    if p.is_zero() {
        return Some(Ordering::Equal);
    }
    let lead = p.leading();
    let lead_sign = lead.cmp(&BigRational::zero());
    // Cauchy bound on the absolute value of real roots
    let bound = p
        .coeffs()
        .iter()
        .map(|c| (c / &lead).abs())
        .max()
        .unwrap_or_else(BigRational::zero)
        + BigRational::one();
    let bound = bound.ceil().to_integer().to_i64().unwrap_or(i64::MAX);
    if bound.saturating_sub(n0) > 100_000 {
        return shifted_sign(p, n0);
    }
    let mut sign = None;
    for n in n0..=bound.max(n0) {
        let s = p.eval_int(n).cmp(&BigRational::zero());
        match sign {
            None => sign = Some(s),
            Some(prev) if prev != s => return None,
            _ => {}
        }
    }
    match sign {
        Some(s) if s == lead_sign => Some(s),
        Some(_) => None,
        None => Some(lead_sign),
    }
}

// p(n0 + t) with every coefficient of one sign is sign-definite for t >= 0
fn shifted_sign(p: &Poly, n0: i64) -> Option<Ordering> {
    let shift = Poly::from_ints(&[n0, 1]);
    let shifted = p.coeffs().iter().rev().fold(Poly::zero(), |acc, c| {
        &(&acc * &shift) + &Poly::constant(c.clone())
    });
    let signs: Vec<Ordering> = shifted
        .coeffs()
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.cmp(&BigRational::zero()))
        .collect();
    let first = *signs.first()?;
    signs.iter().all(|s| *s == first).then_some(first)
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_grammar())
    }
}

impl Default for RationalFn {
    fn default() -> Self {
        RationalFn::zero()
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFn({})", self.to_grammar())
    }
}

impl FromStr for RationalFn {
    type Err = QfieldError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse(s)
    }
}

impl Serialize for RationalFn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_grammar())
    }
}

impl<'de> Deserialize<'de> for RationalFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for RationalFn {
    fn from(c: i64) -> Self {
        RationalFn::from_int(c)
    }
}

impl From<BigRational> for RationalFn {
    fn from(c: BigRational) -> Self {
        RationalFn::constant(c)
    }
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        if self.den == rhs.den {
            return RationalFn::normalize(&self.num + &rhs.num, self.den.clone()).unwrap();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFn::normalize(num, &self.den * &rhs.den).unwrap()
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self + &(-rhs)
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        if self.is_zero() || rhs.is_zero() {
            return RationalFn::zero();
        }
        RationalFn::normalize(&self.num * &rhs.num, &self.den * &rhs.den).unwrap()
    }
}

impl Div for &RationalFn {
    type Output = RationalFn;
    /// Panics on division by zero; see [`RationalFn::checked_div`].
    fn div(self, rhs: &RationalFn) -> RationalFn {
        self.checked_div(rhs)
            .expect("division by the zero rational function")
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RationalFn {
            type Output = RationalFn;
            fn $m(self, rhs: RationalFn) -> RationalFn { (&self).$m(&rhs) }
        }
        impl $tr<&RationalFn> for RationalFn {
            type Output = RationalFn;
            fn $m(self, rhs: &RationalFn) -> RationalFn { (&self).$m(rhs) }
        }
        impl $tr<RationalFn> for &RationalFn {
            type Output = RationalFn;
            fn $m(self, rhs: RationalFn) -> RationalFn { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        -&self
    }
}

impl Zero for RationalFn {
    fn zero() -> Self {
        RationalFn::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFn {
    fn one() -> Self {
        RationalFn::one()
    }
}
