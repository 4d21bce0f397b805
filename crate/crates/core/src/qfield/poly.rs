//! Dense univariate polynomials over ℚ in the formal parameter `n`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial with rational coefficients, stored low degree first.
///
/// The coefficient vector never carries trailing zeros, so the zero
/// polynomial is the empty vector and structural equality is semantic.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    /// The monomial `n`.
    pub fn var() -> Self {
        Poly::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn from_int(c: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(c)))
    }

    /// Builds `c_0 + c_1 n + ...` from integer coefficients.
    pub fn from_ints(cs: &[i64]) -> Self {
        Poly::from_coeffs(
            cs.iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeffs
            .first()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.leading().recip();
        self.scale(&inv)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, n: i64) -> BigRational {
        self.eval(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.degree().unwrap_or(0);
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let len = self.coeffs.len();
        if len <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); len - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &c * d;
            }
            quot[i] = c;
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`. Runs the primitive
    /// remainder sequence over ℤ.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        let (_, mut x) = a.primitive_part();
        let (_, mut y) = b.primitive_part();
        if x.len() < y.len() {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_empty() {
            let r = int_primitive(pseudo_rem(&x, &y));
            x = y;
            y = r;
        }
        Poly::from_coeffs(x.into_iter().map(BigRational::from_integer).collect()).monic()
    }

    /// Splits `self = content * primitive`, where `primitive` has coprime
    /// integer coefficients and a positive leading coefficient.
    pub fn primitive_part(&self) -> (BigRational, Vec<BigInt>) {
        if self.is_zero() {
            return (BigRational::zero(), Vec::new());
        }
        let lcm_den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm_den.clone())).to_integer())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints.last().is_some_and(|c| c.is_negative()) {
            g = -g;
        }
        let prim = ints.iter().map(|c| c / &g).collect();
        (BigRational::new(g, lcm_den), prim)
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// `self / gcd(self, self')`: the same roots, each simple.
    pub fn square_free(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = Poly::gcd(self, &self.derivative());
        self.div_rem(&g).0
    }

    /// All rational roots, with multiplicity, in ascending order.
    ///
    /// With `a` the leading coefficient of the primitive square-free part
    /// `f`, every rational root of `f` is `y/a` for an integer root `y` of the
    /// monic integer polynomial `a^{d-1} f(y/a)`. Those are located exactly
    /// by Sturm bisection over integer intervals.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let (_, f) = self.square_free().primitive_part();
        let d = f.len() - 1;
        let a = f[d].clone();
        let mut power = BigInt::one();
        let mut monic = vec![BigInt::zero(); d + 1];
        for i in (0..d).rev() {
            monic[i] = &f[i] * &power;
            power *= &a;
        }
        monic[d] = BigInt::one();
        let mut roots = Vec::new();
        for y in integer_roots_square_free(&monic) {
            let r = BigRational::new(y, a.clone());
            let lin = Poly::from_coeffs(vec![-r.clone(), BigRational::one()]);
            let mut p = self.clone();
            loop {
                let (q, rem) = p.div_rem(&lin);
                if !rem.is_zero() {
                    break;
                }
                roots.push(r.clone());
                p = q;
            }
        }
        roots.sort();
        roots
    }

    /// Lagrange interpolation through distinct nodes.
    pub fn interpolate(points: &[(BigRational, BigRational)]) -> Poly {
        let mut acc = Poly::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = Poly::constant(yi.clone());
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let lin = Poly::from_coeffs(vec![-xj.clone(), BigRational::one()]);
                basis = (&basis * &lin).scale(&(xi - xj).recip());
            }
            acc = &acc + &basis;
        }
        acc
    }

    /// Integer roots (deduplicated, ascending).
    pub fn integer_roots(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self
            .rational_roots()
            .into_iter()
            .filter(|r| r.is_integer())
            .filter_map(|r| i64::try_from(r.to_integer()).ok())
            .collect();
        out.dedup();
        out
    }
}

/// `lc(y)^k · x mod y` over ℤ, trailing zeros trimmed.
fn pseudo_rem(x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
    let mut r = x.to_vec();
    let dy = y.len() - 1;
    let lc = &y[dy];
    while r.len() > dy {
        let top = r.len() - 1;
        let c = r[top].clone();
        for v in r.iter_mut() {
            *v *= lc;
        }
        for (j, yj) in y.iter().enumerate() {
            r[top - dy + j] -= &c * yj;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    r
}

fn int_primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in v.iter_mut() {
            *c /= &g;
        }
    }
    v
}

fn eval_big(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    coeffs
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Sturm chain of a square-free polynomial, each member rescaled by a
/// positive constant to integer coefficients.
fn sturm_chain(coeffs: &[BigInt]) -> Vec<Vec<BigInt>> {
    let to_poly = |c: &[BigInt]| {
        Poly::from_coeffs(
            c.iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        )
    };
    let positive_primitive = |p: &Poly| -> Vec<BigInt> {
        let (content, ints) = p.primitive_part();
        if content.is_negative() {
            ints.into_iter().map(|x| -x).collect()
        } else {
            ints
        }
    };
    let p0 = to_poly(coeffs);
    let mut chain = vec![coeffs.to_vec()];
    let mut prev = p0.clone();
    let mut cur = p0.derivative();
    while !cur.is_zero() {
        let c = positive_primitive(&cur);
        chain.push(c);
        let (_, r) = prev.div_rem(&cur);
        prev = cur;
        cur = -&r;
    }
    chain
}

fn sign_changes(chain: &[Vec<BigInt>], x: &BigInt) -> usize {
    let signs: Vec<bool> = chain
        .iter()
        .map(|c| eval_big(c, x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Integer roots of a square-free integer polynomial, ascending.
fn integer_roots_square_free(coeffs: &[BigInt]) -> Vec<BigInt> {
    let lead = coeffs.last().expect("nonconstant").abs();
    // Cauchy bound: every root has |x| < 1 + max |c_i / c_d|.
    let max = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_default();
    let bound = max.div_ceil(&lead) + BigInt::one();
    let chain = sturm_chain(coeffs);
    let mut out = Vec::new();
    // Each (lo, hi] interval on the stack holds at least one real root.
    let mut stack = vec![(-&bound - BigInt::one(), bound.clone())];
    while let Some((lo, hi)) = stack.pop() {
        let count = sign_changes(&chain, &lo) - sign_changes(&chain, &hi);
        if count == 0 {
            continue;
        }
        if &hi - &lo == BigInt::one() {
            if eval_big(coeffs, &hi).is_zero() {
                out.push(hi);
            }
            continue;
        }
        let mid = (&lo + &hi).div_floor(&BigInt::from(2));
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort();
    out
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigRational::zero();
        Poly::from_coeffs(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*n"),
                _ => format!("{c}*n^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
