use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest trial divisor used when extracting square factors of a radicand.
const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// An exact element `a + b·sqrt(d)` of `Q(sqrt(d))`.
///
/// Canonical form: `d` is a squarefree integer different from 0 and 1 whenever
/// `b != 0`; when `b == 0` the radicand is stored as 0 and the value is a plain
/// rational. Two scalars with different nonzero radicands cannot be combined;
/// the operator impls panic in that case and the `try_*` methods report
/// [`Error::MixedExtensions`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    a: BigRational,
    b: BigRational,
    d: i64,
}

fn rat(n: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(den))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { a: BigRational::zero(), b: BigRational::zero(), d: 0 }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// The rational `num/den`. Panics if `den == 0`.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::from_rational(rat(num, den))
    }

    pub fn from_rational(a: BigRational) -> Self {
        Scalar { a, b: BigRational::zero(), d: 0 }
    }

    /// Builds `a + b·sqrt(d)` for a rational radicand, folding perfect squares
    /// into the rational part.
    pub fn from_parts(a: BigRational, b: BigRational, d: &BigRational) -> Result<Self> {
        let root = Self::sqrt_rational(d)?;
        let scaled = root * Scalar::from_rational(b);
        Ok(Scalar::from_rational(a) + scaled)
    }

    /// Exact square root of a rational number as an element of `Q(sqrt(k))`
    /// with `k` squarefree.
    pub fn sqrt_rational(r: &BigRational) -> Result<Self> {
        if r.is_zero() {
            return Ok(Scalar::zero());
        }
        // sqrt(p/q) = sqrt(p q) / q
        let q = r.denom().clone();
        let pq = r.numer() * &q;
        let negative = pq.is_negative();
        let (square_root, core) = split_square(&pq.abs())?;
        let coeff = BigRational::new(square_root, q);
        let core = if negative { -core } else { core };
        if core == BigInt::one() {
            return Ok(Scalar::from_rational(coeff));
        }
        let d = core
            .to_i64()
            .ok_or_else(|| Error::Unsupported(format!("radicand {core} too large")))?;
        Ok(Scalar { a: BigRational::zero(), b: coeff, d })
    }

    /// Square root of this scalar; only defined for plain rationals.
    pub fn sqrt(&self) -> Result<Self> {
        let r = self.to_rational().ok_or_else(|| Error::NotRational(self.to_string()))?;
        Self::sqrt_rational(r)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn radicand(&self) -> i64 {
        self.d
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    pub fn to_rational(&self) -> Option<&BigRational> {
        self.b.is_zero().then_some(&self.a)
    }

    /// The value as an integer, if it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        let r = self.to_rational()?;
        r.is_integer().then(|| r.to_integer())
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer()?.to_i64()
    }

    /// Sign of a plain rational.
    pub fn signum_rational(&self) -> Option<Ordering> {
        let r = self.to_rational()?;
        Some(r.cmp(&BigRational::zero()))
    }

    pub fn is_natural(&self) -> bool {
        matches!(self.to_integer(), Some(n) if n.sign() != Sign::Minus)
    }

    fn compatible_radicand(&self, other: &Self) -> Result<i64> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(Error::MixedExtensions(x, y)),
        }
    }

    fn normalized(a: BigRational, b: BigRational, d: i64) -> Self {
        if b.is_zero() {
            Scalar { a, b, d: 0 }
        } else {
            Scalar { a, b, d }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let d = self.compatible_radicand(other)?;
        Ok(Self::normalized(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let d = self.compatible_radicand(other)?;
        Ok(Self::normalized(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let d = self.compatible_radicand(other)?;
        let dr = BigRational::from_integer(BigInt::from(d));
        let a = &self.a * &other.a + &self.b * &other.b * dr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::normalized(a, b, d))
    }

    /// Galois conjugate `a - b·sqrt(d)`.
    pub fn conjugate(&self) -> Self {
        Self::normalized(self.a.clone(), -self.b.clone(), self.d)
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> BigRational {
        let dr = BigRational::from_integer(BigInt::from(self.d));
        &self.a * &self.a - &self.b * &self.b * dr
    }

    pub fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let c = self.conjugate();
        Ok(Self::normalized(c.a / &n, c.b / n, c.d))
    }

    pub fn inv(&self) -> Self {
        self.try_inv().expect("inverse of zero scalar")
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.try_inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Scalar::one(), |acc, _| acc * self)
    }
}

/// Splits `n > 0` as `s^2 · k` with `k` squarefree.
fn split_square(n: &BigInt) -> Result<(BigInt, BigInt)> {
    let mut rest = n.clone();
    let mut root = BigInt::one();
    let mut p: u64 = 2;
    while p <= TRIAL_DIVISION_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let sq = &bp * &bp;
        while (&rest % &sq).is_zero() {
            rest /= &sq;
            root *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest && rest > BigInt::one() {
        root *= &r;
        return Ok((root, BigInt::one()));
    }
    let limit = BigInt::from(TRIAL_DIVISION_LIMIT);
    if rest > &limit * &limit {
        return Err(Error::Unsupported(format!("cannot certify squarefree part of {n}")));
    }
    Ok((root, rest))
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_rational(r)
    }
}

impl From<BigInt> for Scalar {
    fn from(n: BigInt) -> Self {
        Scalar::from_rational(BigRational::from_integer(n))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::normalized(-self.a, -self.b, self.d)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl SubAssign<Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self = &*self - &rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |acc, x| acc * x)
    }
}

/// Structural order: radicand, then rational part, then irrational part.
/// On plain rationals this is the numeric order.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d
            .cmp(&other.d)
            .then_with(|| self.a.cmp(&other.a))
            .then_with(|| self.b.cmp(&other.b))
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let coeff = if self.b.is_one() {
            String::new()
        } else if (-&self.b).is_one() {
            "-".to_string()
        } else {
            format!("{}*", self.b)
        };
        if self.a.is_zero() {
            write!(f, "{coeff}sqrt({})", self.d)
        } else if self.b.is_negative() {
            write!(f, "{}{coeff}sqrt({})", self.a, self.d)
        } else {
            write!(f, "{}+{coeff}sqrt({})", self.a, self.d)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    BigRational::from_str(s).map_err(|_| Error::Parse(format!("not a rational literal: {s:?}")))
}

/// Accepts `p`, `p/q`, and `a+b*sqrt(d)` forms (with either sign, `b` and `a`
/// optional).
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar literal".into()));
        }
        let Some(pos) = s.find("sqrt(") else {
            return parse_rational(&s).map(Scalar::from_rational);
        };
        let close = s[pos..]
            .find(')')
            .map(|i| pos + i)
            .ok_or_else(|| Error::Parse(format!("unclosed sqrt in {input:?}")))?;
        if close + 1 != s.len() {
            return Err(Error::Parse(format!("trailing input after sqrt in {input:?}")));
        }
        let radicand = parse_rational(&s[pos + 5..close])?;
        let prefix = &s[..pos];
        let prefix = prefix.strip_suffix('*').unwrap_or(prefix);
        let split = prefix
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .last();
        let (rational_text, coeff_text) = match split {
            Some(i) => (&prefix[..i], &prefix[i..]),
            None => ("", prefix),
        };
        let a = if rational_text.is_empty() {
            BigRational::zero()
        } else {
            parse_rational(rational_text)?
        };
        let b = match coeff_text {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            t => parse_rational(t)?,
        };
        Scalar::from_parts(a, b, &radicand)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Scalar::from_int(n)),
        }
    }
}

/// Shorthand for `Scalar::frac`.
pub fn q(num: i64, den: i64) -> Scalar {
    Scalar::frac(num, den)
}
