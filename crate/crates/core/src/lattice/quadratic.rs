//! Exact arithmetic in a real quadratic field `Q(sqrt D)`.
//!
//! Action parameters (translation rows, generating lattice) are elements
//! `a + b sqrt(D)` with rational `a`, `b`. `D = 1` denotes the rationals,
//! in which case the surd part is always zero.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Returns true for squarefree `d >= 1`.
pub fn is_squarefree(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut k = 2u64;
    while k.saturating_mul(k) <= d {
        if d.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Parses an exact rational: `"p/q"`, `"p"`, or a finite decimal like `"-0.25"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidSpec(format!("not an exact rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::InvalidSpec(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let f = BigInt::from_str(frac).map_err(|_| bad())?;
        let mag = int.abs() * &scale + f;
        let num = if neg { -mag } else { mag };
        return Ok(BigRational::new(num, scale));
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|_| bad())
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Element `a + b sqrt(D)` of a real quadratic field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    a: BigRational,
    b: BigRational,
    d: u64,
}

impl QuadraticNumber {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Result<Self> {
        if !is_squarefree(d) {
            return Err(Error::InvalidSpec(format!(
                "field discriminant {d} is not squarefree"
            )));
        }
        if d == 1 && !b.is_zero() {
            return Err(Error::InvalidSpec(
                "surd part must be zero over the rationals (D = 1)".into(),
            ));
        }
        Ok(Self { a, b, d })
    }

    pub fn rational(a: BigRational, d: u64) -> Self {
        Self {
            a,
            b: BigRational::zero(),
            d,
        }
    }

    pub fn from_int(a: i64, d: u64) -> Self {
        Self::rational(BigRational::from_integer(a.into()), d)
    }

    pub fn zero(d: u64) -> Self {
        Self::from_int(0, d)
    }

    pub fn one(d: u64) -> Self {
        Self::from_int(1, d)
    }

    /// `sqrt(D)` itself. Requires `D > 1`.
    pub fn sqrt_d(d: u64) -> Result<Self> {
        Self::new(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn discriminant(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn field_of(&self, other: &Self) -> u64 {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, true) => self.d.max(other.d),
            (false, true) => self.d,
            (true, false) => other.d,
            (false, false) => {
                assert_eq!(
                    self.d, other.d,
                    "mixing quadratic fields Q(sqrt {}) and Q(sqrt {})",
                    self.d, other.d
                );
                self.d
            }
        }
    }

    /// Exact sign of `a + b sqrt(D)`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            _ => {
                // opposite signs: compare a^2 with b^2 D
                let a2 = &self.a * &self.a;
                let b2d = &self.b * &self.b * BigRational::from_integer(self.d.into());
                match a2.cmp(&b2d) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Galois conjugate `a - b sqrt(D)`.
    pub fn conjugate(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: -self.b.clone(),
            d: self.d,
        }
    }

    /// Field norm `a^2 - D b^2`; zero only for zero.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.into())
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conjugate();
        Some(Self {
            a: c.a / &n,
            b: c.b / &n,
            d: self.d,
        })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self {
            a: &self.a * r,
            b: &self.b * r,
            d: self.d,
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.a) + rational_to_f64(&self.b) * (self.d as f64).sqrt()
    }

    /// Exact comparison with a rational bound.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        (self.clone() - Self::rational(r.clone(), self.d)).signum()
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum()
    }
}

impl Add for QuadraticNumber {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let d = self.field_of(&rhs);
        Self {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
            d,
        }
    }
}

impl Sub for QuadraticNumber {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        let d = self.field_of(&rhs);
        Self {
            a: self.a - rhs.a,
            b: self.b - rhs.b,
            d,
        }
    }
}

impl Mul for QuadraticNumber {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let d = self.field_of(&rhs);
        let dd = BigRational::from_integer(d.into());
        Self {
            a: &self.a * &rhs.a + &self.b * &rhs.b * dd,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
            d,
        }
    }
}

impl<'a> Mul<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;

    fn mul(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        self.clone() * rhs.clone()
    }
}

impl Neg for QuadraticNumber {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl fmt::Debug for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", rational_to_string(&self.a))
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", rational_to_string(&self.b), self.d)
        } else {
            write!(
                f,
                "{} + {}*sqrt({})",
                rational_to_string(&self.a),
                rational_to_string(&self.b),
                self.d
            )
        }
    }
}

/// Least common multiple of the denominators of a set of rationals.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}
