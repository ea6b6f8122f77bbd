use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::Error;

/// An exact dyadic rational `mantissa * 2^exponent`.
///
/// Values are kept canonical: the mantissa is odd, or the value is zero and
/// the exponent is zero. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

/// Floor of `m / 2^k` for `k >= 0`.
pub(crate) fn shr_floor(m: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        return m.clone();
    }
    if m.sign() == Sign::Minus {
        let t: BigInt = -m - 1u32;
        -(t >> k) - 1u32
    } else {
        m >> k
    }
}

/// Ceiling of `m / 2^k` for `k >= 0`.
pub(crate) fn shr_ceil(m: &BigInt, k: u64) -> BigInt {
    -shr_floor(&-m, k)
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Dyadic {
        if mant.is_zero() {
            return Dyadic { mant, exp: 0 };
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mant, exp }
        } else {
            Dyadic { mant: mant >> tz, exp: exp + tz as i64 }
        }
    }

    pub fn zero() -> Dyadic {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Dyadic {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_i64(v: i64) -> Dyadic {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_int(v: BigInt) -> Dyadic {
        Dyadic::new(v, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Dyadic {
        Dyadic { mant: BigInt::one(), exp: e }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Multiply by `2^k`.
    pub fn shl(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Exact value as a rational.
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as u64)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Integer `n` with `self = n * 2^-prec`, when exact.
    fn scaled(&self, prec: i64) -> Option<BigInt> {
        let s = self.exp + prec;
        if s >= 0 {
            Some(&self.mant << s as u64)
        } else {
            None
        }
    }

    /// Largest multiple of `2^-prec` that is `<= self`.
    pub fn floor_to(&self, prec: i64) -> Dyadic {
        match self.scaled(prec) {
            Some(_) => self.clone(),
            None => Dyadic::new(shr_floor(&self.mant, (-(self.exp + prec)) as u64), -prec),
        }
    }

    /// Smallest multiple of `2^-prec` that is `>= self`.
    pub fn ceil_to(&self, prec: i64) -> Dyadic {
        match self.scaled(prec) {
            Some(_) => self.clone(),
            None => Dyadic::new(shr_ceil(&self.mant, (-(self.exp + prec)) as u64), -prec),
        }
    }

    /// Round down to at most `bits` significant bits.
    pub fn floor_bits(&self, bits: u64) -> Dyadic {
        let nb = self.mant.bits();
        if nb <= bits {
            return self.clone();
        }
        let k = nb - bits;
        Dyadic::new(shr_floor(&self.mant, k), self.exp + k as i64)
    }

    /// Round up to at most `bits` significant bits.
    pub fn ceil_bits(&self, bits: u64) -> Dyadic {
        let nb = self.mant.bits();
        if nb <= bits {
            return self.clone();
        }
        let k = nb - bits;
        Dyadic::new(shr_ceil(&self.mant, k), self.exp + k as i64)
    }

    /// Floor of `self` as an integer.
    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            shr_floor(&self.mant, (-self.exp) as u64)
        }
    }

    /// Exponent `e` with `2^(e-1) <= |self| < 2^e`; `None` for zero.
    pub fn magnitude(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.mant.bits() as i64)
        }
    }

    /// `floor(a / b)` on the grid `2^-prec`.
    pub fn div_floor(a: &Dyadic, b: &Dyadic, prec: i64) -> Dyadic {
        let (n, d) = Self::quotient_parts(a, b, prec);
        Dyadic::new(n.div_floor(&d), -prec)
    }

    /// `ceil(a / b)` on the grid `2^-prec`.
    pub fn div_ceil(a: &Dyadic, b: &Dyadic, prec: i64) -> Dyadic {
        let (n, d) = Self::quotient_parts(a, b, prec);
        Dyadic::new(-((-n).div_floor(&d)), -prec)
    }

    fn quotient_parts(a: &Dyadic, b: &Dyadic, prec: i64) -> (BigInt, BigInt) {
        assert!(!b.is_zero(), "dyadic division by zero");
        let s = a.exp - b.exp + prec;
        let (mut n, mut d) = if s >= 0 {
            (&a.mant << s as u64, b.mant.clone())
        } else {
            (a.mant.clone(), &b.mant << (-s) as u64)
        };
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        (n, d)
    }

    /// Largest multiple of `2^-prec` below the rational `q`.
    pub fn from_rational_floor(q: &Rational, prec: i64) -> Dyadic {
        let (n, d) = scale_rational(q, prec);
        Dyadic::new(n.div_floor(&d), -prec)
    }

    /// Smallest multiple of `2^-prec` above the rational `q`.
    pub fn from_rational_ceil(q: &Rational, prec: i64) -> Dyadic {
        let (n, d) = scale_rational(q, prec);
        Dyadic::new(-((-n).div_floor(&d)), -prec)
    }

    /// The rational as a dyadic, if its denominator is a power of two.
    pub fn from_rational_exact(q: &Rational) -> Option<Dyadic> {
        let d = q.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz).is_one() {
            Some(Dyadic::new(q.numer().clone(), -(tz as i64)))
        } else {
            None
        }
    }

    /// Approximate conversion for display and heuristics only.
    pub fn to_f64_lossy(&self) -> f64 {
        let nb = self.mant.bits() as i64;
        let (m, e) = if nb > 60 {
            (shr_floor(&self.mant, (nb - 60) as u64), self.exp + nb - 60)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mf = num_traits::ToPrimitive::to_f64(&m).unwrap_or(0.0);
        mul_pow2_f64(mf, e)
    }
}

fn mul_pow2_f64(mut x: f64, mut e: i64) -> f64 {
    while e > 0 {
        let k = e.min(1000);
        x *= f64::from_bits(((1023 + k) as u64) << 52);
        e -= k;
        if x.is_infinite() {
            return x;
        }
    }
    while e < 0 {
        let k = (-e).min(1000);
        x *= f64::from_bits(((1023 - k) as u64) << 52);
        e += k;
        if x == 0.0 {
            return x;
        }
    }
    x
}

fn scale_rational(q: &Rational, prec: i64) -> (BigInt, BigInt) {
    if prec >= 0 {
        (q.numer() << prec as u64, q.denom().clone())
    } else {
        (q.numer().clone(), q.denom() << (-prec) as u64)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        if sa != sb || self.is_zero() {
            return sa.cmp(&sb);
        }
        // same nonzero sign: compare magnitudes first
        let (ma, mb) = (self.magnitude().unwrap(), other.magnitude().unwrap());
        if ma != mb {
            let c = ma.cmp(&mb);
            return if sa == Sign::Minus { c.reverse() } else { c };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &rhs.mant << (rhs.exp - e) as u64;
        Dyadic::new(a + b, e)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &rhs.mant, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mant: -self.mant, exp: self.exp }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $f(self, rhs: Dyadic) -> Dyadic {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_i64(v)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{} (~{:e})", self.mant, self.exp, self.to_f64_lossy())
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `m*2^e`, plain integers, and decimals whose value is dyadic
    /// (`0.375`, `-1.5e-3` is rejected as it is not dyadic).
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(String::from("dyadic: ") + s);
        if let Some((m, e)) = s.split_once("*2^") {
            let mant = BigInt::from_str(m.trim()).map_err(|_| bad())?;
            let exp = i64::from_str(e.trim().trim_start_matches('(').trim_end_matches(')'))
                .map_err(|_| bad())?;
            return Ok(Dyadic::new(mant, exp));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
        if ip.is_empty() && fp.is_empty() {
            return Err(bad());
        }
        if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let mut digits = ip.to_string();
        digits.push_str(fp);
        let num = BigInt::from_str(&digits).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10u32), fp.len());
        let q = Rational::new(if neg { -num } else { num }, den);
        Dyadic::from_rational_exact(&q).ok_or_else(|| Error::Parse(String::from("not a dyadic decimal: ") + s))
    }
}
