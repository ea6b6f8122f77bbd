use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Dyadic, Rational};
use crate::Error;

/// A closed interval `[lo, hi]` with dyadic endpoints.
///
/// Every operation returns an enclosure of the exact image of its inputs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    /// Panics if `lo > hi`.
    pub fn new(lo: Dyadic, hi: Dyadic) -> Interval {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        Interval { lo, hi }
    }

    pub fn try_new(lo: Dyadic, hi: Dyadic) -> Option<Interval> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn point(d: Dyadic) -> Interval {
        Interval { lo: d.clone(), hi: d }
    }

    pub fn zero() -> Interval {
        Interval::point(Dyadic::zero())
    }

    pub fn one() -> Interval {
        Interval::point(Dyadic::one())
    }

    pub fn from_i64(v: i64) -> Interval {
        Interval::point(Dyadic::from_i64(v))
    }

    /// Outward enclosure of a rational on the grid `2^-prec` (exact when the
    /// rational is dyadic).
    pub fn from_rational(q: &Rational, prec: i64) -> Interval {
        match Dyadic::from_rational_exact(q) {
            Some(d) => Interval::point(d),
            None => Interval {
                lo: Dyadic::from_rational_floor(q, prec),
                hi: Dyadic::from_rational_ceil(q, prec),
            },
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Dyadic {
        (&self.lo + &self.hi).shl(-1)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.lo.to_rational() <= *q && *q <= self.hi.to_rational()
    }

    /// `other ⊆ self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// `other` lies in the interior of `self`.
    pub fn strictly_encloses(&self, other: &Interval) -> bool {
        self.lo < other.lo && other.hi < self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Certified `self < other` for every pair of points.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo >= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi <= other.hi { &self.hi } else { &other.hi };
        Interval::try_new(lo.clone(), hi.clone())
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        let lo = if self.lo <= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi >= other.hi { &self.hi } else { &other.hi };
        Interval::new(lo.clone(), hi.clone())
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        if !self.lo.is_negative() && !o.lo.is_negative() {
            return Interval { lo: &self.lo * &o.lo, hi: &self.hi * &o.hi };
        }
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mut lo = &c[0];
        let mut hi = &c[0];
        for v in &c[1..] {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        Interval { lo: lo.clone(), hi: hi.clone() }
    }

    pub fn mul_dyadic(&self, d: &Dyadic) -> Interval {
        self.mul(&Interval::point(d.clone()))
    }

    /// Multiply by `2^k` (exact).
    pub fn scale2(&self, k: i64) -> Interval {
        Interval { lo: self.lo.shl(k), hi: self.hi.shl(k) }
    }

    /// Reciprocal, endpoints rounded outward to `prec` fractional bits.
    pub fn recip(&self, prec: i64) -> Result<Interval, Error> {
        Interval::one().div(self, prec)
    }

    /// Quotient, endpoints rounded outward to `prec` fractional bits.
    pub fn div(&self, o: &Interval, prec: i64) -> Result<Interval, Error> {
        if o.contains_zero() {
            return Err(Error::DivisionByZeroInterval);
        }
        // candidates: extremes of a/b over the four endpoint pairs
        let pairs = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for (a, b) in pairs {
            let l = Dyadic::div_floor(a, b, prec);
            let h = Dyadic::div_ceil(a, b, prec);
            if lo.as_ref().is_none_or(|x| &l < x) {
                lo = Some(l);
            }
            if hi.as_ref().is_none_or(|x| &h > x) {
                hi = Some(h);
            }
        }
        Ok(Interval { lo: lo.unwrap(), hi: hi.unwrap() })
    }

    /// Round endpoints outward onto the grid `2^-prec`.
    pub fn round_out(&self, prec: i64) -> Interval {
        Interval { lo: self.lo.floor_to(prec), hi: self.hi.ceil_to(prec) }
    }

    /// Round endpoints outward to at most `bits` significant bits.
    pub fn round_out_bits(&self, bits: u64) -> Interval {
        Interval { lo: self.lo.floor_bits(bits), hi: self.hi.ceil_bits(bits) }
    }

    /// Exact integer power (correct for intervals straddling zero).
    pub fn pow_u32(&self, n: u32) -> Interval {
        if n == 0 {
            return Interval::one();
        }
        let p = |d: &Dyadic| dyadic_pow(d, n);
        if n % 2 == 1 || !self.lo.is_negative() {
            Interval { lo: p(&self.lo), hi: p(&self.hi) }
        } else if !self.hi.is_positive() {
            Interval { lo: p(&self.hi), hi: p(&self.lo) }
        } else {
            let m = if self.lo.abs() > self.hi { self.lo.abs() } else { self.hi.clone() };
            Interval { lo: Dyadic::zero(), hi: p(&m) }
        }
    }

    /// Natural logarithm; the enclosure exceeds the exact range by at most
    /// `2^-prec` in total.
    pub fn log(&self, prec: i64) -> Result<Interval, Error> {
        if !self.lo.is_positive() {
            return Err(Error::Domain(format!("log of interval with lo = {}", self.lo)));
        }
        if self.is_point() {
            let (lo, hi) = ln_bounds(&self.lo, prec)?;
            return Ok(Interval { lo, hi });
        }
        let lo = ln_bounds(&self.lo, prec)?.0;
        let hi = ln_bounds(&self.hi, prec)?.1;
        Ok(Interval { lo, hi })
    }

    /// `x^nu` for rational `nu`.
    ///
    /// Integer exponents use exact repeated multiplication (a reciprocal is
    /// taken at `prec` bits for negative exponents). For `nu = p/q` the
    /// endpoints are `q`-th roots of `x^p`, rounded outward in integer
    /// arithmetic to `prec` fractional bits.
    pub fn pow(&self, nu: &Rational, prec: i64) -> Result<Interval, Error> {
        if nu.is_integer() {
            let n = nu.to_integer();
            let k = n.abs().to_u32().ok_or_else(|| Error::Domain(String::from("exponent too large")))?;
            let p = self.pow_u32(k);
            return if n.is_negative() { p.recip(prec) } else { Ok(p) };
        }
        if !self.lo.is_positive() {
            return Err(Error::Domain(format!("non-integer power of interval with lo = {}", self.lo)));
        }
        let p = nu.numer().abs().to_u32().ok_or_else(|| Error::Domain(String::from("exponent too large")))?;
        let q = nu.denom().to_u32().ok_or_else(|| Error::Domain(String::from("exponent too large")))?;
        if nu.is_positive() {
            let lo = root_floor(&dyadic_pow(&self.lo, p), q, prec);
            let hi = root_ceil(&dyadic_pow(&self.hi, p), q, prec);
            Ok(Interval { lo, hi })
        } else {
            // 1 / x^{|nu|}: compute the root finely enough that its reciprocal
            // is still good to `prec` bits.
            let base_lo = dyadic_pow(&self.lo, p);
            let m = base_lo.magnitude().unwrap_or(0).min(0);
            let rp = prec + 2 * (-m) / q as i64 + 8;
            let r = Interval {
                lo: root_floor(&base_lo, q, rp),
                hi: root_ceil(&dyadic_pow(&self.hi, p), q, rp),
            };
            if !r.lo.is_positive() {
                return Err(Error::Domain(String::from("root underflow")));
            }
            r.recip(prec)
        }
    }
}

fn dyadic_pow(d: &Dyadic, n: u32) -> Dyadic {
    Dyadic::new(num_traits::pow(d.mantissa().clone(), n as usize), d.exponent() * n as i64)
}

/// `(floor(x^(1/q) * 2^prec), exact)` for a positive dyadic `x`.
fn root_scaled(x: &Dyadic, q: u32, prec: i64) -> (BigInt, bool) {
    let t = x.exponent() + q as i64 * prec;
    let (n, exact_shift) = if t >= 0 {
        (x.mantissa() << t as u64, true)
    } else {
        let sh = (-t) as u64;
        let n = x.mantissa() >> sh;
        let back: BigInt = &n << sh;
        (n, &back == x.mantissa())
    };
    let r = n.nth_root(q);
    let exact = exact_shift && num_traits::pow(r.clone(), q as usize) == n;
    (r, exact)
}

fn root_floor(x: &Dyadic, q: u32, prec: i64) -> Dyadic {
    Dyadic::new(root_scaled(x, q, prec).0, -prec)
}

fn root_ceil(x: &Dyadic, q: u32, prec: i64) -> Dyadic {
    let (r, exact) = root_scaled(x, q, prec);
    Dyadic::new(if exact { r } else { r + 1u32 }, -prec)
}

/// floor(ln 2 * 2^256)
const LN2_256: &str = "80260960185991308862233904206310070533990667611589946606122867505419956976171";

/// Bounds `(lo, hi)` on `ln 2 * 2^wp` as integers.
fn ln2_scaled(wp: u64) -> (BigInt, BigInt) {
    if wp <= 256 {
        let c = BigInt::from_str(LN2_256).unwrap() >> (256 - wp);
        let c1 = &c + 1u32;
        (c, c1)
    } else {
        let (lo, hi) = atanh_scaled(&BigInt::one(), &BigInt::from(3u32), wp);
        (lo * 2u32, hi * 2u32)
    }
}

/// Bounds on `atanh(a/b) * 2^wp` for `0 <= a/b <= 1/3`, via the odd power
/// series with its tail bounded by a geometric series of ratio 1/9.
fn atanh_scaled(a: &BigInt, b: &BigInt, wp: u64) -> (BigInt, BigInt) {
    use num_integer::Integer;
    if a.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let a2 = a * a;
    let b2 = b * b;
    let one = BigInt::one() << wp;
    let mut plo = (&one * a).div_floor(b);
    let mut phi = -((-(&one * a)).div_floor(b));
    let mut slo = BigInt::zero();
    let mut shi = BigInt::zero();
    let mut k = 1u32;
    loop {
        slo += plo.div_floor(&BigInt::from(k));
        shi += -((-&phi).div_floor(&BigInt::from(k)));
        plo = (&plo * &a2).div_floor(&b2);
        phi = -((-(&phi * &a2)).div_floor(&b2));
        k += 2;
        if phi <= BigInt::one() {
            // remaining sum <= phi * 9/8 / k < 2
            shi += 2u32;
            break;
        }
    }
    (slo, shi)
}

/// Outward bounds on `ln d` for a positive dyadic, on the grid `2^-(prec+2)`.
fn ln_bounds(d: &Dyadic, prec: i64) -> Result<(Dyadic, Dyadic), Error> {
    if d.is_one_value() {
        return Ok((Dyadic::zero(), Dyadic::zero()));
    }
    // d = r * 2^e with r = mant / 2^k in [1/2, 1)
    let k = d.mantissa().bits();
    let e = d.exponent() + k as i64;
    let ebits = 64 - e.unsigned_abs().leading_zeros() as i64;
    let base = (prec + 2).max(8);
    let wp = (base + ebits + 16 + (64 - (base as u64).leading_zeros() as i64)) as u64;
    let m = d.mantissa();
    let pk = BigInt::one() << k;
    // z = (r - 1)/(r + 1) = -(2^k - m)/(2^k + m); ln r = -2 atanh(|z|)
    let (slo, shi) = atanh_scaled(&(&pk - m), &(&pk + m), wp);
    let (llo, lhi) = ln2_scaled(wp);
    let eb = BigInt::from(e);
    let (elo, ehi) = if e >= 0 { (&eb * &llo, &eb * &lhi) } else { (&eb * &lhi, &eb * &llo) };
    let lo = -(shi * 2u32) + elo;
    let hi = -(slo * 2u32) + ehi;
    let g = prec + 2;
    Ok((Dyadic::new(lo, -(wp as i64)).floor_to(g), Dyadic::new(hi, -(wp as i64)).ceil_to(g)))
}

impl Dyadic {
    fn is_one_value(&self) -> bool {
        self.exponent() == 0 && self.mantissa().is_one()
    }
}

/// `a + b`.
pub fn iv_add(a: &Interval, b: &Interval) -> Interval {
    a.add(b)
}

/// `a * b`.
pub fn iv_mul(a: &Interval, b: &Interval) -> Interval {
    a.mul(b)
}

/// `a / b` rounded outward to `prec` fractional bits.
pub fn iv_div(a: &Interval, b: &Interval, prec: i64) -> Result<Interval, Error> {
    a.div(b, prec)
}

/// `ln a`.
pub fn iv_log(a: &Interval, prec: i64) -> Result<Interval, Error> {
    a.log(prec)
}

/// `a^nu`.
pub fn iv_pow(a: &Interval, nu: &Rational, prec: i64) -> Result<Interval, Error> {
    a.pow(nu, prec)
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("interval: {s}"));
        let body = s.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
        let (a, b) = body.split_once(',').ok_or_else(bad)?;
        Interval::try_new(a.parse()?, b.parse()?).ok_or_else(bad)
    }
}
