//! Points of Λ as digit sequences: words, streams, cylinders and the
//! eventually periodic points that can be evaluated exactly.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};

use crate::arith::{Dyadic, Interval, Rational};
use crate::map::{MapModel, Mobius};
use crate::Error;

/// Finite word of branch indices, each at least 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitWord(Vec<u64>);

impl DigitWord {
    pub fn new(digits: Vec<u64>) -> Result<DigitWord, Error> {
        if let Some(&d) = digits.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidDigit(d));
        }
        Ok(DigitWord(digits))
    }

    pub fn empty() -> DigitWord {
        DigitWord(Vec::new())
    }

    pub fn ones(n: usize) -> DigitWord {
        DigitWord(alloc::vec![1; n])
    }

    pub fn digits(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, d: u64) -> Result<(), Error> {
        if d == 0 {
            return Err(Error::InvalidDigit(d));
        }
        self.0.push(d);
        Ok(())
    }

    pub fn concat(&self, other: &DigitWord) -> DigitWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        DigitWord(v)
    }

    pub fn with_ones(&self, n: usize) -> DigitWord {
        self.concat(&DigitWord::ones(n))
    }

    pub fn starts_with(&self, prefix: &DigitWord) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// Drop trailing ones; `[w, 1, 1, ...]` is the same point for any count.
    pub fn trim_ones(&self) -> DigitWord {
        let mut v = self.0.clone();
        while v.last() == Some(&1) {
            v.pop();
        }
        DigitWord(v)
    }

    pub fn suffix(&self, from: usize) -> DigitWord {
        DigitWord(self.0[from.min(self.0.len())..].to_vec())
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for DigitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<DigitWord, Error> {
        let bad = || Error::Parse(format!("digit word: {s}"));
        let inner = s.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
        if inner.trim().is_empty() {
            return Ok(DigitWord::empty());
        }
        let v = inner
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        DigitWord::new(v)
    }
}

/// Pull-based supplier of digits. `digit(k)` must return the same value for
/// the same `k` on every call; `None` means the supplier has run dry.
pub trait DigitSource: Send + Sync {
    fn digit(&self, index: u64) -> Option<u64>;
}

impl<F> DigitSource for F
where
    F: Fn(u64) -> Option<u64> + Send + Sync,
{
    fn digit(&self, index: u64) -> Option<u64> {
        self(index)
    }
}

#[derive(Clone)]
pub enum Tail {
    AllOnes,
    Periodic(DigitWord),
    /// Digits `source.digit(offset)`, `source.digit(offset + 1)`, ...
    Generator { source: Arc<dyn DigitSource>, offset: u64 },
}

impl fmt::Debug for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::AllOnes => f.write_str("AllOnes"),
            Tail::Periodic(w) => write!(f, "Periodic({w})"),
            Tail::Generator { offset, .. } => write!(f, "Generator(+{offset})"),
        }
    }
}

/// `x = [head, tail...]`, digits indexed from 1.
#[derive(Clone, Debug)]
pub struct DigitStream {
    head: DigitWord,
    tail: Tail,
}

impl DigitStream {
    pub fn new(head: DigitWord, tail: Tail) -> Result<DigitStream, Error> {
        if let Tail::Periodic(w) = &tail {
            if w.is_empty() {
                return Err(Error::Parse("empty period".into()));
            }
        }
        Ok(DigitStream { head, tail })
    }

    pub fn eventually_ones(head: DigitWord) -> DigitStream {
        DigitStream { head, tail: Tail::AllOnes }
    }

    pub fn generator(head: DigitWord, source: Arc<dyn DigitSource>) -> DigitStream {
        DigitStream { head, tail: Tail::Generator { source, offset: 0 } }
    }

    pub fn head(&self) -> &DigitWord {
        &self.head
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_eventually_periodic(&self) -> bool {
        !matches!(self.tail, Tail::Generator { .. })
    }

    /// Digit `a_pos`, `pos >= 1`.
    pub fn digit(&self, pos: u64) -> Result<u64, Error> {
        if pos == 0 {
            return Err(Error::Domain("digit positions start at 1".into()));
        }
        let h = self.head.len() as u64;
        if pos <= h {
            return Ok(self.head.0[(pos - 1) as usize]);
        }
        let k = pos - h - 1;
        match &self.tail {
            Tail::AllOnes => Ok(1),
            Tail::Periodic(w) => Ok(w.0[(k % w.len() as u64) as usize]),
            Tail::Generator { source, offset } => match source.digit(offset + k) {
                Some(0) => Err(Error::InvalidDigit(0)),
                Some(d) => Ok(d),
                None => Err(Error::InsufficientDigits { needed: pos, available: pos - 1 }),
            },
        }
    }

    /// The first `n` digits.
    pub fn prefix(&self, n: usize) -> Result<DigitWord, Error> {
        (1..=n as u64).map(|p| self.digit(p)).collect::<Result<Vec<_>, _>>().map(DigitWord)
    }

    /// Longest available prefix of length at most `n`, for generator tails
    /// that may run dry.
    pub fn available_prefix(&self, n: usize) -> Result<DigitWord, Error> {
        let mut v = Vec::with_capacity(n);
        for p in 1..=n as u64 {
            match self.digit(p) {
                Ok(d) => v.push(d),
                Err(Error::InsufficientDigits { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        Ok(DigitWord(v))
    }

    /// `η_j`: drop the first `j - 1` digits; `shift(1)` is the identity.
    pub fn shift(&self, j: u64) -> DigitStream {
        let drop = j.saturating_sub(1);
        let h = self.head.len() as u64;
        if drop <= h {
            return DigitStream { head: self.head.suffix(drop as usize), tail: self.tail.clone() };
        }
        let k = drop - h;
        let tail = match &self.tail {
            Tail::AllOnes => Tail::AllOnes,
            Tail::Periodic(w) => {
                let r = (k % w.len() as u64) as usize;
                let mut v = w.0[r..].to_vec();
                v.extend_from_slice(&w.0[..r]);
                Tail::Periodic(DigitWord(v))
            }
            Tail::Generator { source, offset } => Tail::Generator { source: source.clone(), offset: offset + k },
        };
        DigitStream { head: DigitWord::empty(), tail }
    }
}

impl fmt::Display for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "head={};tail=", self.head)?;
        match &self.tail {
            Tail::AllOnes => f.write_str("ones"),
            Tail::Periodic(w) => write!(f, "periodic:{w}"),
            Tail::Generator { .. } => f.write_str("generator"),
        }
    }
}

impl FromStr for DigitStream {
    type Err = Error;

    /// `head=[a1,...];tail=ones` or `head=[...];tail=periodic:[b1,...]`.
    fn from_str(s: &str) -> Result<DigitStream, Error> {
        let bad = || Error::Parse(format!("digit stream: {s}"));
        let (h, t) = s.trim().split_once(';').ok_or_else(bad)?;
        let head: DigitWord = h.trim().strip_prefix("head=").ok_or_else(bad)?.parse()?;
        let t = t.trim().strip_prefix("tail=").ok_or_else(bad)?.trim();
        let tail = if t == "ones" {
            Tail::AllOnes
        } else if let Some(w) = t.strip_prefix("periodic:") {
            Tail::Periodic(w.parse()?)
        } else {
            return Err(bad());
        };
        DigitStream::new(head, tail)
    }
}

/// Composition `G_{a_1}^{-1} ∘ ⋯ ∘ G_{a_n}^{-1}`.
pub fn word_mobius(map: &MapModel, word: &[u64]) -> Result<Mobius, Error> {
    let mut m = Mobius::identity();
    for &d in word {
        m = m.compose(&map.inverse_mobius(d)?);
    }
    Ok(m)
}

/// Closure of the cylinder of `word`, with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderInterval {
    pub word: DigitWord,
    pub lo_exact: Rational,
    pub hi_exact: Rational,
    pub enclosure: Interval,
}

impl CylinderInterval {
    pub fn width_exact(&self) -> Rational {
        &self.hi_exact - &self.lo_exact
    }
}

pub fn cylinder_enclosure(map: &MapModel, word: &DigitWord, prec: i64) -> Result<CylinderInterval, Error> {
    let m = word_mobius(map, &word.0)?;
    let a = m.eval_rational(map.s0()).ok_or(Error::Domain("pole in cylinder".into()))?;
    let b = m.eval_rational(map.s1()).ok_or(Error::Domain("pole in cylinder".into()))?;
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let enclosure = Interval::new(Dyadic::from_rational_floor(&lo, prec), Dyadic::from_rational_ceil(&hi, prec));
    Ok(CylinderInterval { word: word.clone(), lo_exact: lo, hi_exact: hi, enclosure })
}

fn isqrt_floor(n: &BigInt) -> BigInt {
    n.sqrt()
}

/// Fixed point of a contracting Möbius map `h` of `[s0, s1]` into itself,
/// enclosed with width at most `2^-prec` and validated by `h(X) ⊆ X`.
fn mobius_fixed_point(map: &MapModel, h: &Mobius, prec: i64) -> Result<Interval, Error> {
    let prec = prec.max(4);
    let w = prec + 8;
    let scale = Dyadic::pow2(-w);
    // c y^2 + (d - a) y - b = 0
    let (lo, hi) = if h.c.is_zero() {
        let den = &h.d - &h.a;
        if den.is_zero() {
            return Err(Error::NoContraction);
        }
        let q = Rational::new(h.b.clone(), den);
        (Dyadic::from_rational_floor(&q, w), Dyadic::from_rational_ceil(&q, w))
    } else {
        let disc = (&h.d - &h.a) * (&h.d - &h.a) + BigInt::from(4) * &h.b * &h.c;
        if disc.sign() == Sign::Minus {
            return Err(Error::NoContraction);
        }
        let scaled = &disc << (2 * w as usize);
        let r_lo = isqrt_floor(&scaled);
        let r_hi = if &r_lo * &r_lo == scaled { r_lo.clone() } else { &r_lo + 1 };
        let base = (&h.a - &h.d) << (w as usize);
        let two_c = Dyadic::from_int(&h.c * 2);
        let mut best = None;
        for sgn in [1i32, -1] {
            let (n1, n2) = if sgn == 1 { (&base + &r_lo, &base + &r_hi) } else { (&base - &r_hi, &base - &r_lo) };
            let n1 = &Dyadic::from_int(n1) * &scale;
            let n2 = &Dyadic::from_int(n2) * &scale;
            let (a, b) = if h.c.is_positive() {
                (Dyadic::div_floor(&n1, &two_c, w), Dyadic::div_ceil(&n2, &two_c, w))
            } else {
                (Dyadic::div_floor(&n2, &two_c, w), Dyadic::div_ceil(&n1, &two_c, w))
            };
            let mid = (&a + &b).to_rational() / Rational::from_integer(BigInt::from(2));
            if &mid >= map.s0() && &mid <= map.s1() {
                best = Some((a, b));
                break;
            }
        }
        best.ok_or(Error::NoContraction)?
    };
    let r = Dyadic::pow2(-(prec + 4));
    let x = Interval::new(&lo - &r, &hi + &r);
    let image = h.eval_interval(&x, (w + 16) as u64);
    if !x.strictly_encloses(&image) {
        return Err(Error::NoContraction);
    }
    Ok(image.intersect(&x).unwrap_or(image).round_out(prec + 2))
}

/// Enclosure of `φ = [1, 1, 1, ...]`, the fixed point of `G_1`.
pub fn fixed_point_phi(map: &MapModel, prec: i64) -> Result<Interval, Error> {
    let h = map.inverse_mobius(1)?;
    if h.is_increasing() {
        return Err(Error::NoContraction);
    }
    mobius_fixed_point(map, &h, prec)
}

/// Enclosure of the purely periodic point `[w, w, w, ...]`.
pub fn periodic_point(map: &MapModel, period: &DigitWord, prec: i64) -> Result<Interval, Error> {
    if period.is_empty() {
        return Err(Error::Domain("empty period".into()));
    }
    mobius_fixed_point(map, &word_mobius(map, &period.0)?, prec)
}

/// Enclosure of width at most `2^-prec` of an eventually periodic point.
pub fn eval_point(map: &MapModel, x: &DigitStream, prec: i64) -> Result<Interval, Error> {
    let period = match &x.tail {
        Tail::AllOnes => DigitWord::ones(1),
        Tail::Periodic(w) => w.clone(),
        Tail::Generator { .. } => {
            return Err(Error::Unsupported("eval_point needs an eventually periodic stream".into()))
        }
    };
    let m = word_mobius(map, &x.head.0)?;
    let target = Dyadic::pow2(-prec);
    let mut wp = prec + 8;
    loop {
        let t = periodic_point(map, &period, wp)?;
        let v = m.eval_interval(&t, (wp + 8).max(8) as u64);
        let v = match map.domain_enclosure(wp + 8).intersect(&v) {
            Some(v) => v,
            None => v,
        };
        if v.width() <= target {
            return Ok(v);
        }
        if wp > prec + 4096 {
            return Err(Error::SearchBudgetExceeded("eval_point precision".into()));
        }
        wp += 32 + (wp - prec);
    }
}

/// Position `L` such that changing any digit after position `L` moves the
/// point by less than `ε`: `L = κ M` with `(s1 - s0) < ε τ^M`.
pub fn perturbation_bound(map: &MapModel, epsilon: &Dyadic) -> Result<u64, Error> {
    if !epsilon.is_positive() {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let span = map.span();
    let eps = epsilon.to_rational();
    if eps >= span {
        return Ok(0);
    }
    let tau = map.tau()?.clone();
    if tau <= Rational::from_integer(1.into()) {
        return Err(Error::Domain("tau must exceed 1".into()));
    }
    let mut m = 0u64;
    let mut scaled = eps;
    while scaled <= span {
        scaled *= &tau;
        m += 1;
    }
    Ok(map.kappa() as u64 * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use alloc::string::ToString;

    fn gauss() -> MapModel {
        MapModel::gauss()
    }

    #[test]
    fn gauss_cylinders() {
        let g = gauss();
        let c = cylinder_enclosure(&g, &DigitWord::empty(), 20).unwrap();
        assert_eq!((c.lo_exact, c.hi_exact), (rat(0, 1), rat(1, 1)));
        let c = cylinder_enclosure(&g, &"[1]".parse().unwrap(), 20).unwrap();
        assert_eq!((c.lo_exact, c.hi_exact), (rat(1, 2), rat(1, 1)));
        let c = cylinder_enclosure(&g, &"[2,1]".parse().unwrap(), 20).unwrap();
        assert_eq!((c.lo_exact, c.hi_exact), (rat(1, 3), rat(2, 5)));
    }

    #[test]
    fn phi_enclosures() {
        let g = gauss();
        let p30 = fixed_point_phi(&g, 30).unwrap();
        let p60 = fixed_point_phi(&g, 60).unwrap();
        assert!(p30.width() <= Dyadic::pow2(-30));
        assert!(p30.encloses(&p60));
        assert!((p60.lo().to_f64_lossy() - 0.6180339887498949).abs() < 1e-15);
        let a = MapModel::alpha_cf(rat(1, 2), None).unwrap();
        let psi = fixed_point_phi(&a, 50).unwrap();
        assert!((psi.lo().to_f64_lossy() - (2f64.sqrt() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn eval_point_examples() {
        let g = gauss();
        let x: DigitStream = "head=[2];tail=ones".parse().unwrap();
        let v = eval_point(&g, &x, 40).unwrap();
        assert!((v.lo().to_f64_lossy() - 0.3819660112501051).abs() < 1e-11);
        assert!(v.width() <= Dyadic::pow2(-40));
        let x: DigitStream = "head=[];tail=periodic:[2]".parse().unwrap();
        let v = eval_point(&g, &x, 40).unwrap();
        assert!((v.lo().to_f64_lossy() - (2f64.sqrt() - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn shift_and_syntax() {
        let x: DigitStream = "head=[3,1,4];tail=periodic:[5,9]".parse().unwrap();
        assert_eq!(x.shift(1).to_string(), "head=[3,1,4];tail=periodic:[5,9]");
        assert_eq!(x.shift(2).to_string(), "head=[1,4];tail=periodic:[5,9]");
        assert_eq!(x.shift(5).to_string(), "head=[];tail=periodic:[9,5]");
        let ones = DigitStream::eventually_ones(DigitWord::empty());
        assert_eq!(ones.shift(7).to_string(), "head=[];tail=ones");
        assert!("head=[0];tail=ones".parse::<DigitStream>().is_err());
        assert!("head=[1];tail=zeros".parse::<DigitStream>().is_err());
    }

    #[test]
    fn perturbation_formula() {
        let g = gauss();
        assert_eq!(perturbation_bound(&g, &Dyadic::pow2(-10)).unwrap(), 36);
        assert_eq!(perturbation_bound(&g, &Dyadic::one()).unwrap(), 0);
    }
}
