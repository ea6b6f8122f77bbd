use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{Dyadic, Interval, Rational};

/// `y ↦ (a·y + b) / (c·y + d)` with integer coefficients.
///
/// Every inverse branch of the built-in maps has this form, and so does any
/// finite composition of them, which is what makes cylinder endpoints exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mobius {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Mobius {
        Mobius { a, b, c, d }
    }

    pub fn identity() -> Mobius {
        Mobius::new(BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one())
    }

    /// Scale rational coefficients to a common integer representative.
    pub fn from_rationals(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Mobius {
        use num_integer::Integer;
        let l = a.denom().lcm(b.denom()).lcm(&c.denom().lcm(d.denom()));
        let s = |q: &Rational| q.numer() * (&l / q.denom());
        Mobius::new(s(a), s(b), s(c), s(d))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Mobius) -> Mobius {
        Mobius::new(
            &self.a * &inner.a + &self.b * &inner.c,
            &self.a * &inner.b + &self.b * &inner.d,
            &self.c * &inner.a + &self.d * &inner.c,
            &self.c * &inner.b + &self.d * &inner.d,
        )
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn inverse(&self) -> Mobius {
        Mobius::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn is_increasing(&self) -> bool {
        self.det().is_positive()
    }

    /// Denominator `c·y + d` at a rational point.
    pub fn denom_at(&self, y: &Rational) -> Rational {
        Rational::from_integer(self.c.clone()) * y + Rational::from_integer(self.d.clone())
    }

    pub fn eval_rational(&self, y: &Rational) -> Option<Rational> {
        let den = self.denom_at(y);
        if den.is_zero() {
            return None;
        }
        Some((Rational::from_integer(self.a.clone()) * y + Rational::from_integer(self.b.clone())) / den)
    }

    fn parts(&self, y: &Dyadic) -> (Dyadic, Dyadic) {
        let n = &(&Dyadic::from_int(self.a.clone()) * y) + &Dyadic::from_int(self.b.clone());
        let d = &(&Dyadic::from_int(self.c.clone()) * y) + &Dyadic::from_int(self.d.clone());
        (n, d)
    }

    /// Enclosure of the value at a dyadic point with `bits` significant bits
    /// (relative rounding, so tiny images keep their accuracy).
    pub fn eval_dyadic(&self, y: &Dyadic, bits: u64) -> Interval {
        let (n, d) = self.parts(y);
        assert!(!d.is_zero(), "mobius pole");
        if n.is_zero() {
            return Interval::zero();
        }
        let mag = n.magnitude().unwrap() - d.magnitude().unwrap();
        let prec = bits as i64 - mag + 1;
        Interval::new(Dyadic::div_floor(&n, &d, prec), Dyadic::div_ceil(&n, &d, prec))
    }

    /// Enclosure of the image of an interval that avoids the pole (the map
    /// is monotone there, so the endpoints suffice).
    pub fn eval_interval(&self, y: &Interval, bits: u64) -> Interval {
        let a = self.eval_dyadic(y.lo(), bits);
        if y.is_point() {
            return a;
        }
        let b = self.eval_dyadic(y.hi(), bits);
        a.hull(&b)
    }

    /// Whether the pole `-d/c` lies outside the closed interval `[s, t]`.
    pub fn pole_free_on(&self, s: &Rational, t: &Rational) -> bool {
        let ds = self.denom_at(s);
        let dt = self.denom_at(t);
        !ds.is_zero() && !dt.is_zero() && ds.is_positive() == dt.is_positive()
    }

    /// `inf |h'(y)|^{-1}` over `[s, t]`, i.e. the infimum of `|G'|` on the
    /// branch image: `min (c·y + d)^2 / |det|` at the endpoints.
    pub fn inverse_derivative_inf(&self, s: &Rational, t: &Rational) -> Rational {
        let ds = self.denom_at(s);
        let dt = self.denom_at(t);
        let m = if ds.abs() < dt.abs() { ds } else { dt };
        &m * &m / Rational::from_integer(self.det().abs())
    }

    /// `y · h(y)` at a dyadic point, enclosed with `bits` significant bits.
    pub fn y_times_eval(&self, y: &Dyadic, bits: u64) -> Interval {
        let (n, d) = self.parts(y);
        let n = &n * y;
        if n.is_zero() {
            return Interval::zero();
        }
        let mag = n.magnitude().unwrap() - d.magnitude().unwrap();
        let prec = bits as i64 - mag + 1;
        Interval::new(Dyadic::div_floor(&n, &d, prec), Dyadic::div_ceil(&n, &d, prec))
    }
}
