//! Partial sums `Σ_{n<=M} d(n)/n · trig(2π n x)` of the divisor series.
//! The trigonometric enclosures are local to this demo.

use brjuno_core::arith::rat;
use brjuno_core::{Dyadic, Error, Interval};
use num_bigint::BigInt;

/// `d(n)` for `n <= m` by a divisor sieve; index 0 is unused.
pub fn divisor_counts(m: usize) -> Vec<u32> {
    let mut d = vec![0u32; m + 1];
    for i in 1..=m {
        for j in (i..=m).step_by(i) {
            d[j] += 1;
        }
    }
    d
}

/// `d(n)` by trial division up to `√n`.
pub fn divisor_count_brute(n: u64) -> u32 {
    let mut c = 0;
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            c += if i * i == n { 1 } else { 2 };
        }
        i += 1;
    }
    c
}

/// `atan(1/k)` by its alternating series, remainder bounded by the first
/// omitted term.
fn atan_inv(k: i64, wp: i64) -> Interval {
    let mut sum = Interval::zero();
    let k2 = BigInt::from(k) * k;
    let mut pow = BigInt::from(k);
    let cutoff = Dyadic::pow2(-wp - 4);
    for j in 0i64.. {
        let term = Interval::from_rational(&brjuno_core::Rational::new(1.into(), pow.clone() * (2 * j + 1)), wp + 8);
        if term.hi() < &cutoff {
            return sum.add(&Interval::new(-term.hi(), term.hi().clone())).round_out(wp + 4);
        }
        sum = if j % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };
        pow *= &k2;
    }
    unreachable!()
}

/// `π = 16 atan(1/5) - 4 atan(1/239)`
pub fn pi_enclosure(wp: i64) -> Interval {
    atan_inv(5, wp + 6).scale2(4).sub(&atan_inv(239, wp + 6).scale2(2)).round_out(wp)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// Taylor series of cos or sin at `a`, `|a| <= 2`, with the tail bounded
/// by the first omitted term.
fn taylor(kind: Trig, a: &Interval, wp: i64) -> Interval {
    let a2 = a.mul(a).round_out(wp + 8);
    let (mut term, mut k) = match kind {
        Trig::Cos => (Interval::one(), 0i64),
        Trig::Sin => (a.clone(), 1i64),
    };
    let mut sum = Interval::zero();
    let mut sign = 1;
    let cutoff = Dyadic::pow2(-wp - 4);
    loop {
        let mag = term.lo().abs().max(term.hi().abs());
        if mag < cutoff {
            return sum.add(&Interval::new(-&mag, mag)).round_out(wp + 4);
        }
        sum = if sign > 0 { sum.add(&term) } else { sum.sub(&term) };
        let div = Interval::from_i64((k + 1) * (k + 2));
        term = term.mul(&a2).div(&div, wp + 8).expect("positive divisor");
        k += 2;
        sign = -sign;
    }
}

/// `trig(2π t)` for `t` within `radius` of the dyadic `mid`.
pub fn trig_2pi(kind: Trig, mid: &Dyadic, radius: &Dyadic, pi: &Interval, wp: i64) -> Interval {
    // shift to t in [-1/2, 1/2), then fold onto |t| <= 1/4
    let shift = (mid + &Dyadic::pow2(-1)).floor_int();
    let mut t = mid - &Dyadic::from_int(shift);
    let quarter = Dyadic::pow2(-2);
    let mut flip = false;
    if t.abs() > quarter {
        // cos(2πt) = -cos(2π(1/2 - |t|)), sin(2πt) = sign(t) sin(2π(1/2 - |t|))
        let half = Dyadic::pow2(-1);
        let folded = &half - &t.abs();
        match kind {
            Trig::Cos => flip = true,
            Trig::Sin => flip = t.is_negative(),
        }
        t = folded;
    } else if kind == Trig::Sin && t.is_negative() {
        flip = true;
        t = t.abs();
    }
    let a = pi.mul_dyadic(&t.shl(1));
    let mut v = taylor(kind, &a, wp);
    if flip {
        v = v.neg();
    }
    // |d/dt trig(2πt)| <= 2π < 8
    let slack = radius.shl(3);
    let v = Interval::new(v.lo() - &slack, v.hi() + &slack);
    v.intersect(&Interval::new(Dyadic::from_i64(-1), Dyadic::one())).unwrap_or(v)
}

/// Enclosure of `Σ_{n=1}^{m} d(n)/n · trig(2π n x)` for `x` in `x`.
pub fn wilton_sum(x: &Interval, kind: Trig, m: usize, prec: i64) -> Result<Interval, Error> {
    if m == 0 {
        return Err(Error::Domain("need at least one term".into()));
    }
    let bits = 64 - (m as u64).leading_zeros() as i64;
    let wp = prec + bits + 16;
    let pi = pi_enclosure(wp + 8);
    let d = divisor_counts(m);
    let mid = x.midpoint();
    let rad = (x.hi() - x.lo()).shl(-1) + Dyadic::pow2(-wp - 8);
    let mut sum = Interval::zero();
    for (n, &dn) in d.iter().enumerate().skip(1) {
        let nd = Dyadic::from_i64(n as i64);
        let t = trig_2pi(kind, &(&mid * &nd), &(&rad * &nd), &pi, wp);
        let c = Interval::from_rational(&rat(dn as i64, n as i64), wp + 8);
        sum = sum.add(&c.mul(&t)).round_out(wp);
    }
    Ok(sum.round_out(prec + 4))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn near(v: &Interval, want: f64, tol: f64) -> bool {
        (v.lo().to_f64_lossy() - want).abs() < tol && (v.hi().to_f64_lossy() - want).abs() < tol
    }

    #[test]
    fn sieve_small() {
        let d = divisor_counts(12);
        assert_eq!((d[1], d[6], d[12]), (1, 4, 6));
        assert_eq!(divisor_count_brute(36), 9);
    }

    #[test]
    fn trig_values() {
        let pi = pi_enclosure(80);
        assert!(near(&pi, std::f64::consts::PI, 1e-15));
        let z = Dyadic::zero();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (t, c, s) in [(0.125f64, r, r), (0.375, -r, r), (-0.3, -0.30901699437494734, -0.9510565162951536)] {
            let d = Dyadic::from_rational_floor(&rat((t * 1000.0).round() as i64, 1000), 90);
            assert!(near(&trig_2pi(Trig::Cos, &d, &z, &pi, 60), c, 1e-12), "cos {t}");
            assert!(near(&trig_2pi(Trig::Sin, &d, &z, &pi, 60), s, 1e-12), "sin {t}");
        }
    }

    #[test]
    fn single_term_is_cosine() {
        let x = Interval::from_rational(&rat(1, 3), 80);
        let v = wilton_sum(&x, Trig::Cos, 1, 40).unwrap();
        assert!(near(&v, -0.5, 1e-10));
    }
}
