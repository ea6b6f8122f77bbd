//! Independent fixed-point reference values. Nothing here calls into the
//! library's arithmetic; results are integers scaled by `2^BITS`.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub const BITS: u32 = 256;

pub fn one() -> BigInt {
    BigInt::one() << BITS
}

pub fn from_int(n: i64) -> BigInt {
    BigInt::from(n) << BITS
}

pub fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> BITS
}

pub fn div(a: &BigInt, b: &BigInt) -> BigInt {
    (a << BITS) / b
}

pub fn frac(p: i64, q: i64) -> BigInt {
    (BigInt::from(p) << BITS) / BigInt::from(q)
}

pub fn sqrt(a: &BigInt) -> BigInt {
    (a << BITS).sqrt()
}

/// `1/φ` for the Gauss map: `(√5 - 1)/2`.
pub fn golden() -> BigInt {
    (sqrt(&from_int(5)) - one()) >> 1
}

fn atanh(z: &BigInt) -> BigInt {
    let z2 = mul(z, z);
    let mut pow = z.clone();
    let mut sum = BigInt::zero();
    let mut k = 1i64;
    while !pow.is_zero() {
        sum += &pow / k;
        pow = mul(&pow, &z2);
        k += 2;
    }
    sum
}

pub fn ln2() -> BigInt {
    atanh(&frac(1, 3)) << 1
}

/// Natural log of a positive fixed-point number.
pub fn ln(x: &BigInt) -> BigInt {
    assert!(x.is_positive());
    let mut m = x.clone();
    let mut k = 0i64;
    let two = one() << 1;
    while m >= two {
        m >>= 1;
        k += 1;
    }
    while m < one() {
        m <<= 1;
        k -= 1;
    }
    let z = div(&(&m - one()), &(&m + one()));
    (atanh(&z) << 1) + ln2() * k
}

/// `e = Σ 1/k!`
pub fn e() -> BigInt {
    let mut term = one();
    let mut sum = BigInt::zero();
    let mut k = 1i64;
    while !term.is_zero() {
        sum += &term;
        term /= k;
        k += 1;
    }
    sum
}

#[derive(Clone, Copy)]
pub enum Weight {
    LogPow(u32),
    Inverse,
}

pub fn weight(w: Weight, x: &BigInt) -> BigInt {
    match w {
        Weight::LogPow(p) => {
            let l = -ln(x);
            let mut r = one();
            for _ in 0..p {
                r = mul(&r, &l);
            }
            r
        }
        Weight::Inverse => div(&one(), x),
    }
}

/// `Σ s(i) (η_0⋯η_{i-1})^ν u(η_i)` for the Gauss map at `[head, 1, 1, ...]`,
/// summed term by term until the terms drop below `2^-(BITS-16)`.
pub fn brute_phi(head: &[u64], w: Weight, nu: u32, alternating: bool) -> BigInt {
    let g = golden();
    // η_i for i = 1..=n by the backward recursion η_i = 1/(a_i + η_{i+1})
    let n = head.len();
    let mut etas = vec![BigInt::zero(); n + 1];
    let mut next = g.clone();
    for i in (0..n).rev() {
        next = div(&one(), &(from_int(head[i] as i64) + &next));
        etas[i] = next.clone();
    }
    let eta = |i: usize| -> BigInt { if i < n { etas[i].clone() } else { g.clone() } };
    let cutoff = BigInt::one() << 16;
    let mut product = one();
    let mut sum = BigInt::zero();
    let mut i = 0usize;
    loop {
        let e = eta(i);
        let mut term = weight(w, &e);
        for _ in 0..nu {
            term = mul(&term, &product);
        }
        let sign = if alternating && i % 2 == 1 { -1 } else { 1 };
        sum += &term * sign;
        product = mul(&product, &e);
        i += 1;
        if i > n && term.abs() < cutoff {
            break sum;
        }
    }
}

/// Distance between a fixed-point value and a dyadic `m·2^e`, as `f64` bits
/// of agreement: returns `log2 |a - d|` (very negative when they agree).
pub fn log2_distance(a: &BigInt, mant: &BigInt, exp: i64) -> f64 {
    // bring both to the scale 2^-BITS
    let shift = exp + BITS as i64;
    let d = if shift >= 0 { mant << shift as u32 } else { mant >> (-shift) as u32 };
    let diff = (a - d).abs();
    if diff.is_zero() {
        return -(BITS as f64);
    }
    diff.bits() as f64 - BITS as f64
}
