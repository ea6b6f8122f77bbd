//! Dyadic numbers, rationals and outward-rounded interval arithmetic.
//!
//! All rounding happens in integer arithmetic. Transcendental operations take
//! an explicit target precision; `+`, `-` and `*` are exact.

mod dyadic;
mod interval;

pub use dyadic::Dyadic;
pub use interval::{iv_add, iv_div, iv_log, iv_mul, iv_pow, Interval};

/// Exact rationals, used for branch endpoints and structural constants.
pub type Rational = num_rational::BigRational;

/// Parse `p/q`, an integer, or a decimal into a rational.
pub fn parse_rational(s: &str) -> Result<Rational, crate::Error> {
    use core::str::FromStr;
    use num_bigint::BigInt;
    let s = s.trim();
    let bad = || crate::Error::Parse(alloc::format!("rational: {s}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if (ip.is_empty() && fp.is_empty()) || !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut digits = alloc::string::String::from(ip);
    digits.push_str(fp);
    let n = BigInt::from_str(&digits).map_err(|_| bad())?;
    let d = num_traits::pow(BigInt::from(10u32), fp.len());
    Ok(Rational::new(if neg { -n } else { n }, d))
}

/// Small integer as a rational.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}
