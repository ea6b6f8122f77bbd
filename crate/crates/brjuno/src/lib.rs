//! Std companion to `brjuno-core`: JSON configuration, line-oriented digit
//! and oracle sources, the command-line front end, and the Wilton divisor
//! series demo.

pub mod cli;
pub mod config;
pub mod source;
pub mod wilton;

use brjuno_core::{Dyadic, Error};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 2,
        Error::OracleNotMonotone { .. } => 4,
        Error::SearchBudgetExceeded(_) => 5,
        _ => 3,
    }
}

/// `d` as a decimal with `digits` fractional digits, rounded down (`up =
/// false`) or up, so printed bounds stay valid.
pub fn decimal(d: &Dyadic, digits: u32, up: bool) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let num = d.mantissa() * &scale;
    let e = d.exponent();
    let v = if e >= 0 {
        num << e as usize
    } else {
        let den = BigInt::from(1) << (-e) as usize;
        if up {
            num.div_ceil(&den)
        } else {
            num.div_floor(&den)
        }
    };
    let neg = v.is_negative();
    let s = v.abs().to_string();
    let s = format!("{s:0>width$}", width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_round_outward() {
        let third = Dyadic::from_rational_floor(&brjuno_core::arith::rat(1, 3), 60);
        assert_eq!(decimal(&third, 5, false), "0.33333");
        assert_eq!(decimal(&third, 5, true), "0.33334");
        assert_eq!(decimal(&-&third, 3, false), "-0.334");
        assert_eq!(decimal(&Dyadic::from_i64(5), 2, false), "5.00");
    }
}
