//! Exact rational arithmetic helpers.
//!
//! Every probability in the crate is a [`Rat`] (arbitrary-precision rational,
//! always in lowest terms). No floating-point value participates in any
//! verdict; decimals only appear as *display* approximations next to the
//! authoritative fraction.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// Exact rational number; numerator/denominator are arbitrary precision and
/// kept in lowest terms by construction.
pub type Rat = BigRational;

/// Builds a rational from two machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The rational zero.
pub fn zero() -> Rat {
    BigRational::zero()
}

/// The rational one.
pub fn one() -> Rat {
    BigRational::one()
}

/// Parses a probability literal: `INT "/" INT`, a decimal such as `0.68`
/// (converted exactly, here to 17/25), or a plain integer.
pub fn parse_prob(text: &str) -> Option<Rat> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let int_part: BigInt = if int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part.parse().ok()?
        };
        let digits: BigInt = frac_part.parse().ok()?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        return Some(
            BigRational::from_integer(int_part) + BigRational::new(digits, scale),
        );
    }
    let n: BigInt = text.parse().ok()?;
    Some(BigRational::from_integer(n))
}

/// Renders a rational as an exact fraction, e.g. `17/25` or `1`.
pub fn fmt_exact(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders a rational as `fraction (~decimal)`; the fraction is authoritative,
/// the decimal is a six-digit approximation for human readers only.
pub fn fmt_approx(r: &Rat) -> String {
    if r.denom().is_one() {
        return r.numer().to_string();
    }
    // Fixed-point long division so the display path never touches floats.
    let scaled = (r * BigRational::from_integer(BigInt::from(1_000_000))).trunc();
    let raw = scaled.numer().abs().to_string();
    let padded = format!("{raw:0>7}");
    let (int_digits, frac_digits) = padded.split_at(padded.len() - 6);
    let sign = if r.is_negative() { "-" } else { "" };
    format!(
        "{} (~{sign}{}.{})",
        fmt_exact(r),
        int_digits,
        frac_digits.trim_end_matches('0'),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_prob("0.68").unwrap(), rat(17, 25));
        assert_eq!(parse_prob("0.5").unwrap(), rat(1, 2));
        assert_eq!(parse_prob("1").unwrap(), rat(1, 1));
        assert_eq!(parse_prob("3/10").unwrap(), rat(3, 10));
        assert_eq!(parse_prob(".25").unwrap(), rat(1, 4));
    }

    #[test]
    fn rejects_malformed_literals() {
        assert!(parse_prob("1/0").is_none());
        assert!(parse_prob("0.").is_none());
        assert!(parse_prob("x").is_none());
        assert!(parse_prob("0.5e1").is_none());
    }

    #[test]
    fn display_forms() {
        assert_eq!(fmt_exact(&rat(17, 25)), "17/25");
        assert_eq!(fmt_exact(&rat(2, 1)), "2");
        assert_eq!(fmt_approx(&rat(17, 25)), "17/25 (~0.68)");
        assert_eq!(fmt_approx(&rat(1, 3)), "1/3 (~0.333333)");
    }
}
