//! Exact rational literals: decimal and fraction parsing, and their printing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn ratio(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"17/20"`, `"0.85"`, `".5"` or `"1"` without any floating-point step.
pub fn parse_rational(text: &str) -> Option<Rational> {
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_digits(n)?;
        let d = parse_digits(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (whole, frac) = match text.split_once('.') {
        Some((w, f)) => (w, f),
        None => (text, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    let whole = if whole.is_empty() {
        BigInt::zero()
    } else {
        parse_digits(whole)?
    };
    if frac.is_empty() {
        if text.ends_with('.') {
            return None;
        }
        return Some(BigRational::from_integer(whole));
    }
    let frac_digits = parse_digits(frac)?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(whole * &scale + frac_digits, scale))
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical text for a rational: a terminating decimal when the reduced
/// denominator is of the form 2^a 5^b, otherwise `n/d`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    let scaled = r * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let sign = if r.is_negative() { "-" } else { "" };
    format!("{sign}{int_part}.{frac_part}")
}

/// Fixed six-place decimal rendering, rounded half away from zero.
/// Display only; never fed back into the semantics.
pub fn decimal6(r: &Rational) -> String {
    let scale = BigRational::from_integer(BigInt::from(1_000_000));
    let scaled = (r * scale).round().to_integer();
    let negative = scaled.is_negative();
    let digits = format!("{:0>7}", scaled.abs());
    let (i, f) = digits.split_at(digits.len() - 6);
    format!("{}{i}.{f}", if negative { "-" } else { "" })
}
