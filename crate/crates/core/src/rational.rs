//! Exact rational helpers shared by the prediction and statistics modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_u64(value: u64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Renders `q` with `sig` significant digits, rounding half to even.
/// Trailing zeros after the decimal point are dropped: `1/16` prints as
/// `0.0625`, `4/13` as `0.307692307692`.
pub fn to_decimal(q: &Rational, sig: u32) -> String {
    assert!(sig >= 1);
    if q.is_zero() {
        return "0".to_string();
    }
    let negative = q.is_negative();
    let a = q.abs();

    let ten = BigInt::from(10);
    let mut exp = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    // pin exp so that 10^exp <= a < 10^(exp+1)
    while a < pow10(exp) {
        exp -= 1;
    }
    while a >= pow10(exp + 1) {
        exp += 1;
    }

    let shift = sig as i64 - 1 - exp;
    let mut digits = round_half_even(&(a * pow10(shift)));
    if digits == ten.pow(sig) {
        digits /= &ten;
        exp += 1;
    }

    let digits = digits.to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    } else if exp as usize + 1 >= digits.len() {
        out.push_str(&digits);
        out.extend(std::iter::repeat_n('0', exp as usize + 1 - digits.len()));
    } else {
        let (int, frac) = digits.split_at(exp as usize + 1);
        out.push_str(int);
        out.push('.');
        out.push_str(frac);
    }
    if out.contains('.') {
        let trimmed = out.trim_end_matches('0').trim_end_matches('.').len();
        out.truncate(trimmed);
    }
    out
}

fn pow10(exp: i64) -> Rational {
    let p = BigInt::from(10).pow(exp.unsigned_abs() as u32);
    if exp >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

fn round_half_even(x: &Rational) -> BigInt {
    let floor = x.floor();
    let frac = x - &floor;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let base = floor.to_integer();
    match frac.cmp(&half) {
        std::cmp::Ordering::Less => base,
        std::cmp::Ordering::Greater => base + 1,
        std::cmp::Ordering::Equal => {
            if base.is_even() {
                base
            } else {
                base + 1
            }
        }
    }
}

/// Parses a probability written as `a/b`, a decimal such as `0.5`, or an
/// integer, and checks it lies in [0, 1].
pub fn parse_probability(text: &str) -> Result<Ratio<u64>> {
    let text = text.trim();
    let bad = |why: &str| Error::Undefined(format!("probability {text:?}: {why}"));
    let value = if let Some((n, d)) = text.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad("numerator"))?;
        let d: u64 = d.trim().parse().map_err(|_| bad("denominator"))?;
        if d == 0 {
            return Err(bad("zero denominator"));
        }
        Ratio::new(n, d)
    } else if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() && int.is_empty() {
            return Err(bad("no digits"));
        }
        if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("fraction digits"));
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad("integer part"))?
        };
        let scale = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad("fraction digits"))?
        };
        let num = int
            .checked_mul(scale)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(|| bad("overflow"))?;
        Ratio::new(num, scale)
    } else {
        Ratio::from_integer(text.parse().map_err(|_| bad("not a number"))?)
    };
    if value > Ratio::one() {
        return Err(bad("must not exceed 1"));
    }
    Ok(value)
}

pub fn to_big(r: Ratio<u64>) -> Rational {
    Rational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}
