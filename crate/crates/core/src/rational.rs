//! Exact rational values and their `num/den` text form.

use num_rational::Ratio;
use serde::Serializer;

use crate::error::{Error, Result};

/// Every utility and welfare value is a ratio of small integers.
pub type Rational = Ratio<i64>;

/// Builds `num/den`, reduced.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// Lowest-terms `num/den`; integers keep the `/1` so the form is uniform.
pub fn to_text(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `num/den`, a bare integer, or a plain decimal such as `0.25`.
pub fn parse(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::input(format!("not a rational number: {text:?}"));
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole: i64 = if whole.is_empty() || whole == "-" {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let den = 10i64.pow(frac.len() as u32);
        let frac: i64 = frac.parse().map_err(|_| bad())?;
        let magnitude = whole.abs() * den + frac;
        return Ok(Rational::new(if negative { -magnitude } else { magnitude }, den));
    }
    text.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

pub(crate) fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&to_text(value))
}

pub(crate) fn serialize_opt<S: Serializer>(
    value: &Option<Rational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => s.serialize_str(&to_text(v)),
        None => s.serialize_str("undefined"),
    }
}

/// Text form for an optional value; absent values print as `undefined`.
pub fn opt_text(value: &Option<Rational>) -> String {
    value.as_ref().map_or_else(|| "undefined".to_string(), to_text)
}
