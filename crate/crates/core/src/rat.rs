//! Exact rational helpers shared by every module.
//!
//! All distances, radii, Lagrange multipliers and LP values are
//! [`Rat`]s. Serialized form is the string `"p/q"` (or `"p"` when the
//! denominator is one); JSON integers are accepted on input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Write as _;

/// Arbitrary-precision rational in lowest terms with positive denominator.
pub type Rat = BigRational;

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or a decimal like `"1.25"`.
pub fn parse(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((whole, fracpart)) = s.split_once('.') {
        if fracpart.is_empty() || !fracpart.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().ok()?
        };
        let scale = num_traits::pow(BigInt::from(10), fracpart.len());
        let f: BigInt = fracpart.parse().ok()?;
        let mag = whole.abs() * &scale + f;
        let n = if negative { -mag } else { mag };
        return Some(Rat::new(n, scale));
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rat::from_integer(n))
}

/// Canonical `"p/q"` rendering (no `/1` for integers).
pub fn to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest `f64`, for drawing only.
pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering with `digits` significant digits, truncated toward zero.
/// Display only; never parsed back.
pub fn to_decimal(r: &Rat, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    if r.is_negative() {
        out.push('-');
    }
    let num = r.numer().abs();
    let den = r.denom().clone();
    let (whole, mut rem) = num.div_rem(&den);
    let whole_str = whole.to_string();
    let mut produced = if whole.is_zero() { 0 } else { whole_str.len() };
    out.push_str(&whole_str);
    if rem.is_zero() {
        return out;
    }
    out.push('.');
    let ten = BigInt::from(10);
    let mut frac_digits = String::new();
    while !rem.is_zero() && produced < digits {
        rem *= &ten;
        let (d, r2) = rem.div_rem(&den);
        rem = r2;
        let _ = write!(frac_digits, "{d}");
        if produced > 0 || !d.is_zero() {
            produced += 1;
        }
    }
    let trimmed = frac_digits.trim_end_matches('0');
    if trimmed.is_empty() {
        out.pop();
    } else {
        out.push_str(trimmed);
    }
    out
}

pub fn max<'a>(a: &'a Rat, b: &'a Rat) -> &'a Rat {
    if a >= b {
        a
    } else {
        b
    }
}

/// Serde adapter for a single [`Rat`] as a `"p/q"` string.
pub mod serde_rat {
    use super::Rat;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_string(r))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(super::int(v)),
            Repr::Str(s) => super::parse(&s)
                .ok_or_else(|| de::Error::custom(format!("invalid rational `{s}`"))),
        }
    }
}

/// Serde adapter for an optional [`Rat`].
pub mod serde_rat_opt {
    use super::Rat;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        r.as_ref().map(super::to_string).serialize(s)
    }
}

/// Serde adapter for a matrix of [`Rat`].
pub mod serde_rat_matrix {
    use super::Rat;
    use serde::de::{self, Deserializer};
    use serde::ser::{SerializeSeq, Serializer};
    use serde::Deserialize;

    pub fn serialize<S: Serializer>(m: &[Vec<Rat>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(m.len()))?;
        for row in m {
            let row: Vec<String> = row.iter().map(super::to_string).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Cell {
        Int(i64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rat>>, D::Error> {
        let raw: Vec<Vec<Cell>> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|c| match c {
                        Cell::Int(v) => Ok(super::int(v)),
                        Cell::Str(s) => super::parse(&s)
                            .ok_or_else(|| de::Error::custom(format!("invalid rational `{s}`"))),
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/6"), Some(frac(1, 2)));
        assert_eq!(parse("-7"), Some(int(-7)));
        assert_eq!(parse("1.25"), Some(frac(5, 4)));
        assert_eq!(parse("-0.5"), Some(frac(-1, 2)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
    }

    #[test]
    fn render() {
        assert_eq!(to_string(&frac(707, 500)), "707/500");
        assert_eq!(to_string(&int(4)), "4");
        assert_eq!(to_decimal(&frac(288, 85), 20), "3.3882352941176470588");
        assert_eq!(to_decimal(&frac(1, 4), 20), "0.25");
        assert_eq!(to_decimal(&frac(-1, 3), 5), "-0.33333");
        assert_eq!(to_decimal(&int(12), 20), "12");
        assert_eq!(to_decimal(&frac(1, 800), 3), "0.00125");
    }
}
