//! Exact-rational parsing and canonical formatting for the JSON interface.
//!
//! Rationals appear in game files and reports as JSON integers, decimal
//! strings (`"0.05"`), or fraction strings (`"p/q"`). They are always
//! written back in canonical form: a bare integer when the denominator is
//! one, otherwise the reduced fraction `"p/q"`.

use anyhow::{anyhow, bail, Result};
use coopeq_core::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Formats a rational canonically: `"p"` or `"p/q"`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats a rational as a JSON value: an integer number when it fits,
/// otherwise a canonical fraction string.
pub fn rational_to_json(r: &Rational) -> serde_json::Value {
    if r.denom().is_one() {
        if let Ok(i) = i64::try_from(r.numer().clone()) {
            return serde_json::Value::from(i);
        }
    }
    serde_json::Value::from(format_rational(r))
}

/// Parses a rational from a string: `"p/q"`, a decimal such as `"-1.25"`,
/// or a plain integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    if text.is_empty() {
        bail!("empty rational literal");
    }
    if let Some((num, den)) = text.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| anyhow!("invalid fraction numerator {num:?}"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| anyhow!("invalid fraction denominator {den:?}"))?;
        if d.is_zero() {
            bail!("fraction {text:?} has a zero denominator");
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        let digits = frac_part.trim();
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            bail!("invalid decimal literal {text:?}");
        }
        let negative = int_part.trim_start().starts_with('-');
        let whole: BigInt = if int_part == "-" || int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part
                .parse()
                .map_err(|_| anyhow!("invalid decimal literal {text:?}"))?
        };
        let scale = BigInt::from(10u8).pow(digits.len() as u32);
        let frac: BigInt = digits.parse().expect("digits only");
        let numer = if negative { whole * &scale - frac } else { whole * &scale + frac };
        return Ok(Rational::new(numer, scale));
    }
    let n: BigInt = text.parse().map_err(|_| anyhow!("invalid integer literal {text:?}"))?;
    Ok(Rational::from(n))
}

/// Parses a rational from a JSON value: integer number, decimal/fraction
/// string, or (for configuration fields such as `theta`) a float rendered
/// through its shortest decimal form.
pub fn rational_from_json(value: &serde_json::Value, allow_float: bool) -> Result<Rational> {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from(BigInt::from(i)))
            } else if allow_float {
                let f = n.as_f64().ok_or_else(|| anyhow!("unrepresentable number {n}"))?;
                parse_rational(&format!("{f}"))
            } else {
                bail!("gain {n} must be an integer, a decimal string, or a \"p/q\" string")
            }
        }
        serde_json::Value::String(s) => parse_rational(s),
        other => bail!("expected a rational, found {other}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use coopeq_core::game::{rat, ratio};

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3").unwrap(), rat(3));
        assert_eq!(parse_rational("-7/2").unwrap(), ratio(-7, 2));
        assert_eq!(parse_rational("0.05").unwrap(), ratio(1, 20));
        assert_eq!(parse_rational("-1.25").unwrap(), ratio(-5, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format_rational(&rat(5)), "5");
        assert_eq!(format_rational(&ratio(10, 4)), "5/2");
        assert_eq!(format_rational(&ratio(-1, 3)), "-1/3");
    }

    #[test]
    fn float_theta_roundtrips_through_decimal() {
        let v = serde_json::json!(0.2);
        assert_eq!(rational_from_json(&v, true).unwrap(), ratio(1, 5));
    }
}
