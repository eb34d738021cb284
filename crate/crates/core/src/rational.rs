//! Exact rational arithmetic helpers.
//!
//! Every quantity reported in a certificate (expansion values, potentials,
//! congestion bounds) is an exact rational; floating point is confined to
//! the cut player's projection vector where only ordering matters.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational;

use crate::error::{Error, Result};

/// Shorthand constructor from machine integers.
pub fn rat(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_usize(numer: usize, denom: usize) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Formats a rational as the canonical `num/den` string used in
/// certificate documents. The denominator is always present, so integers
/// read back exactly ("3" serializes as "3/1").
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den`, a plain integer, or a finite decimal into an exact
/// rational. Decimals convert exactly (e.g. "0.25" -> 1/4); there is no
/// floating-point intermediate.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::InvalidRational("empty string".into()));
    }
    let invalid = |msg: &str| Error::InvalidRational(format!("{msg}: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let numer: BigInt = num
            .trim()
            .parse()
            .map_err(|_| invalid("bad numerator"))?;
        let denom: BigInt = den
            .trim()
            .parse()
            .map_err(|_| invalid("bad denominator"))?;
        if denom.is_zero() {
            return Err(invalid("zero denominator"));
        }
        Ok(BigRational::new(numer, denom))
    } else if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(invalid("bad decimal"));
        }
        let negative = int_part.trim_start().starts_with('-');
        let int: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| invalid("bad decimal"))?
        };
        let frac: BigInt = frac_part.parse().map_err(|_| invalid("bad decimal"))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let magnitude = int.abs() * &scale + frac;
        let signed = if negative { -magnitude } else { magnitude };
        Ok(BigRational::new(signed, scale))
    } else {
        let numer: BigInt = s.parse().map_err(|_| invalid("bad integer"))?;
        Ok(BigRational::from_integer(numer))
    }
}

/// Computes the integer arc capacity `ceil(1/alpha)` used by the matching
/// player's flow networks. Requires `alpha > 0`.
pub fn ceil_reciprocal(alpha: &BigRational) -> Result<u64> {
    if !alpha.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {}",
            format_rational(alpha)
        )));
    }
    let ceiling = alpha.recip().ceil().to_integer();
    ceiling.to_u64().ok_or_else(|| {
        Error::InvalidParameter(format!(
            "ceil(1/alpha) does not fit in 64 bits for alpha = {}",
            format_rational(alpha)
        ))
    })
}

/// `1/(4n^2)`, the mixing threshold for the walk potential.
pub fn default_potential_threshold(n: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(4 * n * n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("2/3").unwrap(), rat(2, 3));
        assert_eq!(parse_rational(" 4/6 ").unwrap(), rat(2, 3));
        assert_eq!(parse_rational("5").unwrap(), rat(5, 1));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("1/-2").unwrap(), rat(-1, 2));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "a", "1/0", "1/", "0.2.3", "1e3", "."] {
            assert!(parse_rational(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn format_is_always_num_den() {
        assert_eq!(format_rational(&rat(3, 1)), "3/1");
        assert_eq!(format_rational(&rat(4, 6)), "2/3");
        assert_eq!(format_rational(&rat(-1, 2)), "-1/2");
    }

    #[test]
    fn format_parse_round_trip() {
        for (n, d) in [(0, 1), (7, 3), (-9, 12), (1, 1000000007)] {
            let r = rat(n, d);
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn ceil_reciprocal_examples() {
        assert_eq!(ceil_reciprocal(&rat(1, 1)).unwrap(), 1);
        assert_eq!(ceil_reciprocal(&rat(2, 3)).unwrap(), 2);
        assert_eq!(ceil_reciprocal(&rat(1, 7)).unwrap(), 7);
        assert_eq!(ceil_reciprocal(&rat(3, 2)).unwrap(), 1);
        assert!(ceil_reciprocal(&rat(0, 1)).is_err());
        assert!(ceil_reciprocal(&rat(-1, 2)).is_err());
    }

    #[test]
    fn potential_threshold_value() {
        assert_eq!(default_potential_threshold(2), rat(1, 16));
        assert_eq!(default_potential_threshold(8), rat(1, 256));
    }
}
