//! Exact rational scalars and their canonical text form.
//!
//! Every quantity in this crate is a [`Rat`]: an arbitrary-precision
//! rational kept in lowest terms with a positive denominator. The
//! interchange form is the string `"p/q"` (or `"p"` when the denominator
//! is 1), which is what [`format_rat`] emits and [`parse_rat`] accepts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Parses a canonical rational literal: an optionally signed integer,
/// or `"p/q"` with a non-zero denominator.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::InvalidRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.trim().parse().map_err(|_| bad())?;
    let den: BigInt = den.trim().parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(num, den))
}

/// Formats a rational in canonical form: `gcd(p, q) = 1`, `q > 0`,
/// and the `/q` suffix omitted when `q = 1`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Sum of absolute values, the l1 norm used for measures.
pub fn l1_norm(values: &[Rat]) -> Rat {
    values.iter().map(|v| v.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "7", "-3", "1/2", "-5/17"] {
            assert_eq!(format_rat(&parse_rat(s).unwrap()), s);
        }
    }

    #[test]
    fn parse_reduces_to_canonical_form() {
        assert_eq!(format_rat(&parse_rat("2/4").unwrap()), "1/2");
        assert_eq!(format_rat(&parse_rat("3/-6").unwrap()), "-1/2");
        assert_eq!(format_rat(&parse_rat("-4/2").unwrap()), "-2");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
        assert!(parse_rat("1.5").is_err());
    }
}
