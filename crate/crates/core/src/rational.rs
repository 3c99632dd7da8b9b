//! Exact rational helpers and root-of-unity phases.
//!
//! Every phase in the crate is carried as an exact fraction of a full turn and
//! exponentiated once, at the point of use.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: {text:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::InvalidParameter(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigInt::from_str(frac).map_err(|_| bad())?;
        let mut num = int_part.abs() * &scale + frac_part;
        if negative {
            num = -num;
        }
        return Ok(Rational::new(num, scale));
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// Formats as `"p/q"`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Greatest common divisor of two positive rationals: the largest `g` with `x/g, y/g ∈ Z`.
pub fn rational_gcd(x: &Rational, y: &Rational) -> Rational {
    let num = x.numer().gcd(y.numer());
    let den = x.denom().lcm(y.denom());
    Rational::new(num, den)
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn to_f64(r: &Rational) -> f64 {
    // Ratio::to_f64 handles huge numerators and denominators without overflow.
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn big_to_usize(n: &BigInt) -> Option<usize> {
    n.to_usize()
}

/// Best rational approximation of `x` with denominator at most `max_den`, accepted only
/// when it reproduces `x` within `tol` (relative to `max(1, |x|)`).
pub fn recognize_rational(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1i64 } else { 1 };
    let target = x.abs();
    // Continued-fraction convergents h/k.
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rest = target;
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e15 {
            break;
        }
        let a_int = a as i128;
        let h2 = a_int * h1 + h0;
        let k2 = a_int * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - target).abs() <= tol * target.max(1.0) {
            return Some(Rational::new(
                BigInt::from(sign as i128 * h1),
                BigInt::from(k1),
            ));
        }
        let frac = rest - a;
        if frac < 1e-300 {
            break;
        }
        rest = 1.0 / frac;
    }
    None
}

/// `e^{2πi·num/den}` with the exponent reduced exactly before conversion.
pub fn cis_turns(num: i128, den: i128) -> Complex64 {
    debug_assert!(den > 0);
    let mut r = num.rem_euclid(den);
    if 2 * r > den {
        r -= den;
    }
    Complex64::from_polar(1.0, std::f64::consts::TAU * (r as f64) / (den as f64))
}

/// `e^{iπ·num/den}`, the half-turn variant used by Gauss sums.
pub fn cis_half_turns(num: i128, den: i128) -> Complex64 {
    cis_turns(num, 2 * den)
}

/// `e^{2πi·r}` for an exact rational number of turns.
pub fn cis_rational_turns(r: &Rational) -> Complex64 {
    let den = r.denom();
    let num = r.numer().mod_floor(den);
    match (num.to_i128(), den.to_i128()) {
        (Some(n), Some(d)) => cis_turns(n, d),
        _ => Complex64::from_polar(1.0, std::f64::consts::TAU * to_f64(&Rational::new(num, den.clone()))),
    }
}

/// Positive test used by descriptor validation.
pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), q(7, 1));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), q(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn formats_with_explicit_denominator() {
        assert_eq!(format_rational(&q(4, 2)), "2/1");
        assert_eq!(format_rational(&q(1, 6)), "1/6");
    }

    #[test]
    fn gcd_of_rationals() {
        assert_eq!(rational_gcd(&q(1, 2), &q(1, 3)), q(1, 6));
        assert_eq!(rational_gcd(&q(2, 3), &q(4, 9)), q(2, 9));
        assert_eq!(rational_gcd(&q(5, 7), &q(5, 7)), q(5, 7));
    }

    #[test]
    fn phases_reduce_exactly() {
        let z = cis_turns(1_000_000_000_001, 4);
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let w = cis_half_turns(3, 1);
        assert!((w + 1.0).norm() < 1e-15);
        let r = cis_rational_turns(&q(-1, 4));
        assert!((r - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn recognizes_simple_rationals() {
        assert_eq!(recognize_rational(0.125, 1000, 1e-12), Some(q(1, 8)));
        assert_eq!(recognize_rational(-2.0 / 3.0, 1000, 1e-12), Some(q(-2, 3)));
        assert_eq!(recognize_rational(std::f64::consts::PI, 1000, 1e-12), None);
    }
}
