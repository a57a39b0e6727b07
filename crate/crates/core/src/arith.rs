//! Exact rational helpers: base-|Σ| logarithms, exact ceilings of logarithms,
//! and rational parsing.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn log2_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// `log_radix(x)` for positive rational `x`.
pub fn log_sigma(x: &BigRational, radix: u32) -> Result<f64> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("logarithm of non-positive value {x}")));
    }
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    let l2 = log2_biguint(num) - log2_biguint(den);
    if radix == 2 {
        Ok(l2)
    } else {
        Ok(l2 / (radix as f64).log2())
    }
}

/// `radix^e` as an exact rational, for any integer `e`.
pub fn radix_pow(radix: u32, e: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(radix), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Smallest integer `e` with `radix^e >= x`, i.e. the exact `⌈log_radix x⌉`.
pub fn ceil_log(x: &BigRational, radix: u32) -> Result<i64> {
    let approx = log_sigma(x, radix)?;
    let mut e = approx.ceil() as i64;
    // float estimate is off by at most one step near exact powers
    while radix_pow(radix, e - 1) >= *x {
        e -= 1;
    }
    while radix_pow(radix, e) < *x {
        e += 1;
    }
    Ok(e)
}

/// Exact `⌈log_radix n⌉` for a positive integer.
pub fn ceil_log_u(n: u64, radix: u32) -> u32 {
    assert!(n >= 1, "ceil_log_u of zero");
    let mut e = 0u32;
    let mut p: u128 = 1;
    while p < n as u128 {
        p *= radix as u128;
        e += 1;
    }
    e
}

/// Exact `⌊log_radix n⌋` for a positive integer.
pub fn floor_log_u(n: u64, radix: u32) -> u32 {
    assert!(n >= 1, "floor_log_u of zero");
    let mut e = 0u32;
    let mut p: u128 = radix as u128;
    while p <= n as u128 {
        p *= radix as u128;
        e += 1;
    }
    e
}

/// Parses `p/q`, `p`, or `-p/q`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Domain(format!("malformed rational {text:?}"));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub fn parse_rational64(text: &str) -> Result<Rational64> {
    let bad = || Error::Domain(format!("malformed rational {text:?}"));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let n: i64 = n.trim().parse().map_err(|_| bad())?;
    let d: i64 = d.trim().parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational64::new(n, d))
}

/// Canonical text form: `p/q`, or `p` when the denominator is one.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sigma_examples() {
        assert_eq!(log_sigma(&int(1), 2).unwrap(), 0.0);
        assert_eq!(log_sigma(&int(8), 2).unwrap(), 3.0);
        assert_eq!(log_sigma(&rat(1, 2), 2).unwrap(), -1.0);
        assert!((log_sigma(&int(9), 3).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn log_sigma_domain() {
        assert!(matches!(log_sigma(&int(0), 2), Err(Error::Domain(_))));
        assert!(matches!(log_sigma(&rat(-1, 3), 2), Err(Error::Domain(_))));
    }

    #[test]
    fn log_sigma_huge_values() {
        let x = radix_pow(2, 40_000) * rat(3, 1);
        let l = log_sigma(&x, 2).unwrap();
        let expect = 40_000.0 + 3f64.log2();
        assert!(((l - expect) / expect).abs() < 1e-12);
        let y = radix_pow(2, -40_000);
        assert!((log_sigma(&y, 2).unwrap() + 40_000.0).abs() < 1e-9);
    }

    #[test]
    fn ceil_log_is_exact_at_powers() {
        assert_eq!(ceil_log(&int(1), 2).unwrap(), 0);
        assert_eq!(ceil_log(&int(2), 2).unwrap(), 1);
        assert_eq!(ceil_log(&int(3), 2).unwrap(), 2);
        assert_eq!(ceil_log(&rat(4, 3), 2).unwrap(), 1);
        assert_eq!(ceil_log(&rat(16, 9), 2).unwrap(), 1);
        assert_eq!(ceil_log(&int(27), 3).unwrap(), 3);
        assert_eq!(ceil_log(&rat(1, 2), 2).unwrap(), -1);
        assert_eq!(ceil_log(&radix_pow(2, 500), 2).unwrap(), 500);
        assert_eq!(ceil_log(&(radix_pow(2, 500) + int(1)), 2).unwrap(), 501);
    }

    #[test]
    fn integer_logs() {
        assert_eq!(ceil_log_u(1, 2), 0);
        assert_eq!(ceil_log_u(3, 2), 2);
        assert_eq!(ceil_log_u(4, 2), 2);
        assert_eq!(ceil_log_u(6, 2), 3);
        assert_eq!(floor_log_u(1, 2), 0);
        assert_eq!(floor_log_u(7, 2), 2);
        assert_eq!(floor_log_u(8, 2), 3);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rat(2, 4)), "1/2");
        assert_eq!(format_rational(&int(0)), "0");
    }
}
