//! Helpers around `num_rational::BigRational`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `a`, `-a/b`, or a plain decimal such as `0.125` or `1e-2`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_int(n)?;
        let d = parse_int(d)?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if s.contains(['.', 'e', 'E']) {
        return parse_decimal(s);
    }
    Ok(Rational::from_integer(parse_int(s)?))
}

fn parse_int(s: &str) -> Result<BigInt> {
    let t = s.trim();
    let body = t.strip_prefix(['+', '-']).unwrap_or(t);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not an integer: {s:?}")));
    }
    t.trim_start_matches('+').parse::<BigInt>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))?),
        None => (s, 0),
    };
    if exp.unsigned_abs() > 4096 {
        return Err(Error::Parse(format!("exponent out of range in {s:?}")));
    }
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches(['+', '-']);
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(Error::Parse(format!("not a number: {s:?}")));
    }
    if !ip.bytes().chain(fp.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a number: {s:?}")));
    }
    let digits: BigInt = format!("0{ip}{fp}").parse().expect("digits checked");
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10u32);
    let mut q = if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Comma separated list of rationals, as used by the command line.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    if s.trim().is_empty() {
        return Err(Error::Parse("empty list".into()));
    }
    s.split(',').map(parse_rational).collect()
}

pub fn floor_int(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

pub fn ceil_int(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// `q^k` for a signed integer exponent.
pub fn pow_i(q: &Rational, k: i64) -> Rational {
    if k >= 0 {
        num_traits::pow(q.clone(), k as usize)
    } else {
        num_traits::pow(q.recip(), k.unsigned_abs() as usize)
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // extremely large or small: go through the bit lengths
        let nb = q.numer().bits() as i64;
        let db = q.denom().bits() as i64;
        let e = nb - db;
        if e > 1000 {
            if q.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else {
            0.0
        }
    })
}

pub fn lcm_u(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

/// Returns `(m, k)` with `n = m^k` and `k` maximal.
pub fn perfect_power_root(n: u64) -> (u64, u32) {
    if n < 4 {
        return (n, 1);
    }
    let mut best = (n, 1);
    for k in 2..64u32 {
        let r = BigUint::from(n).nth_root(k).to_u64().unwrap_or(0);
        if r < 2 {
            break;
        }
        if num_traits::checked_pow(r, k as usize) == Some(n) {
            best = (r, k);
        }
    }
    best
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("1e-2").unwrap(), rat(1, 100));
        assert_eq!(parse_rational("+2/4").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/-").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn formatting_roundtrip() {
        for q in [rat(7, 3), int(0), rat(-5, 2), int(12)] {
            assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
        }
    }

    #[test]
    fn perfect_powers() {
        assert_eq!(perfect_power_root(8), (2, 3));
        assert_eq!(perfect_power_root(64), (2, 6));
        assert_eq!(perfect_power_root(36), (6, 2));
        assert_eq!(perfect_power_root(12), (12, 1));
        assert_eq!(perfect_power_root(2), (2, 1));
    }
}
