//! Numeric tower: exact rationals, exact radical powers, certified intervals.

pub mod interval;
pub mod logmono;
pub mod power;
pub mod powersum;
pub mod rational;

use std::cmp::Ordering;
use std::fmt;

pub use interval::{Interval, DEFAULT_PRECISION, MAX_PRECISION};
pub use logmono::LogMonomial;
pub use power::PowerScalar;
pub use powersum::PowerSum;
pub use rational::{format_rational, int, parse_rational, rat, Rational};

use crate::error::Result;

/// Three-valued comparison outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cmp3 {
    Less,
    Equal,
    Greater,
    Uncertain,
}

impl Cmp3 {
    pub fn ordering(self) -> Option<Ordering> {
        match self {
            Cmp3::Less => Some(Ordering::Less),
            Cmp3::Equal => Some(Ordering::Equal),
            Cmp3::Greater => Some(Ordering::Greater),
            Cmp3::Uncertain => None,
        }
    }

    pub fn reverse(self) -> Cmp3 {
        match self {
            Cmp3::Less => Cmp3::Greater,
            Cmp3::Greater => Cmp3::Less,
            c => c,
        }
    }
}

impl From<Ordering> for Cmp3 {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Cmp3::Less,
            Ordering::Equal => Cmp3::Equal,
            Ordering::Greater => Cmp3::Greater,
        }
    }
}

/// Three-valued set membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    In,
    Out,
    Uncertain,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::In => "in",
            Verdict::Out => "out",
            Verdict::Uncertain => "uncertain",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evaluation mode for [`eval`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Interval(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Evaluated {
    Exact(Rational),
    Interval(Interval),
}

pub fn eval(s: &PowerScalar, mode: Mode) -> Result<Evaluated> {
    match mode {
        Mode::Exact => s.eval_exact().map(Evaluated::Exact),
        Mode::Interval(p) => Ok(Evaluated::Interval(s.to_interval(p))),
    }
}

/// Any value the tower can hold.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Power(PowerScalar),
    Interval(Interval),
}

impl Scalar {
    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Interval(_))
    }

    pub fn to_interval(&self, prec: u32) -> Interval {
        match self {
            Scalar::Exact(q) => Interval::point(q, prec),
            Scalar::Power(p) => p.to_interval(prec),
            Scalar::Interval(i) => i.clone(),
        }
    }

    fn as_power(&self) -> Option<PowerScalar> {
        match self {
            Scalar::Exact(q) => Some(PowerScalar::rational(q.clone())),
            Scalar::Power(p) => Some(p.clone()),
            Scalar::Interval(_) => None,
        }
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<PowerScalar> for Scalar {
    fn from(p: PowerScalar) -> Self {
        Scalar::Power(p)
    }
}

impl From<Interval> for Scalar {
    fn from(i: Interval) -> Self {
        Scalar::Interval(i)
    }
}

/// Exact for exact inputs; for intervals, `Uncertain` exactly on overlap.
pub fn compare(a: &Scalar, b: &Scalar) -> Cmp3 {
    match (a.as_power(), b.as_power()) {
        (Some(x), Some(y)) => x.cmp_exact(&y).into(),
        _ => {
            let p = match (a, b) {
                (Scalar::Interval(i), Scalar::Interval(j)) => i.precision_bits.max(j.precision_bits),
                (Scalar::Interval(i), _) | (_, Scalar::Interval(i)) => i.precision_bits,
                _ => DEFAULT_PRECISION,
            };
            a.to_interval(p).compare(&b.to_interval(p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_examples() {
        let a = Scalar::Power(PowerScalar::new(int(1), 8, rat(2, 3)).unwrap());
        assert_eq!(compare(&a, &Scalar::Exact(int(4))), Cmp3::Equal);
        let i = Scalar::Interval(Interval::from_bounds(rat(141, 100), rat(142, 100), 64));
        let j = Scalar::Interval(Interval::from_bounds(rat(1415, 1000), rat(143, 100), 64));
        assert_eq!(compare(&i, &j), Cmp3::Uncertain);
        let s2 = Scalar::Interval(PowerScalar::new(int(1), 2, rat(1, 2)).unwrap().to_interval(64));
        assert_eq!(compare(&s2, &Scalar::Exact(rat(3, 2))), Cmp3::Less);
    }

    #[test]
    fn eval_modes() {
        let s = PowerScalar::new(int(1), 2, rat(1, 2)).unwrap();
        assert!(eval(&s, Mode::Exact).is_err());
        match eval(&s, Mode::Interval(64)).unwrap() {
            Evaluated::Interval(i) => assert!(i.lo < i.hi),
            _ => panic!("expected an enclosure"),
        }
    }
}
