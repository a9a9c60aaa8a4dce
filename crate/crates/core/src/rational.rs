//! Exact rational arithmetic for the density calculus.
//!
//! Every value that feeds a sign comparison in the extension calculus lives
//! here; no floating point is involved anywhere in classification.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// A reduced rational with positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rat {
    num: i64,
    den: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rat {
    /// Builds `num/den` in lowest terms. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Rat {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub const ZERO: Rat = Rat { num: 0, den: 1 };
    pub const ONE: Rat = Rat { num: 1, den: 1 };

    pub fn integer(n: i64) -> Rat {
        Rat { num: n, den: 1 }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn recip(&self) -> Rat {
        assert!(self.num != 0, "reciprocal of zero");
        Rat::new(self.den, self.num)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Parses `"p/q"` or a bare integer `"p"`.
    pub fn parse(s: &str) -> Result<Rat> {
        let bad = |m: &str| Error::Format(format!("bad rational `{s}`: {m}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let num: i64 = p.trim().parse().map_err(|_| bad("numerator"))?;
                let den: i64 = q.trim().parse().map_err(|_| bad("denominator"))?;
                if den == 0 {
                    return Err(bad("zero denominator"));
                }
                Ok(Rat::new(num, den))
            }
            None => {
                let num: i64 = s.trim().parse().map_err(|_| bad("integer"))?;
                Ok(Rat::integer(num))
            }
        }
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat::new(self.num * rhs.den + rhs.num * self.den, self.den * rhs.den)
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        Rat::new(self.num * rhs.den - rhs.num * self.den, self.den * rhs.den)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat::new(self.num * rhs.num, self.den * rhs.den)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat {
            num: -self.num,
            den: self.den,
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        let l = self.num as i128 * other.den as i128;
        let r = other.num as i128 * self.den as i128;
        l.cmp(&r)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_sign() {
        assert_eq!(Rat::new(6, -10), Rat::new(-3, 5));
        assert_eq!(Rat::new(0, -7), Rat::ZERO);
        assert_eq!(Rat::new(-4, -6), Rat::new(2, 3));
        assert!(Rat::new(6, 10).denominator() == 5);
    }

    #[test]
    fn arithmetic() {
        let a = Rat::new(3, 5);
        assert_eq!(Rat::integer(1) - a * Rat::integer(2), Rat::new(-1, 5));
        assert_eq!(Rat::new(1, 2) + Rat::new(1, 3), Rat::new(5, 6));
        assert_eq!(Rat::new(5, 3).recip(), Rat::new(3, 5));
    }

    #[test]
    fn ordering() {
        assert!(Rat::new(3, 5) < Rat::new(2, 3));
        assert!(Rat::new(3, 5) > Rat::new(1, 2));
        assert!(Rat::new(-1, 5).is_negative());
    }

    #[test]
    fn parse_display_round_trip() {
        for s in ["3/5", "-1/5", "0/1", "7/1"] {
            assert_eq!(Rat::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(Rat::parse("2").unwrap(), Rat::integer(2));
        assert!(Rat::parse("1/0").is_err());
        assert!(Rat::parse("x/2").is_err());
    }
}
