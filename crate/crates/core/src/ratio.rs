//! Exact non-negative rationals.
//!
//! Thresholds (reduction ratio, distance/frequency ceilings) and traffic
//! rates arrive as short decimal literals. Comparing them against integer
//! counts in floating point can flip at the boundary (`0.1 * 10` is not 1),
//! so they are converted to exact rationals and compared with integer
//! cross-multiplication instead. The planner's replica ceilings use the same
//! machinery so that `⌈20/6.4⌉` is 4 on every platform.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RatioError {
    #[error("invalid decimal number `{0}`")]
    BadDecimal(String),
    #[error("number `{0}` does not fit the supported precision")]
    Overflow(String),
    #[error("value must be finite and non-negative, got {0}")]
    OutOfDomain(f64),
}

/// A non-negative rational, normalized so equal values compare equal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Ratio {
    num: u64,
    den: u64,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Option<Ratio> {
        if den == 0 {
            return None;
        }
        let g = gcd(num as u128, den as u128) as u64;
        Some(Ratio {
            num: num / g.max(1),
            den: den / g.max(1),
        })
    }

    fn from_u128(num: u128, den: u128, origin: &str) -> Result<Ratio, RatioError> {
        let g = gcd(num, den).max(1);
        let (num, den) = (num / g, den / g);
        if num > u64::MAX as u128 || den > u64::MAX as u128 {
            return Err(RatioError::Overflow(origin.to_string()));
        }
        Ok(Ratio {
            num: num as u64,
            den: den as u64,
        })
    }

    /// Parses a decimal literal, optionally with a scientific exponent:
    /// `42`, `0.125`, `1.005`, `2.5e-3`.
    pub fn from_decimal(text: &str) -> Result<Ratio, RatioError> {
        let s = text.trim();
        let bad = || RatioError::BadDecimal(text.to_string());
        let (mantissa, exp) = match s.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((i, f)) => (i, f),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut num: u128 = digits
            .parse()
            .map_err(|_| RatioError::Overflow(text.to_string()))?;
        let mut den: u128 = 1;
        let scale = frac_part.len() as i32 - exp;
        let pow = 10u128
            .checked_pow(scale.unsigned_abs())
            .ok_or_else(|| RatioError::Overflow(text.to_string()))?;
        if scale >= 0 {
            den = pow;
        } else {
            num = num
                .checked_mul(pow)
                .ok_or_else(|| RatioError::Overflow(text.to_string()))?;
        }
        Self::from_u128(num, den, text)
    }

    /// Converts a float through its shortest decimal representation, so the
    /// literal a user wrote (`0.1`, `6.4`) becomes the exact decimal it
    /// denoted rather than its binary approximation.
    pub fn from_f64(x: f64) -> Result<Ratio, RatioError> {
        if !x.is_finite() || x < 0.0 {
            return Err(RatioError::OutOfDomain(x));
        }
        Self::from_decimal(&format!("{x}"))
    }

    /// Exact ratio of two counts; `None` when the denominator is zero.
    pub fn of_counts(num: u64, den: u64) -> Option<Ratio> {
        Self::new(num, den)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// ⌈k · self⌉ computed exactly.
    pub fn mul_ceil(&self, k: u64) -> u64 {
        let prod = k as u128 * self.num as u128;
        (prod.div_ceil(self.den as u128)) as u64
    }

    /// self ≤ a/b, exactly.
    pub fn le_fraction(&self, a: u64, b: u64) -> bool {
        debug_assert!(b > 0);
        (self.num as u128) * (b as u128) <= (a as u128) * (self.den as u128)
    }

    /// a/b ≤ self, exactly.
    pub fn ge_fraction(&self, a: u64, b: u64) -> bool {
        (a as u128) * (self.den as u128) <= (self.num as u128) * (b as u128)
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Ratio) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Ratio) -> Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing() {
        assert_eq!(
            Ratio::from_decimal("0.5").unwrap(),
            Ratio::new(1, 2).unwrap()
        );
        assert_eq!(
            Ratio::from_decimal("6.4").unwrap(),
            Ratio::new(32, 5).unwrap()
        );
        assert_eq!(
            Ratio::from_decimal("42").unwrap(),
            Ratio::new(42, 1).unwrap()
        );
        assert_eq!(
            Ratio::from_decimal("2.5e-3").unwrap(),
            Ratio::new(1, 400).unwrap()
        );
        assert_eq!(
            Ratio::from_decimal("1e2").unwrap(),
            Ratio::new(100, 1).unwrap()
        );
        assert!(Ratio::from_decimal("abc").is_err());
        assert!(Ratio::from_decimal("-1").is_err());
        assert!(Ratio::from_decimal("").is_err());
    }

    #[test]
    fn f64_roundtrips_short_decimals() {
        assert_eq!(Ratio::from_f64(0.1).unwrap(), Ratio::new(1, 10).unwrap());
        assert_eq!(
            Ratio::from_f64(1.005).unwrap(),
            Ratio::new(201, 200).unwrap()
        );
        assert!(Ratio::from_f64(f64::NAN).is_err());
        assert!(Ratio::from_f64(-0.5).is_err());
    }

    #[test]
    fn exact_ceiling() {
        // ⌈10 · 0.1⌉ must be 1, not 2 as naive float ceil would give
        assert_eq!(Ratio::from_f64(0.1).unwrap().mul_ceil(10), 1);
        assert_eq!(Ratio::from_f64(0.6).unwrap().mul_ceil(5), 3);
        assert_eq!(Ratio::ONE.mul_ceil(7), 7);
        assert_eq!(Ratio::from_f64(0.34).unwrap().mul_ceil(3), 2);
    }

    #[test]
    fn ordering_is_exact() {
        let third = Ratio::new(1, 3).unwrap();
        let point333 = Ratio::from_decimal("0.333").unwrap();
        assert!(point333 < third);
        assert_eq!(Ratio::new(2, 4).unwrap(), Ratio::new(1, 2).unwrap());
    }

    #[test]
    fn fraction_comparisons() {
        let f = Ratio::from_f64(0.3).unwrap();
        assert!(f.ge_fraction(3, 10));
        assert!(f.le_fraction(3, 10));
        assert!(!f.ge_fraction(4, 10));
    }
}
