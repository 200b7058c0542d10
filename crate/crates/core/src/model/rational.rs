//! Exact non-negative rationals used as approximation degrees.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};

use super::ModelError;

/// A non-negative rational number in lowest terms.
///
/// Comparisons never overflow, so `1/3 < 17/50 < 1/2` holds for any
/// representable numerators and denominators.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational(Ratio<u64>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));
    pub const HALF: Rational = Rational(Ratio::new_raw(1, 2));

    pub fn new(numerator: u64, denominator: u64) -> Result<Self, ModelError> {
        if denominator == 0 {
            return Err(ModelError::ZeroDenominator);
        }
        Ok(Rational(Ratio::new(numerator, denominator)))
    }

    pub fn integer(value: u64) -> Self {
        Rational(Ratio::from_integer(value))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `count <= self * total`, evaluated by cross-multiplication.
    pub fn allows(&self, count: usize, total: usize) -> bool {
        (count as u128) * (self.denom() as u128) <= (self.numer() as u128) * (total as u128)
    }

    /// Largest integer `m` with `m <= self * total`.
    pub fn floor_times(&self, total: u64) -> u128 {
        (self.numer() as u128) * (total as u128) / (self.denom() as u128)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ModelError;

    /// Accepts `n/d`, `n`, and finite decimals such as `0.25` (read as `25/100`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::BadRational(s.to_string());
        let digits = |t: &str| -> Result<u64, ModelError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<u64>().map_err(|_| bad())
        };
        let s_trim = s.trim();
        if let Some((n, d)) = s_trim.split_once('/') {
            return Rational::new(digits(n.trim())?, digits(d.trim())?);
        }
        if let Some((whole, frac)) = s_trim.split_once('.') {
            if frac.is_empty() && whole.is_empty() {
                return Err(bad());
            }
            let whole = if whole.is_empty() { 0 } else { digits(whole)? };
            if frac.is_empty() {
                return Ok(Rational::integer(whole));
            }
            let scale = 10u64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
            let frac = digits(frac)?;
            let numerator = whole
                .checked_mul(scale)
                .and_then(|w| w.checked_add(frac))
                .ok_or_else(bad)?;
            return Rational::new(numerator, scale);
        }
        Ok(Rational::integer(digits(s_trim)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn lowest_terms_and_display() {
        assert_eq!(r("2/8").to_string(), "1/4");
        assert_eq!(r("4/4").to_string(), "1");
        assert_eq!(r("0/7"), Rational::ZERO);
        assert_eq!(r("0.25"), r("1/4"));
        assert_eq!(r("0.5"), Rational::HALF);
        assert_eq!(r("1.0"), Rational::ONE);
        assert_eq!(r(".75"), r("3/4"));
    }

    #[test]
    fn exact_ordering() {
        assert!(r("1/3") < r("17/50"));
        assert!(r("17/50") < r("1/2"));
        let big = Rational::new(u64::MAX - 1, u64::MAX).unwrap();
        let bigger = Rational::new(u64::MAX - 2, u64::MAX - 1).unwrap();
        assert!(bigger < big);
        assert!(big < Rational::ONE);
    }

    #[test]
    fn rejects_garbage() {
        for s in [
            "",
            "1/0",
            "a",
            "-1",
            "1/-2",
            "1.2.3",
            "0.12345678901234567890123",
            ".",
        ] {
            assert!(s.parse::<Rational>().is_err(), "{s}");
        }
    }

    #[test]
    fn allows_is_cross_multiplication() {
        let third = r("1/3");
        assert!(third.allows(1, 3));
        assert!(!third.allows(2, 3));
        assert!(r("1/2").allows(1, 2));
        assert!(!r("1/2").allows(2, 3));
        assert_eq!(r("3/50").floor_times(50), 3);
    }
}
