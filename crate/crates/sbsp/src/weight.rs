//! Fixed-precision edge weights.
//!
//! Weights are non-negative decimals stored as 64-bit integers in units of
//! 10⁻⁶, parsed exactly from text. Comparisons are plain integer comparisons,
//! so minimum-edge selection is total and reproducible across runs and
//! platforms, which float weights cannot guarantee.

use std::fmt;
use std::iter::Sum;

/// Number of decimal digits kept after the point.
const FRACTION_DIGITS: u32 = 6;
const SCALE: u64 = 10u64.pow(FRACTION_DIGITS);

/// A non-negative edge weight with six decimal digits of precision.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(u64);

impl Weight {
    pub const ZERO: Weight = Weight(0);
    /// The default weight of an unweighted edge.
    pub const ONE: Weight = Weight(SCALE);

    pub fn from_int(value: u64) -> Option<Weight> {
        value.checked_mul(SCALE).map(Weight)
    }

    /// Raw value in units of 10⁻⁶, for wire encoding.
    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn from_raw(raw: u64) -> Weight {
        Weight(raw)
    }

    /// Parses a decimal literal such as `3`, `0.25` or `17.000001`.
    ///
    /// Fails on negative values, more than six fractional digits, overflow,
    /// and anything that is not a plain decimal number.
    pub fn parse(text: &str) -> Result<Weight, WeightParseError> {
        let err = || WeightParseError {
            text: text.to_string(),
        };
        let body = text.strip_prefix('+').unwrap_or(text);
        if body.starts_with('-') {
            return Err(err());
        }
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if frac_part.len() > FRACTION_DIGITS as usize {
            return Err(err());
        }
        let int_value: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| err())?
        };
        let frac_value: u64 = if frac_part.is_empty() {
            0
        } else {
            let digits: u64 = frac_part.parse().map_err(|_| err())?;
            digits * 10u64.pow(FRACTION_DIGITS - frac_part.len() as u32)
        };
        int_value
            .checked_mul(SCALE)
            .and_then(|v| v.checked_add(frac_value))
            .map(Weight)
            .ok_or_else(err)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_decimal(f, self.0 / SCALE, self.0 % SCALE)
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightParseError {
    pub text: String,
}

impl fmt::Display for WeightParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid weight {:?}", self.text)
    }
}

impl std::error::Error for WeightParseError {}

/// Exact sum of weights, wide enough for any graph this crate can hold.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct WeightSum(u128);

impl WeightSum {
    pub fn add(&mut self, w: Weight) {
        self.0 += w.0 as u128;
    }

    pub fn raw(self) -> u128 {
        self.0
    }
}

impl Sum<Weight> for WeightSum {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> WeightSum {
        let mut total = WeightSum::default();
        for w in iter {
            total.add(w);
        }
        total
    }
}

impl fmt::Display for WeightSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_decimal(f, (self.0 / SCALE as u128) as u64, (self.0 % SCALE as u128) as u64)
    }
}

impl fmt::Debug for WeightSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightSum({self})")
    }
}

fn write_decimal(f: &mut fmt::Formatter<'_>, int_part: u64, frac: u64) -> fmt::Result {
    if frac == 0 {
        return write!(f, "{int_part}");
    }
    let mut digits = format!("{frac:06}");
    while digits.ends_with('0') {
        digits.pop();
    }
    write!(f, "{int_part}.{digits}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_integers() {
        assert_eq!(Weight::parse("1").unwrap(), Weight::ONE);
        assert_eq!(Weight::parse("0").unwrap(), Weight::ZERO);
        assert_eq!(Weight::parse("42").unwrap(), Weight::from_int(42).unwrap());
    }

    #[test]
    fn parses_fractions_exactly() {
        assert_eq!(Weight::parse("0.5").unwrap().raw(), 500_000);
        assert_eq!(Weight::parse("1.000001").unwrap().raw(), 1_000_001);
        assert_eq!(Weight::parse("2.25").unwrap().raw(), 2_250_000);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["-1", "1.0000001", "", ".", "abc", "1e3", "1.2.3"] {
            assert!(Weight::parse(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn display_round_trips() {
        for text in ["0", "1", "0.5", "3.125", "17.000001"] {
            let w = Weight::parse(text).unwrap();
            assert_eq!(w.to_string(), text);
            assert_eq!(Weight::parse(&w.to_string()).unwrap(), w);
        }
    }

    #[test]
    fn sums_are_exact() {
        let total: WeightSum = (0..1000).map(|_| Weight::parse("0.1").unwrap()).sum();
        assert_eq!(total.to_string(), "100");
    }

    #[test]
    fn ordering_is_numeric() {
        assert!(Weight::parse("0.9").unwrap() < Weight::parse("1").unwrap());
        assert!(Weight::parse("1.5").unwrap() < Weight::parse("10").unwrap());
    }
}
