use std::fmt;

use serde::{Deserialize, Serialize};

/// Micro-units per unit of current.
pub const SCALE: i64 = 1_000_000;

/// An amount of current stored as an integer count of micro-units.
///
/// All ledger arithmetic happens on the integer, so balances add up exactly.
/// Serializes as that integer.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Current(i64);

impl Current {
    pub const ZERO: Current = Current(0);

    pub const fn from_micros(micros: i64) -> Self {
        Current(micros)
    }

    pub const fn micros(self) -> i64 {
        self.0
    }

    /// Rounds to the nearest micro-unit; `None` if not finite or out of range.
    pub fn from_f64(value: f64) -> Option<Self> {
        let scaled = (value * SCALE as f64).round();
        if scaled.is_finite() && scaled.abs() < i64::MAX as f64 {
            Some(Current(scaled as i64))
        } else {
            None
        }
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    pub fn checked_add(self, other: Current) -> Option<Current> {
        self.0.checked_add(other.0).map(Current)
    }

    pub fn checked_sub(self, other: Current) -> Option<Current> {
        self.0.checked_sub(other.0).map(Current)
    }

    /// `self * count`, for per-token rates.
    pub fn checked_mul_count(self, count: u64) -> Option<Current> {
        i64::try_from(count)
            .ok()
            .and_then(|c| self.0.checked_mul(c))
            .map(Current)
    }

    /// How many whole `unit`s fit in `self`. `unit` must be positive.
    pub fn whole_units_of(self, unit: Current) -> u64 {
        if self.0 <= 0 || unit.0 <= 0 {
            0
        } else {
            (self.0 / unit.0) as u64
        }
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

impl fmt::Display for Current {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:06}", abs / SCALE as u64, abs % SCALE as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(
            Current::from_f64(1.5),
            Some(Current::from_micros(1_500_000))
        );
        assert_eq!(Current::from_f64(0.0000004), Some(Current::ZERO));
        assert_eq!(Current::from_f64(0.0000005), Some(Current::from_micros(1)));
        assert_eq!(Current::from_f64(f64::NAN), None);
        assert_eq!(Current::from_f64(1e300), None);
        assert_eq!(Current::from_micros(2_250_000).to_f64(), 2.25);
    }

    #[test]
    fn arithmetic() {
        let half = Current::from_micros(500_000);
        assert_eq!(
            half.checked_mul_count(4),
            Some(Current::from_micros(2_000_000))
        );
        assert_eq!(Current::from_micros(4_000_000).whole_units_of(half), 8);
        assert_eq!(Current::from_micros(4_200_000).whole_units_of(half), 8);
        assert_eq!(Current::from_micros(-1).whole_units_of(half), 0);
        assert_eq!(
            Current::from_micros(i64::MAX).checked_add(Current::from_micros(1)),
            None
        );
        assert_eq!(half.checked_mul_count(u64::MAX), None);
    }

    #[test]
    fn display() {
        assert_eq!(Current::from_micros(1_500_000).to_string(), "1.500000");
        assert_eq!(Current::from_micros(-20).to_string(), "-0.000020");
    }
}
