//! Exact decimal quantities stored as integer micro-units.
//!
//! Rewards are written as decimal text in theory files and carried through
//! the logic-program encoding as constants, so they need an exact, hashable
//! representation. Anything that cannot be written with at most six
//! fractional digits is rejected rather than rounded.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Number of micro-units in one whole unit.
pub const MICROS_PER_UNIT: i64 = 1_000_000;

const FRACTION_DIGITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixedError {
    #[error("`{0}` is not a decimal number")]
    Malformed(String),
    #[error("`{0}` has more than six fractional digits")]
    TooPrecise(String),
    #[error("`{0}` is out of range")]
    Overflow(String),
}

/// A decimal number with six fractional digits, stored exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fixed(i64);

impl Fixed {
    pub const ZERO: Fixed = Fixed(0);

    pub const fn from_micros(micros: i64) -> Self {
        Fixed(micros)
    }

    pub fn from_int(value: i64) -> Option<Self> {
        value.checked_mul(MICROS_PER_UNIT).map(Fixed)
    }

    pub const fn micros(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / MICROS_PER_UNIT as f64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Scales by `c`, failing on overflow.
    pub fn checked_mul_int(self, c: i64) -> Option<Self> {
        self.0.checked_mul(c).map(Fixed)
    }
}

impl FromStr for Fixed {
    type Err = FixedError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let malformed = || FixedError::Malformed(text.to_string());
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (whole, frac) = match body.split_once('.') {
            Some((w, f)) => (w, f),
            None => (body, ""),
        };
        if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        if !frac.bytes().all(|b| b.is_ascii_digit()) || (body.contains('.') && frac.is_empty()) {
            return Err(malformed());
        }
        let trimmed = frac.trim_end_matches('0');
        if trimmed.len() > FRACTION_DIGITS {
            return Err(FixedError::TooPrecise(text.to_string()));
        }
        let overflow = || FixedError::Overflow(text.to_string());
        let whole: i64 = whole.parse().map_err(|_| overflow())?;
        let mut frac_micros: i64 = 0;
        for (i, digit) in trimmed.bytes().enumerate() {
            frac_micros += i64::from(digit - b'0') * 10_i64.pow((FRACTION_DIGITS - 1 - i) as u32);
        }
        let magnitude = whole
            .checked_mul(MICROS_PER_UNIT)
            .and_then(|w| w.checked_add(frac_micros))
            .ok_or_else(overflow)?;
        Ok(Fixed(if negative { -magnitude } else { magnitude }))
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let magnitude = self.0.unsigned_abs();
        let whole = magnitude / MICROS_PER_UNIT as u64;
        let frac = magnitude % MICROS_PER_UNIT as u64;
        let digits = format!("{frac:06}");
        let digits = digits.trim_end_matches('0');
        let digits = if digits.is_empty() { "0" } else { digits };
        write!(f, "{sign}{whole}.{digits}")
    }
}
