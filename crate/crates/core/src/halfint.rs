//! Half-integers, stored exactly as twice their value.
//!
//! Angular momentum labels (j, m) live on the lattice ℤ/2, and almost every
//! formula in the collective-spin modules indexes factorials by j±m. Doing
//! that arithmetic in floats invites off-by-half bugs, so `HalfInt` keeps the
//! doubled value in an `i64` and converts to floats only at the boundary.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Real;

/// An element of ℤ/2: integers and half-odd-integers.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct HalfInt {
    doubled: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { doubled: 0 };
    pub const HALF: HalfInt = HalfInt { doubled: 1 };
    pub const ONE: HalfInt = HalfInt { doubled: 2 };

    /// From an integer value.
    pub fn from_int(n: i64) -> Self {
        HalfInt { doubled: 2 * n }
    }

    /// From twice the value (so `from_doubled(3)` is 3/2).
    pub fn from_doubled(doubled: i64) -> Self {
        HalfInt { doubled }
    }

    pub fn doubled(self) -> i64 {
        self.doubled
    }

    pub fn is_integer(self) -> bool {
        self.doubled % 2 == 0
    }

    /// The integer value, if it is one.
    pub fn as_int(self) -> Option<i64> {
        self.is_integer().then_some(self.doubled / 2)
    }

    /// Numeric value in the requested scalar type.
    pub fn value<T: Real>(self) -> T {
        T::of_i64(self.doubled) / T::of(2.0)
    }

    pub fn abs(self) -> Self {
        HalfInt { doubled: self.doubled.abs() }
    }

    /// j + m, j - m and friends are integers whenever j and m are compatible
    /// (both integer or both half-odd). Returns `None` otherwise.
    pub fn plus_as_int(self, other: HalfInt) -> Option<i64> {
        (self + other).as_int()
    }

    pub fn minus_as_int(self, other: HalfInt) -> Option<i64> {
        (self - other).as_int()
    }

    /// Inclusive range m = -j, -j+1, …, j in ascending order.
    /// Empty if `j` is negative.
    pub fn projection_range(j: HalfInt) -> Vec<HalfInt> {
        if j.doubled < 0 {
            return Vec::new();
        }
        (-j.doubled..=j.doubled)
            .step_by(2)
            .map(HalfInt::from_doubled)
            .collect()
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { doubled: self.doubled + rhs.doubled }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { doubled: self.doubled - rhs.doubled }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { doubled: -self.doubled }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.doubled % 2 == 0 {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Accepts `"3"`, `"-2"`, `"5/2"`, `"-7/2"` and decimal strings whose value
/// lies exactly on the half-integer lattice (`"2.5"`).
impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::InvalidHalfInt { input: s.to_string() };
        if let Some((num, den)) = s.split_once('/') {
            if den.trim() != "2" {
                return Err(bad());
            }
            let doubled: i64 = num.trim().parse().map_err(|_| bad())?;
            return Ok(HalfInt::from_doubled(doubled));
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(HalfInt::from_int(n));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let doubled = 2.0 * x;
        if doubled.fract() != 0.0 || doubled.abs() > i64::MAX as f64 {
            return Err(bad());
        }
        Ok(HalfInt::from_doubled(doubled as i64))
    }
}

impl TryFrom<String> for HalfInt {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<HalfInt> for String {
    fn from(h: HalfInt) -> String {
        h.to_string()
    }
}
