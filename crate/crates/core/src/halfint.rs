//! Non-negative half-integers, stored as twice their value.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A non-negative half-integer `twice / 2`.
///
/// Used both for irreducible representation labels `l` of SU(2) (with
/// dimension `2l + 1`) and for band limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt(u32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: u32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: u32) -> Self {
        HalfInt(2 * n)
    }

    /// Parses `"3"`, `"3/2"` or `"1.5"`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().ok()?;
            match den.trim() {
                "1" => Some(HalfInt(2 * num)),
                "2" => Some(HalfInt(num)),
                _ => None,
            }
        } else if let Ok(n) = s.parse::<u32>() {
            Some(HalfInt(2 * n))
        } else {
            let v: f64 = s.parse().ok()?;
            let twice = (2.0 * v).round();
            if v >= 0.0 && (2.0 * v - twice).abs() < 1e-9 && twice < u32::MAX as f64 {
                Some(HalfInt(twice as u32))
            } else {
                None
            }
        }
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Dimension `2l + 1` of the irrep labelled by `self`.
    pub const fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// Laplacian eigenvalue `l(l+1)`.
    pub fn casimir(self) -> f64 {
        let l = self.value();
        l * (l + 1.0)
    }

    /// Weights `m = -l, -l+1, ..., l` in ascending order.
    pub fn weights(self) -> impl Iterator<Item = f64> + Clone {
        let l = self.value();
        (0..=self.0).map(move |i| i as f64 - l)
    }

    /// All labels `0, 1/2, 1, ..., self`.
    pub fn up_to(self) -> impl Iterator<Item = HalfInt> + Clone {
        (0..=self.0).map(HalfInt)
    }

    pub fn checked_sub_half(self) -> Option<Self> {
        self.0.checked_sub(1).map(HalfInt)
    }

    pub fn add_half(self) -> Self {
        HalfInt(self.0 + 1)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}
