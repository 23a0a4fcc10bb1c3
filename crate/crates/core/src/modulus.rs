//! Nonnegative extended reals used for every modulus and distance.

use std::cmp::Ordering;
use std::fmt;

/// A value in `[0, +∞]`.
///
/// `+∞` is a genuine state (a calmness modulus can be infinite), never a
/// sentinel float. The supremum of an empty family is `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModulusValue {
    Finite(f64),
    Infinite,
}

impl ModulusValue {
    pub const ZERO: ModulusValue = ModulusValue::Finite(0.0);

    /// Wraps a finite nonnegative number. Tiny negative round-off is clamped
    /// to zero; NaN and genuinely negative inputs panic.
    pub fn finite(v: f64) -> Self {
        assert!(!v.is_nan(), "modulus value is NaN");
        if v == f64::INFINITY {
            return ModulusValue::Infinite;
        }
        assert!(v >= -1e-12, "modulus value {v} is negative");
        ModulusValue::Finite(v.max(0.0))
    }

    /// `d⁻¹` with `d(x, ∅) = +∞ ↦ 0` and `0 ↦ +∞`.
    pub fn reciprocal(self) -> Self {
        match self {
            ModulusValue::Infinite => ModulusValue::ZERO,
            ModulusValue::Finite(0.0) => ModulusValue::Infinite,
            ModulusValue::Finite(d) => ModulusValue::Finite(1.0 / d),
        }
    }

    /// `num / den` with the `0/0 := 0` convention.
    pub fn ratio(num: f64, den: f64) -> Self {
        if num <= 0.0 {
            ModulusValue::ZERO
        } else if den <= 0.0 {
            ModulusValue::Infinite
        } else {
            ModulusValue::finite(num / den)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ModulusValue::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }

    /// The value as an `f64` (`f64::INFINITY` for `+∞`).
    pub fn value(self) -> f64 {
        match self {
            ModulusValue::Finite(v) => v,
            ModulusValue::Infinite => f64::INFINITY,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Supremum with `sup ∅ := 0`.
    pub fn sup<I: IntoIterator<Item = ModulusValue>>(iter: I) -> Self {
        iter.into_iter().fold(ModulusValue::ZERO, ModulusValue::max)
    }

    /// Relative agreement within `rel_tol` (two infinities agree).
    pub fn approx_eq(self, other: Self, rel_tol: f64) -> bool {
        match (self, other) {
            (ModulusValue::Infinite, ModulusValue::Infinite) => true,
            (ModulusValue::Finite(a), ModulusValue::Finite(b)) => {
                (a - b).abs() <= rel_tol * a.abs().max(b.abs()).max(1.0)
            }
            _ => false,
        }
    }
}

impl Default for ModulusValue {
    fn default() -> Self {
        ModulusValue::ZERO
    }
}

impl From<f64> for ModulusValue {
    fn from(v: f64) -> Self {
        ModulusValue::finite(v)
    }
}

impl PartialOrd for ModulusValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ModulusValue::Infinite, ModulusValue::Infinite) => Some(Ordering::Equal),
            (ModulusValue::Infinite, _) => Some(Ordering::Greater),
            (_, ModulusValue::Infinite) => Some(Ordering::Less),
            (ModulusValue::Finite(a), ModulusValue::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ModulusValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModulusValue::Finite(v) => write!(f, "{v}"),
            ModulusValue::Infinite => f.write_str("+inf"),
        }
    }
}
