//! Reals of iterated-exponential size.
//!
//! Digits such as `ceil(exp(exp(21)))` are far outside any floating range. An
//! [`ExtReal`] stores `exp^k(top)`: level 0 is an ordinary double, and a level
//! `k >= 1` value keeps `top` above `ln(f64::MAX)` so the representation is
//! canonical. Arithmetic is exact in the double sense at level 0 and keeps
//! the leading magnitude at higher levels.

use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

const LN_MAX: f64 = 709.782712893384;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal {
    level: u32,
    top: f64,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal { level: 0, top: 0.0 };
    pub const ONE: ExtReal = ExtReal { level: 0, top: 1.0 };

    pub fn new(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtReal {
                level: u32::MAX,
                top: f64::INFINITY,
            }
        } else {
            ExtReal { level: 0, top: x }
        }
    }

    pub fn infinity() -> Self {
        Self::new(f64::INFINITY)
    }

    /// `exp^k(top)` in canonical form.
    pub fn tower(level: u32, top: f64) -> Self {
        let mut v = ExtReal::new(top);
        for _ in 0..level {
            v = v.exp();
        }
        v
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    pub fn is_infinite(&self) -> bool {
        self.level == u32::MAX
    }

    /// The double value, `+inf` above the double range.
    pub fn to_f64(&self) -> f64 {
        if self.level == 0 {
            self.top
        } else {
            f64::INFINITY
        }
    }

    /// True when the value fits in a double.
    pub fn is_f64(&self) -> bool {
        self.level == 0
    }

    pub fn exp(self) -> Self {
        if self.is_infinite() {
            return self;
        }
        if self.level == 0 {
            if self.top <= LN_MAX {
                ExtReal::new(self.top.exp())
            } else {
                ExtReal {
                    level: 1,
                    top: self.top,
                }
            }
        } else {
            ExtReal {
                level: self.level + 1,
                top: self.top,
            }
        }
    }

    /// Natural logarithm of a positive value.
    pub fn ln(self) -> Self {
        if self.is_infinite() {
            return self;
        }
        match self.level {
            0 => ExtReal::new(self.top.ln()),
            1 => ExtReal::new(self.top),
            k => ExtReal {
                level: k - 1,
                top: self.top,
            },
        }
    }

    pub fn neg_f64(self) -> Option<Self> {
        (self.level == 0).then(|| ExtReal::new(-self.top))
    }

    pub fn add(self, other: Self) -> Self {
        if self.is_infinite() || other.is_infinite() {
            return ExtReal::infinity();
        }
        if self.level == 0 && other.level == 0 {
            let s = self.top + other.top;
            if s.is_finite() {
                return ExtReal::new(s);
            }
            // Both large and positive.
            let (a, b) = if self.top >= other.top {
                (self.top, other.top)
            } else {
                (other.top, self.top)
            };
            return ExtReal::new(a.ln() + (b / a).ln_1p()).exp();
        }
        let (hi, lo) = if self >= other {
            (self, other)
        } else {
            (other, self)
        };
        if hi.level >= 2 {
            // The smaller summand is below the resolution of `hi`.
            return hi;
        }
        // hi.level == 1, lo at level 0 or 1.
        let ratio = if lo.level == 1 {
            (lo.top - hi.top).exp()
        } else if lo.top == 0.0 {
            0.0
        } else {
            lo.top.signum() * (lo.top.abs().ln() - hi.top).exp()
        };
        ExtReal::new(hi.top + ratio.ln_1p()).exp()
    }

    /// `self - other` for `self >= other >= 0`; where the difference is below
    /// the resolution of the representation, returns the conservative lower
    /// bound zero.
    pub fn sub_lower(self, other: Self) -> Self {
        if other.level == 0 {
            return self.add(ExtReal::new(-other.top)).max(ExtReal::ZERO);
        }
        if self.is_infinite() {
            return self;
        }
        if self.level > other.level + 1 || (self.level > other.level && self.level >= 2) {
            return self;
        }
        if self.level == 1 && other.level == 1 {
            let r = (other.top - self.top).exp();
            if r >= 1.0 {
                return ExtReal::ZERO;
            }
            return ExtReal::new(self.top + (-r).ln_1p()).exp();
        }
        if self.level == 2 && other.level == 1 {
            return self;
        }
        ExtReal::ZERO
    }

    /// Product of two nonnegative values.
    pub fn mul(self, other: Self) -> Self {
        if self.level == 0 && other.level == 0 {
            let p = self.top * other.top;
            if p.is_finite() {
                return ExtReal::new(p);
            }
        }
        if self == ExtReal::ZERO || other == ExtReal::ZERO {
            return ExtReal::ZERO;
        }
        self.ln().add(other.ln()).exp()
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.level, other.level) {
            (0, 0) => self.top.partial_cmp(&other.top),
            (a, b) if a != b => Some(a.cmp(&b)),
            _ => self.top.partial_cmp(&other.top),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::new(x)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level {
            0 => write!(f, "{}", self.top),
            u32::MAX => write!(f, "inf"),
            1 => write!(f, "exp({})", self.top),
            k => write!(f, "exp^{}({})", k, self.top),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.level == 0 && self.top.is_finite() {
            s.serialize_f64(self.top)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}
