//! Extended-exponent reals.
//!
//! Points far out along a geodesic ray sit at Euclidean distance `~e^{-2t}`
//! from the boundary. For `t` in the thousands that underflows `f64`, while
//! the quantities the Hilbert metric needs (facet slacks, chord extents and
//! their logarithms) stay perfectly well conditioned. [`ExtReal`] keeps a
//! normalized `f64` mantissa next to an `i64` binary exponent so those
//! quantities can be carried with full relative precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// `mant * 2^exp` with `0.5 <= |mant| < 1`, or exactly zero.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtReal {
    mant: f64,
    exp: i64,
}

/// Alignment gap beyond which the smaller addend cannot affect the sum.
const ABSORB_BITS: i64 = 64;

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    if raw_exp == 0 {
        // subnormal: rescale into the normal range first
        let (m, e) = frexp(x * f64::powi(2.0, 64));
        return (m, e - 64);
    }
    let exp = raw_exp - 1022;
    let mant_bits = (bits & !(0x7ff << 52)) | (1022 << 52);
    (f64::from_bits(mant_bits), exp)
}

fn ldexp(m: f64, e: i64) -> f64 {
    if e > 2000 {
        return m * f64::INFINITY;
    }
    if e < -2200 {
        return m * 0.0;
    }
    // split to stay inside powi's exact range
    let mut x = m;
    let mut e = e;
    while e > 1000 {
        x *= f64::powi(2.0, 1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= f64::powi(2.0, -1000);
        e += 1000;
    }
    x * f64::powi(2.0, e as i32)
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal { mant: 0.0, exp: 0 };
    pub const ONE: ExtReal = ExtReal { mant: 0.5, exp: 1 };

    fn normalized(mant: f64, exp: i64) -> ExtReal {
        if mant == 0.0 {
            return ExtReal::ZERO;
        }
        let (m, e) = frexp(mant);
        ExtReal { mant: m, exp: exp + e }
    }

    /// Non-finite inputs are rejected by the caller; NaN maps to NaN mantissa.
    pub fn from_f64(x: f64) -> ExtReal {
        ExtReal::normalized(x, 0)
    }

    pub fn to_f64(self) -> f64 {
        ldexp(self.mant, self.exp)
    }

    /// `e^x` for any finite `x`, including arguments far outside `f64` range.
    pub fn exp(x: f64) -> ExtReal {
        let k = (x / std::f64::consts::LN_2).floor();
        let r = x - k * std::f64::consts::LN_2;
        ExtReal::normalized(r.exp(), k as i64)
    }

    /// Natural logarithm of a positive value.
    pub fn ln(self) -> f64 {
        self.mant.ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    /// `ln(1 + x)` for `x > -1`, accurate both for tiny and huge `x`.
    pub fn ln_1p(self) -> f64 {
        if self.exp < -60 {
            self.to_f64()
        } else if self.exp > 60 {
            self.ln() + (1.0 / self).to_f64()
        } else {
            self.to_f64().ln_1p()
        }
    }

    pub fn abs(self) -> ExtReal {
        ExtReal { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn is_zero(self) -> bool {
        self.mant == 0.0
    }

    pub fn is_positive(self) -> bool {
        self.mant > 0.0
    }

    pub fn is_negative(self) -> bool {
        self.mant < 0.0
    }

    pub fn is_finite(self) -> bool {
        self.mant.is_finite()
    }

    pub fn sqrt(self) -> ExtReal {
        if self.exp % 2 == 0 {
            ExtReal::normalized(self.mant.sqrt(), self.exp / 2)
        } else {
            ExtReal::normalized((self.mant * 2.0).sqrt(), (self.exp - 1) / 2)
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let log10 = self.abs().ln() / std::f64::consts::LN_10;
        let e10 = log10.floor();
        let m10 = 10f64.powf(log10 - e10) * self.mant.signum();
        write!(f, "{m10:.15}e{e10}")
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exp >= rhs.exp { (self, rhs) } else { (rhs, self) };
        let gap = big.exp - small.exp;
        if gap > ABSORB_BITS {
            return big;
        }
        ExtReal::normalized(big.mant + ldexp(small.mant, -gap), big.exp)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal { mant: -self.mant, exp: self.exp }
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: ExtReal) -> ExtReal {
        self + (-rhs)
    }
}

impl Mul for ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: ExtReal) -> ExtReal {
        ExtReal::normalized(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Div for ExtReal {
    type Output = ExtReal;
    fn div(self, rhs: ExtReal) -> ExtReal {
        if rhs.is_zero() {
            return ExtReal::from_f64(self.mant / 0.0);
        }
        ExtReal::normalized(self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl Mul<f64> for ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: f64) -> ExtReal {
        self * ExtReal::from_f64(rhs)
    }
}

impl Div<ExtReal> for f64 {
    type Output = ExtReal;
    fn div(self, rhs: ExtReal) -> ExtReal {
        ExtReal::from_f64(self) / rhs
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &ExtReal) -> Option<Ordering> {
        let sa = self.mant.partial_cmp(&0.0)?;
        let sb = other.mant.partial_cmp(&0.0)?;
        if sa != sb {
            return sa.partial_cmp(&sb);
        }
        if sa == Ordering::Equal {
            return Some(Ordering::Equal);
        }
        let magnitude = match self.exp.cmp(&other.exp) {
            Ordering::Equal => self.mant.abs().partial_cmp(&other.mant.abs())?,
            ord => ord,
        };
        Some(if sa == Ordering::Less { magnitude.reverse() } else { magnitude })
    }
}
