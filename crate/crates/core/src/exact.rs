//! Exact rational thresholds for comparisons against counts.
//!
//! Scales such as `κ`, `s`, `ε` arrive as decimals. They are converted once to
//! the simplest rational within `1e-12` so that comparisons like
//! `hamming / n < κ` are decided in integers and never tie-break on rounding.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Scale(Ratio<i64>);

impl Scale {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Config("zero denominator".into()));
        }
        Ok(Scale(Ratio::new(num, den)))
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::Domain { value: x, domain: "finite reals" });
        }
        let r = simplest_within(x, 1e-12)
            .ok_or(Error::Domain { value: x, domain: "rationals with denominator < 2^40" })?;
        Ok(Scale(r))
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_negative(&self) -> bool {
        self.0 < Ratio::zero()
    }

    /// `count / n < self`
    pub fn exceeds_fraction(&self, count: usize, n: usize) -> bool {
        (count as i128) * (*self.0.denom() as i128) < (*self.0.numer() as i128) * (n as i128)
    }

    /// `count / n <= self`
    pub fn at_least_fraction(&self, count: usize, n: usize) -> bool {
        (count as i128) * (*self.0.denom() as i128) <= (*self.0.numer() as i128) * (n as i128)
    }

    /// `floor(self * n)` for nonnegative scales.
    pub fn floor_times(&self, n: usize) -> i64 {
        let v = (*self.0.numer() as i128) * (n as i128);
        v.div_euclid(*self.0.denom() as i128) as i64
    }

    /// `ceil(self * n)`
    pub fn ceil_times(&self, n: usize) -> i64 {
        let v = (*self.0.numer() as i128) * (n as i128);
        let d = *self.0.denom() as i128;
        (-((-v).div_euclid(d))) as i64
    }

    pub fn add(&self, other: Scale) -> Scale {
        Scale(self.0 + other.0)
    }

    pub fn sub(&self, other: Scale) -> Scale {
        Scale(self.0 - other.0)
    }

    pub fn mul_int(&self, k: i64) -> Scale {
        Scale(self.0 * k)
    }

    pub fn div_int(&self, k: i64) -> Scale {
        Scale(self.0 / k)
    }
}

impl TryFrom<f64> for Scale {
    type Error = Error;
    fn try_from(x: f64) -> Result<Self> {
        Scale::from_f64(x)
    }
}

impl From<Scale> for f64 {
    fn from(s: Scale) -> f64 {
        s.to_f64()
    }
}

impl std::fmt::Display for Scale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Continued-fraction search for the simplest fraction within `tol` of `x`.
fn simplest_within(x: f64, tol: f64) -> Option<Ratio<i64>> {
    let sign = if x < 0.0 { -1 } else { 1 };
    let ax = x.abs();
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rest = ax;
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > (1i128 << 40) {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if ((h1 as f64) / (k1 as f64) - ax).abs() <= tol {
            return Some(Ratio::new(sign * h1 as i64, k1 as i64));
        }
        let frac = rest - a;
        if frac <= 0.0 {
            break;
        }
        rest = 1.0 / frac;
    }
    if k1 > 0 && ((h1 as f64) / (k1 as f64) - ax).abs() <= tol {
        Some(Ratio::new(sign * h1 as i64, k1 as i64))
    } else {
        None
    }
}
