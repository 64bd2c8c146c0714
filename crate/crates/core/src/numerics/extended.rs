use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{domain, Result};

/// A point of the one-point compactification `ℝ ∪ {∞}`.
///
/// There is a single unsigned infinity; `+inf` and `-inf` both map to it.
#[derive(Clone, Copy, Debug)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub const INFINITY: Self = Self::Infinity;

    /// Wraps a float, mapping `±inf` to [`ExtendedReal::Infinity`].
    ///
    /// # Errors
    /// `NaN` is rejected.
    pub fn new(x: f64) -> Result<Self> {
        if x.is_nan() {
            domain("NaN is not an extended real")
        } else if x.is_infinite() {
            Ok(Self::Infinity)
        } else {
            Ok(Self::Finite(x))
        }
    }

    /// Like [`ExtendedReal::new`] but panics on `NaN`. For values known to be numbers.
    #[must_use]
    pub fn from_f64(x: f64) -> Self {
        Self::new(x).expect("NaN passed where an extended real was required")
    }

    #[must_use]
    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinity)
    }

    #[must_use]
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(x) => Some(x),
            Self::Infinity => None,
        }
    }

    /// `+inf` for the point at infinity.
    #[must_use]
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl PartialEq for ExtendedReal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => a == b,
            (Self::Infinity, Self::Infinity) => true,
            _ => false,
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(x) => write!(f, "{x}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(x) => s.serialize_f64(*x),
            Self::Infinity => s.serialize_str("inf"),
        }
    }
}

/// Cayley map from `ℝ̄` onto the unit circle,
/// `t ↦ (2t/(t²+1), (t²-1)/(t²+1))`, oriented so that increasing `t` runs
/// counter-clockwise.
///
/// `∞ ↦ i`, `0 ↦ -i`, `1 ↦ 1`, `-1 ↦ -1`.
#[must_use]
pub fn cayley(t: ExtendedReal) -> Complex64 {
    match t {
        ExtendedReal::Infinity => Complex64::new(0.0, 1.0),
        ExtendedReal::Finite(t) if t.abs() > 1.0 => {
            let s = 1.0 / t;
            let d = 1.0 + s * s;
            Complex64::new(2.0 * s / d, (1.0 - s * s) / d)
        }
        ExtendedReal::Finite(t) => {
            let d = t * t + 1.0;
            Complex64::new(2.0 * t / d, (t * t - 1.0) / d)
        }
    }
}

/// Inverse of [`cayley`].
///
/// # Errors
/// Points farther than `1e-9` from the unit circle.
pub fn inverse_cayley(u: Complex64) -> Result<ExtendedReal> {
    if u.re.is_nan() || u.im.is_nan() || (u.norm() - 1.0).abs() > 1e-9 {
        return domain(format!("{u} is not on the unit circle"));
    }
    let (x, y) = (u.re, u.im);
    if y > 0.0 {
        if x == 0.0 {
            Ok(ExtendedReal::Infinity)
        } else {
            Ok(ExtendedReal::Finite((1.0 + y) / x))
        }
    } else {
        Ok(ExtendedReal::Finite(x / (1.0 - y)))
    }
}

/// Argument of `cayley(t)` in `[0, 2π)`, via `2·atan(t) - π/2` for finite `t`.
#[must_use]
pub fn cayley_angle(t: ExtendedReal) -> f64 {
    match t {
        ExtendedReal::Infinity => FRAC_PI_2,
        ExtendedReal::Finite(t) => wrap_angle(2.0 * t.atan() - FRAC_PI_2),
    }
}

/// Point of `ℝ̄` whose Cayley image has argument `a`.
#[must_use]
pub fn from_cayley_angle(a: f64) -> ExtendedReal {
    let a = wrap_angle(a);
    if a == FRAC_PI_2 {
        return ExtendedReal::Infinity;
    }
    // a = 2·atan(t) - π/2, atan(t) ∈ (-π/2, π/2)
    let mut h = (a + FRAC_PI_2) / 2.0;
    if h >= FRAC_PI_2 {
        h -= PI;
    }
    let (s, c) = h.sin_cos();
    if c.abs() < f64::MIN_POSITIVE {
        ExtendedReal::Infinity
    } else {
        ExtendedReal::Finite(s / c)
    }
}

/// Reduces an angle to `[0, 2π)`.
#[must_use]
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cayley_reference_points() {
        let cases = [
            (ExtendedReal::Finite(0.0), Complex64::new(0.0, -1.0)),
            (ExtendedReal::Finite(1.0), Complex64::new(1.0, 0.0)),
            (ExtendedReal::Finite(-1.0), Complex64::new(-1.0, 0.0)),
            (ExtendedReal::Infinity, Complex64::new(0.0, 1.0)),
        ];
        for (t, u) in cases {
            assert!((cayley(t) - u).norm() < 1e-15, "cayley({t})");
            assert_eq!(inverse_cayley(u).unwrap(), t);
        }
    }

    #[test]
    fn infinities_collapse_and_nan_rejected() {
        assert!(ExtendedReal::new(f64::INFINITY).unwrap().is_infinite());
        assert!(ExtendedReal::new(f64::NEG_INFINITY).unwrap().is_infinite());
        assert!(ExtendedReal::new(f64::NAN).is_err());
    }

    #[test]
    fn off_circle_rejected() {
        assert!(inverse_cayley(Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn huge_arguments_stay_accurate() {
        let u = cayley(ExtendedReal::Finite(1e200));
        assert!((u - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((u.norm() - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn cayley_round_trip(t in -1e6f64..1e6) {
            let back = inverse_cayley(cayley(t.into())).unwrap().finite().unwrap();
            prop_assert!((back - t).abs() <= 1e-12 * (1.0 + t * t));
        }

        #[test]
        fn angle_round_trip(t in -1e4f64..1e4) {
            let back = from_cayley_angle(cayley_angle(t.into())).finite().unwrap();
            prop_assert!((back - t).abs() <= 1e-12 * (1.0 + t * t));
        }

        #[test]
        fn angle_matches_argument(t in -1e3f64..1e3) {
            let u = cayley(t.into());
            let d = wrap_angle(u.arg() - cayley_angle(t.into()));
            prop_assert!(d.min(TAU - d) < 1e-12);
        }

        #[test]
        fn orientation_is_counter_clockwise(t in -100.0f64..100.0, h in 1e-3f64..1.0) {
            let a = cayley_angle(t.into());
            let b = cayley_angle((t + h).into());
            let step = wrap_angle(b - a);
            prop_assert!(step > 0.0 && step < PI);
        }
    }
}
