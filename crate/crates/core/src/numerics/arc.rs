use std::f64::consts::TAU;

use serde::Serialize;

use super::extended::{cayley_angle, from_cayley_angle, wrap_angle, ExtendedReal};

/// Closed arc of `ℝ̄` traversed in the positive (counter-clockwise) direction
/// from `start` to `end`.
///
/// `start == end` with `full_circle` set is the whole circle read as
/// `ℝ̄ ∖ {start}` opened up at `start`; without the flag it is a single point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircleArc {
    pub start: ExtendedReal,
    pub end: ExtendedReal,
    pub full_circle: bool,
}

impl CircleArc {
    /// Positive arc from `start` to `end`; equal endpoints give the full circle.
    #[must_use]
    pub fn new(start: ExtendedReal, end: ExtendedReal) -> Self {
        Self { start, end, full_circle: start == end }
    }

    #[must_use]
    pub fn point(t: ExtendedReal) -> Self {
        Self { start: t, end: t, full_circle: false }
    }

    /// Angular length in `[0, 2π]`.
    #[must_use]
    pub fn angular_length(&self) -> f64 {
        if self.full_circle {
            TAU
        } else if self.start == self.end {
            0.0
        } else {
            wrap_angle(cayley_angle(self.end) - cayley_angle(self.start))
        }
    }

    #[must_use]
    pub fn contains_infinity(&self) -> bool {
        self.contains(ExtendedReal::Infinity)
    }

    /// Angular offset of `t` from `start`, if `t` lies on the closed arc.
    #[must_use]
    pub fn offset(&self, t: ExtendedReal) -> Option<f64> {
        let off = wrap_angle(cayley_angle(t) - cayley_angle(self.start));
        let len = self.angular_length();
        (off <= len).then_some(off)
    }

    #[must_use]
    pub fn contains(&self, t: ExtendedReal) -> bool {
        self.offset(t).is_some()
    }

    /// Point at fraction `u ∈ [0, 1]` of the arc, uniform in Cayley arclength.
    #[must_use]
    pub fn point_at(&self, u: f64) -> ExtendedReal {
        if u <= 0.0 {
            return self.start;
        }
        if u >= 1.0 && !self.full_circle {
            return self.end;
        }
        from_cayley_angle(cayley_angle(self.start) + u * self.angular_length())
    }

    /// Fraction `u` with `point_at(u) == t`, if `t` is on the arc.
    #[must_use]
    pub fn fraction_of(&self, t: ExtendedReal) -> Option<f64> {
        let len = self.angular_length();
        if len == 0.0 {
            return (t == self.start).then_some(0.0);
        }
        self.offset(t).map(|o| o / len)
    }

    /// The complementary arc, running from `end` back round to `start`.
    #[must_use]
    pub fn complement(&self) -> Self {
        Self { start: self.end, end: self.start, full_circle: self.start == self.end && !self.full_circle }
    }
}
