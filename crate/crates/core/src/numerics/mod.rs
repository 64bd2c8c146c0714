//! Extended reals, the Cayley map, arcs on `ℝ̄` and frequency utilities.

mod arc;
mod extended;
mod frequency;

pub use arc::CircleArc;
pub use extended::{cayley, cayley_angle, from_cayley_angle, inverse_cayley, wrap_angle, ExtendedReal};
pub use frequency::{
    beta_estimate, continued_fraction, diophantine_probe, BetaEstimate, ContinuedFraction,
    DiophantineReport, Frequency, Rational,
};

/// Fractional part in `[0, 1)`.
#[must_use]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Distance from `x` to the nearest integer.
#[must_use]
pub fn dist_to_integer(x: f64) -> f64 {
    let f = frac(x);
    f.min(1.0 - f)
}
