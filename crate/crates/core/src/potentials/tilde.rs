use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use super::Potential;
use crate::error::{domain, Error, Result};
use crate::numerics::{cayley_angle, from_cayley_angle, wrap_angle, CircleArc, ExtendedReal};

/// Which of the two arcs joining `f(1 - 0)` to `f(0)` fills the jump.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcChoice {
    /// The arc containing `∞`. When an endpoint is itself `∞`, the
    /// positively oriented arc from `f(1 - 0)` to `f(0)`.
    ThroughInfinity,
    /// The other arc.
    Bounded,
}

/// Extension of `f` to `[-1, 1)`: on `[-1, 0)` it runs along a chosen arc
/// from `f(1 - 0)` to `f(0)` at constant Cayley speed, on `[0, 1)` it is `f`.
#[derive(Clone, Debug)]
pub struct CircleMapTilde {
    base: Potential,
    arc: CircleArc,
    forward: bool,
}

impl CircleMapTilde {
    /// # Errors
    /// `f(0) = f(1 - 0)`; use [`CircleMapTilde::closed`] for such maps.
    pub fn new(base: &Potential, choice: ArcChoice) -> Result<Self> {
        let (a, b) = (base.f1m(), base.f0());
        if a == b {
            return domain("potential has no jump at 0; use the closed circle map");
        }
        let forward_through_infinity = match (a, b) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a > b,
            _ => true,
        };
        let forward = forward_through_infinity == (choice == ArcChoice::ThroughInfinity);
        let arc = if forward { CircleArc::new(a, b) } else { CircleArc::new(b, a) };
        Ok(Self { base: base.clone(), arc, forward })
    }

    /// Circle map of a potential with `f(0) = f(1 - 0)`; the jump arc is a single point.
    ///
    /// # Errors
    /// The potential has a jump.
    pub fn closed(base: &Potential) -> Result<Self> {
        if base.f0() != base.f1m() {
            return domain("potential has a jump at 0");
        }
        Ok(Self { base: base.clone(), arc: CircleArc::point(base.f0()), forward: true })
    }

    /// [`CircleMapTilde::new`] when the potential jumps, otherwise [`CircleMapTilde::closed`].
    ///
    /// # Errors
    /// Never for potentials built by this crate; kept fallible for symmetry.
    pub fn for_potential(base: &Potential, choice: ArcChoice) -> Result<Self> {
        if base.f0() == base.f1m() {
            Self::closed(base)
        } else {
            Self::new(base, choice)
        }
    }

    #[must_use]
    pub fn base(&self) -> &Potential {
        &self.base
    }

    /// The jump arc, positively oriented.
    #[must_use]
    pub fn arc(&self) -> CircleArc {
        self.arc
    }

    /// Whether `φ_A` runs along the arc in the positive direction.
    #[must_use]
    pub fn forward(&self) -> bool {
        self.forward
    }

    /// Signed angular displacement of `φ_A` over `s ∈ [-1, 0]`.
    fn sweep(&self) -> f64 {
        let len = self.arc.angular_length();
        if self.forward {
            len
        } else {
            -len
        }
    }

    /// `φ_A(s)` for `s ∈ [-1, 0]`: `φ_A(-1) = f(1 - 0)`, `φ_A(0) = f(0)`.
    #[must_use]
    pub fn phi_arc(&self, s: f64) -> ExtendedReal {
        if s <= -1.0 {
            return self.base.f1m();
        }
        if s >= 0.0 || self.arc.angular_length() == 0.0 {
            return self.base.f0();
        }
        from_cayley_angle(cayley_angle(self.base.f1m()) + (s + 1.0) * self.sweep())
    }

    /// `s ∈ [-1, 0]` with `φ_A(s) = t`, if `t` lies on the arc.
    #[must_use]
    pub fn phi_arc_inverse(&self, t: ExtendedReal) -> Option<f64> {
        let len = self.arc.angular_length();
        if len == 0.0 {
            return (t == self.base.f0()).then_some(0.0);
        }
        let start = cayley_angle(self.base.f1m());
        let off = if self.forward {
            wrap_angle(cayley_angle(t) - start)
        } else {
            wrap_angle(start - cayley_angle(t))
        };
        if t == self.base.f1m() {
            return Some(-1.0);
        }
        (off <= len + 1e-15).then(|| (-1.0 + off / len).min(0.0))
    }

    /// `f̃(y)` for `y ∈ [-1, 1]`, with `f̃(1) = f(1 - 0)`.
    #[must_use]
    pub fn eval(&self, y: f64) -> ExtendedReal {
        if y < 0.0 {
            self.phi_arc(y)
        } else if y >= 1.0 {
            self.base.f1m()
        } else {
            self.base.eval(y)
        }
    }

    /// Topological degree of `f̃` as a map of the circle `[-1, 1]/{±1}` to `ℝ̄`.
    ///
    /// The Cayley phase is unwrapped over `samples` uniform steps; any step of
    /// at least `π/2` is bisected recursively.
    ///
    /// # Errors
    /// Fewer than 64 samples, or a step that stays large after 40 bisections.
    pub fn degree(&self, samples: usize) -> Result<i64> {
        if samples < 64 {
            return domain("degree needs at least 64 samples");
        }
        let mut total = 0.0;
        let mut prev_y = -1.0;
        let mut prev_a = cayley_angle(self.eval(prev_y));
        for i in 1..=samples {
            let y = -1.0 + 2.0 * i as f64 / samples as f64;
            let a = cayley_angle(self.eval(y));
            total += self.unwrap_step(prev_y, prev_a, y, a, 0)?;
            prev_y = y;
            prev_a = a;
        }
        let w = total / TAU;
        let rounded = w.round();
        if (w - rounded).abs() > 0.25 {
            return Err(Error::Consistency(format!("winding {w} is not close to an integer")));
        }
        Ok(rounded as i64)
    }

    fn unwrap_step(&self, y0: f64, a0: f64, y1: f64, a1: f64, depth: u32) -> Result<f64> {
        let mut d = wrap_angle(a1 - a0);
        if d > PI {
            d -= TAU;
        }
        if d.abs() < FRAC_PI_2 {
            return Ok(d);
        }
        if depth >= 40 {
            return Err(Error::UnresolvedPhase(format!("f̃ near y = {y0}")));
        }
        let ym = 0.5 * (y0 + y1);
        let am = cayley_angle(self.eval(ym));
        Ok(self.unwrap_step(y0, a0, ym, am, depth + 1)? + self.unwrap_step(ym, am, y1, a1, depth + 1)?)
    }
}
