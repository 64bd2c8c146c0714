use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::{ExtendedReal, Rational};
use crate::potentials::{CircleMapTilde, Potential};

/// Phase `x = (j + u)/q` of a `q`-periodic operator. `u = 1` stands for the
/// left limit at `(j + 1)/q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RationalPhase {
    pub j: u64,
    pub u: f64,
}

impl RationalPhase {
    /// Splits a float phase in `[0, 1)`.
    #[must_use]
    pub fn from_x(x: f64, q: u64) -> Self {
        let y = crate::numerics::frac(x) * q as f64;
        let j = (y.floor() as u64).min(q - 1);
        Self { j, u: (y - j as f64).clamp(0.0, 1.0) }
    }

    #[must_use]
    pub fn x(self, q: u64) -> f64 {
        (self.j as f64 + self.u) / q as f64
    }
}

/// Values `f(x + kα)`, `k = 0 … q-1`, for `α = p/q`, computed from exact
/// residues. When `u = 0` the site with phase exactly 0 gets `jump` if given
/// and `f(0)` otherwise; when `u = 1` the site approaching 1 gets `f(1 - 0)`.
///
/// # Errors
/// `jump` with `u ≠ 0`, or `u ∉ [0, 1]`.
pub fn site_values(f: &Potential, r: Rational, phase: RationalPhase, jump: Option<ExtendedReal>) -> Result<Vec<ExtendedReal>> {
    if !(0.0..=1.0).contains(&phase.u) {
        return domain("phase offset must lie in [0, 1]");
    }
    if jump.is_some() && phase.u != 0.0 {
        return domain("a jump value needs a site with phase exactly 0");
    }
    let q = r.q;
    Ok((0..q)
        .map(|k| {
            let res = (phase.j % q + k % q * r.p) % q;
            if phase.u == 0.0 && res == 0 {
                return jump.unwrap_or_else(|| f.f0());
            }
            let x = (res as f64 + phase.u) / q as f64;
            if x >= 1.0 {
                f.f1m()
            } else {
                f.left_limit(x)
            }
        })
        .collect())
}

/// Where a loop parameter falls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "segment", rename_all = "snake_case")]
pub enum LoopPoint {
    /// Jump segment at phase `j/q`; the zero-phase site takes `φ_A(s)`.
    Gap { j: u64, s: f64 },
    /// Cantor segment `x = (j + u)/q`.
    Cantor { j: u64, u: f64 },
}

/// Closed loop through all `q`-periodic operators of the compactified circle
/// for rational `α`: parameter `τ ∈ [0, 2q)` alternates jump segments and
/// Cantor segments, `[2j, 2j+1)` is the jump at `j/q` and `[2j+1, 2j+2)` the
/// phases between `j/q` and `(j+1)/q`.
#[derive(Clone, Debug)]
pub struct ThetaLoop {
    tilde: CircleMapTilde,
    r: Rational,
}

impl ThetaLoop {
    #[must_use]
    pub fn new(tilde: CircleMapTilde, r: Rational) -> Self {
        Self { tilde, r }
    }

    #[must_use]
    pub fn rational(&self) -> Rational {
        self.r
    }

    #[must_use]
    pub fn tilde(&self) -> &CircleMapTilde {
        &self.tilde
    }

    /// Length `2q` of the parameter interval.
    #[must_use]
    pub fn period(&self) -> f64 {
        2.0 * self.r.q as f64
    }

    #[must_use]
    pub fn point(&self, tau: f64) -> LoopPoint {
        let tau = tau.rem_euclid(self.period());
        let k = (tau.floor() as u64).min(2 * self.r.q - 1);
        let w = (tau - k as f64).clamp(0.0, 1.0);
        if k.is_multiple_of(2) {
            LoopPoint::Gap { j: k / 2, s: w - 1.0 }
        } else {
            LoopPoint::Cantor { j: k / 2, u: w }
        }
    }

    /// Site values of the period block at `τ`.
    #[must_use]
    pub fn values(&self, tau: f64) -> Vec<ExtendedReal> {
        let f = self.tilde.base();
        let res = match self.point(tau) {
            LoopPoint::Gap { j, s } => {
                site_values(f, self.r, RationalPhase { j, u: 0.0 }, Some(self.tilde.phi_arc(s)))
            }
            LoopPoint::Cantor { j, u } => site_values(f, self.r, RationalPhase { j, u }, None),
        };
        res.expect("loop phases are always valid")
    }
}
