use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::{cayley_angle, ExtendedReal};
use crate::spectra::{Boundary, PeriodicBlock, ThetaLoop};

/// Bisection depth allowed per initial step in [`det_winding`].
pub const WINDING_MAX_DEPTH: u32 = 40;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindingReport {
    pub winding: i64,
    /// Unwrapped phase change divided by `2π`, before rounding.
    pub raw: f64,
    pub samples: usize,
    pub max_step: f64,
}

/// `arg det U(τ)`, where `U` is the Cayley transform of the periodic block:
/// the sum of the Cayley angles of its eigenvalues, `∞` counted at `π/2`.
fn det_phase(values: &[ExtendedReal]) -> f64 {
    let spec = PeriodicBlock::new(values.to_vec(), Boundary::Periodic).eigenvalues();
    let s: f64 = spec.finite.iter().map(|&e| cayley_angle(e.into())).sum::<f64>() + spec.infinite as f64 * FRAC_PI_2;
    s.rem_euclid(TAU)
}

fn step(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Winding number of `τ ↦ det U(τ)` once around the loop.
///
/// Starts from `max(min_samples, 16q)` uniform samples and bisects every
/// step whose phase increment is not below `π/2`.
///
/// # Errors
/// Too few samples requested, or a step still too large after
/// [`WINDING_MAX_DEPTH`] bisections.
pub fn det_winding(lp: &ThetaLoop, min_samples: usize) -> Result<WindingReport> {
    let q = lp.rational().q as usize;
    if min_samples == 0 {
        return domain("at least one sample is required");
    }
    let n0 = min_samples.max(16 * q);
    let h = lp.period() / n0 as f64;
    let phase = |tau: f64| det_phase(&lp.values(tau));
    let mut total = 0.0;
    let mut max_step = 0.0f64;
    let mut samples = 1usize;
    let mut prev = phase(0.0);
    for i in 1..=n0 {
        let t1 = i as f64 * h;
        let p1 = if i == n0 { phase(0.0) } else { phase(t1) };
        samples += 1;
        let mut stack = vec![(t1 - h, t1, prev, p1, 0u32)];
        while let Some((a, b, pa, pb, depth)) = stack.pop() {
            let d = step(pa, pb);
            if d.abs() < FRAC_PI_2 {
                total += d;
                max_step = max_step.max(d.abs());
                continue;
            }
            if depth >= WINDING_MAX_DEPTH {
                return Err(Error::UnresolvedPhase(format!("phase step {d:.3} between tau = {a} and {b}")));
            }
            let m = 0.5 * (a + b);
            let pm = phase(m);
            samples += 1;
            stack.push((m, b, pm, pb, depth + 1));
            stack.push((a, m, pa, pm, depth + 1));
        }
        prev = p1;
    }
    let raw = total / TAU;
    Ok(WindingReport { winding: raw.round() as i64, raw, samples, max_step })
}
