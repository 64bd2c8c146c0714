use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::ExtendedReal;

/// Starting truncation for [`green_00`].
pub const GREEN_START: usize = 64;
/// Largest truncation tried before giving up.
pub const GREEN_MAX: usize = 1 << 21;
/// Relative change between doublings accepted as converged.
pub const GREEN_TOL: f64 = 1e-9;

/// `|1/G|` below this is reported as pole proximity.
const POLE_GUARD: f64 = 1e-10;

/// Converged diagonal Green's function value at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GreenValue {
    pub value: f64,
    pub n_used: usize,
}

fn half_line(v: &impl Fn(i64) -> ExtendedReal, lambda: f64, n: usize, sign: i64) -> f64 {
    let mut g = 0.0;
    for k in (1..=n as i64).rev() {
        g = match v(sign * k) {
            ExtendedReal::Infinity => 0.0,
            ExtendedReal::Finite(x) => 1.0 / (x - lambda - g),
        };
    }
    g
}

/// `⟨δ₀, (H_N - λ)⁻¹ δ₀⟩` for the operator restricted to `[-N, N]`, by
/// continued fractions from both ends. `V(0) = ∞` gives 0.
///
/// # Errors
/// `|1/G|` below `1e-10` (λ sits on a pole of the truncation).
pub fn green_00_truncated(v: &impl Fn(i64) -> ExtendedReal, lambda: f64, n: usize) -> Result<f64> {
    let ExtendedReal::Finite(v0) = v(0) else {
        return Ok(0.0);
    };
    let denom = v0 - lambda - half_line(v, lambda, n, 1) - half_line(v, lambda, n, -1);
    if denom.abs() < POLE_GUARD || !denom.is_finite() {
        return Err(Error::PoleProximity { lambda, distance: denom.abs() });
    }
    Ok(1.0 / denom)
}

/// `G(0, 0; λ)` of the whole-line operator: truncations are doubled from
/// [`GREEN_START`] until successive values agree to [`GREEN_TOL`].
///
/// # Errors
/// No convergence by [`GREEN_MAX`] (typically `λ` in the spectrum), or pole proximity.
pub fn green_00(v: &impl Fn(i64) -> ExtendedReal, lambda: f64) -> Result<GreenValue> {
    let mut n = GREEN_START;
    let mut prev = green_00_truncated(v, lambda, n)?;
    while n < GREEN_MAX {
        n *= 2;
        let cur = green_00_truncated(v, lambda, n)?;
        if (cur - prev).abs() <= GREEN_TOL * cur.abs().max(1.0) {
            return Ok(GreenValue { value: cur, n_used: n });
        }
        prev = cur;
    }
    Err(Error::NotConverged(format!("Green's function at {lambda}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_green_function() {
        let v = |_: i64| ExtendedReal::Finite(0.0);
        for lambda in [2.5, -3.0, 10.0] {
            let g = green_00(&v, lambda).unwrap().value;
            let exact = -lambda.signum() / (lambda * lambda - 4.0).sqrt();
            assert!((g - exact).abs() < 1e-9, "{lambda}: {g} vs {exact}");
        }
    }

    #[test]
    fn spectrum_does_not_converge() {
        let v = |_: i64| ExtendedReal::Finite(0.0);
        assert!(matches!(green_00(&v, 0.5), Err(Error::NotConverged(_)) | Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn infinite_origin() {
        let v = |n: i64| if n == 0 { ExtendedReal::Infinity } else { ExtendedReal::Finite(0.0) };
        assert_eq!(green_00(&v, 3.0).unwrap().value, 0.0);
    }

    #[test]
    fn matches_dense_resolvent() {
        let v = |n: i64| ExtendedReal::Finite((n as f64 * 0.9).cos() * 2.0);
        let n = 30usize;
        let diag: Vec<f64> = (-(n as i64)..=n as i64).map(|k| v(k).finite().unwrap()).collect();
        let m = crate::oracle::tridiagonal_matrix(&diag, &vec![1.0; 2 * n]);
        let lambda = 7.3;
        let shifted = m - nalgebra::DMatrix::identity(2 * n + 1, 2 * n + 1) * lambda;
        let inv = shifted.try_inverse().unwrap();
        let g = green_00_truncated(&v, lambda, n).unwrap();
        assert!((g - inv[(n, n)]).abs() < 1e-12);
    }
}
