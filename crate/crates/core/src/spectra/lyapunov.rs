use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::{frac, ExtendedReal};
use crate::potentials::Potential;

/// Phases closer than this to the jump point are skipped when the potential is singular there.
const SINGULAR_WINDOW: f64 = 1e-12;

/// Mean over random phases of finite-length Lyapunov exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub energy: f64,
    pub mean: f64,
    /// Standard error of the mean over phases (0 for a single phase).
    pub stderr: f64,
    pub n_phases: usize,
    pub n_steps: usize,
    pub skipped_fraction: f64,
    /// False when more than 1% of steps were skipped.
    pub reliable: bool,
}

/// `(1/n) log ‖T_n(E)‖` averaged over `n_phases` phases drawn from a ChaCha
/// stream seeded with `seed`, iterating a unit vector with renormalisation.
///
/// # Errors
/// Zero steps or phases, or `α` outside `(0, 1)`.
pub fn lyapunov(f: &Potential, alpha: f64, energy: f64, n_steps: usize, n_phases: usize, seed: u64) -> Result<LyapunovEstimate> {
    if n_steps == 0 || n_phases == 0 {
        return domain("need at least one step and one phase");
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain("frequency must lie in (0,1)");
    }
    let singular = f.f0().is_infinite() || f.f1m().is_infinite();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rates = Vec::with_capacity(n_phases);
    let mut skipped = 0usize;
    for _ in 0..n_phases {
        let x0: f64 = rng.gen();
        let (mut a, mut b) = (1.0f64, 0.0f64);
        let mut log_norm = 0.0;
        let mut used = 0usize;
        for n in 0..n_steps {
            let x = frac(x0 + n as f64 * alpha);
            if singular && !(SINGULAR_WINDOW..=1.0 - SINGULAR_WINDOW).contains(&x) {
                skipped += 1;
                continue;
            }
            let v = match f.eval(x) {
                ExtendedReal::Finite(v) => v,
                ExtendedReal::Infinity => {
                    skipped += 1;
                    continue;
                }
            };
            (a, b) = ((energy - v) * a - b, a);
            let norm = a.hypot(b);
            log_norm += norm.ln();
            a /= norm;
            b /= norm;
            used += 1;
        }
        rates.push(if used == 0 { 0.0 } else { log_norm / used as f64 });
    }
    let m = rates.len() as f64;
    let mean = rates.iter().sum::<f64>() / m;
    let stderr = if rates.len() > 1 {
        (rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt() / m.sqrt()
    } else {
        0.0
    };
    let skipped_fraction = skipped as f64 / (n_steps * n_phases) as f64;
    Ok(LyapunovEstimate {
        energy,
        mean,
        stderr,
        n_phases,
        n_steps,
        skipped_fraction,
        reliable: skipped_fraction <= 0.01,
    })
}
