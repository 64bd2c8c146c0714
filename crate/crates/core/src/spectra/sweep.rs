use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::block::{finite_sites, Boundary, PeriodicBlock};
use super::set::SpectrumSet;
use super::sites::{site_values, RationalPhase, ThetaLoop};
use super::sturm::ring_eigenvalues;
use crate::error::{domain, Error, Result};
use crate::numerics::{cayley_angle, wrap_angle, ExtendedReal, Rational};
use crate::potentials::Potential;

/// Settings for [`union_spectrum_over_theta`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnionOptions {
    /// Resolution in energy; each eigenvalue contributes `[E - ε, E + ε]`.
    pub epsilon: f64,
    /// Energy window the resolution refers to.
    pub window: (f64, f64),
    /// Initial uniform samples per unit of loop parameter.
    pub samples_per_segment: usize,
    pub max_depth: u32,
    /// Abort once this many samples were taken.
    pub max_samples: usize,
}

impl UnionOptions {
    #[must_use]
    pub fn new(epsilon: f64, window: (f64, f64)) -> Self {
        Self { epsilon, window, samples_per_segment: 16, max_depth: 30, max_samples: 4_000_000 }
    }
}

/// Union of spectra over the loop, thickened by `ε`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnionSpectrum {
    pub set: SpectrumSet,
    pub samples: usize,
}

/// Sorted Cayley angles of all `q` block eigenvalues (infinite ones at `π/2`).
fn angles(values: &[ExtendedReal]) -> (Vec<f64>, Vec<f64>) {
    let spec = PeriodicBlock::new(values.to_vec(), Boundary::Periodic).eigenvalues();
    let mut a: Vec<f64> = spec.finite.iter().map(|&e| cayley_angle(e.into())).collect();
    a.extend(std::iter::repeat_n(cayley_angle(ExtendedReal::Infinity), spec.infinite));
    a.sort_by(f64::total_cmp);
    (a, spec.finite)
}

fn circ(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(TAU - d)
}

/// Bottleneck distance between two equally sized sets of angles, matching
/// sorted lists up to a cyclic shift.
pub(crate) fn cyclic_mismatch(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    if n == 0 || n != b.len() {
        return if n == b.len() { 0.0 } else { PI };
    }
    (0..n)
        .map(|k| (0..n).map(|i| circ(a[i], b[(i + k) % n])).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

struct Sample {
    angles: Vec<f64>,
}

/// `⋃_θ σ(H(θ))` over the rational loop, each eigenvalue thickened by `ε`.
///
/// The loop is sampled uniformly and refined wherever some eigenvalue moves
/// by more than the angular step that corresponds to `ε/2` at the edge of
/// the window. Bands of samples without infinite sites are included as well.
///
/// # Errors
/// Non-positive `ε`, an empty window, or the sample budget exhausted.
pub fn union_spectrum_over_theta(lp: &ThetaLoop, opts: &UnionOptions) -> Result<UnionSpectrum> {
    let n0 = opts.samples_per_segment.max(1) * 2 * lp.rational().q as usize;
    union_along_path(&|tau| lp.values(tau), lp.period(), n0, opts)
}

/// `Σ(p/q) = ⋃_x σ(H(x))` over all phases of the periodic operator with
/// frequency `r`, each eigenvalue thickened by `ε`. Shifting `x` by `1/q`
/// permutes the sites cyclically, so `x ∈ [0, 1/q]` suffices.
///
/// # Errors
/// As for [`union_spectrum_over_theta`].
pub fn union_spectrum_over_phases(f: &Potential, r: Rational, opts: &UnionOptions) -> Result<UnionSpectrum> {
    let values = |u: f64| site_values(f, r, RationalPhase { j: 0, u: u.clamp(0.0, 1.0) }, None).expect("phase offsets lie in [0, 1]");
    union_along_path(&values, 1.0, opts.samples_per_segment.max(1), opts)
}

fn union_along_path(values: &dyn Fn(f64) -> Vec<ExtendedReal>, length: f64, n0: usize, opts: &UnionOptions) -> Result<UnionSpectrum> {
    let (lo, hi) = opts.window;
    if !(opts.epsilon > 0.0) || !(hi > lo) {
        return domain("epsilon must be positive and the window non-empty");
    }
    let e_max = lo.abs().max(hi.abs());
    let delta = opts.epsilon / (1.0 + e_max * e_max);
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut contains_infinity = false;
    let mut samples = 0usize;
    let record = |tau: f64, intervals: &mut Vec<(f64, f64)>, inf: &mut bool| -> Sample {
        let values = values(tau);
        let (angles, finite) = angles(&values);
        if angles.iter().any(|&a| circ(a, cayley_angle(ExtendedReal::Infinity)) <= delta) {
            *inf = true;
        }
        for &e in &finite {
            if e >= lo - opts.epsilon && e <= hi + opts.epsilon {
                intervals.push((e - opts.epsilon, e + opts.epsilon));
            }
        }
        match finite_sites(&values) {
            Ok(v) => {
                let mut edges = finite.clone();
                edges.extend(ring_eigenvalues(&v, -1.0));
                edges.sort_by(f64::total_cmp);
                for c in edges.chunks(2) {
                    if c[1] >= lo && c[0] <= hi {
                        intervals.push((c[0] - opts.epsilon, c[1] + opts.epsilon));
                    }
                }
            }
            Err(_) => *inf = true,
        }
        Sample { angles }
    };
    let h = length / n0 as f64;
    let mut prev = record(0.0, &mut intervals, &mut contains_infinity);
    samples += 1;
    for i in 1..=n0 {
        let t1 = i as f64 * h;
        let next = record(t1, &mut intervals, &mut contains_infinity);
        samples += 1;
        let mut stack = vec![(t1 - h, t1, 0u32, std::mem::replace(&mut prev, Sample { angles: next.angles.clone() }), next)];
        while let Some((a, b, depth, sa, sb)) = stack.pop() {
            if cyclic_mismatch(&sa.angles, &sb.angles) <= delta {
                continue;
            }
            if depth >= opts.max_depth {
                return Err(Error::NotConverged(format!("spectral union refinement near tau = {a}")));
            }
            if samples >= opts.max_samples {
                return Err(Error::NotConverged("spectral union sample budget".into()));
            }
            let m = 0.5 * (a + b);
            let sm = record(m, &mut intervals, &mut contains_infinity);
            samples += 1;
            let sm2 = Sample { angles: sm.angles.clone() };
            stack.push((m, b, depth + 1, sm2, sb));
            stack.push((a, m, depth + 1, sa, sm));
        }
    }
    let set = SpectrumSet::new(intervals, contains_infinity);
    Ok(UnionSpectrum { set, samples })
}
