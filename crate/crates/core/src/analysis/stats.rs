use serde::Serialize;

use super::hausdorff::{hausdorff_distance, Metric};
use crate::error::{domain, Result};
use crate::numerics::{Frequency, Rational};
use crate::potentials::Potential;
use crate::spectra::{
    periodic_spectrum, site_values, union_spectrum_over_phases, union_spectrum_over_theta, RationalPhase, SpectrumSet, ThetaLoop,
    UnionOptions,
};

/// Largest period [`cantor_trend`] will diagonalise.
pub const BAND_SOLVER_CAP: u64 = 4096;

/// Shape of a spectral set inside a window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandStatistics {
    pub band_count: usize,
    pub total_measure: f64,
    pub max_band_length: f64,
    /// Shortest gap between two bands inside the window; `None` with fewer
    /// than two bands.
    pub min_gap_length: Option<f64>,
    /// `total_measure` over the window length.
    pub covered_fraction: f64,
}

/// # Errors
/// A window that is not a finite interval with `lo < hi`.
pub fn band_stats(s: &SpectrumSet, window: (f64, f64)) -> Result<BandStatistics> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return domain("window must be a finite non-empty interval");
    }
    let c = s.clip(lo, hi);
    let iv = c.intervals();
    let total_measure = c.measure();
    Ok(BandStatistics {
        band_count: iv.len(),
        total_measure,
        max_band_length: iv.iter().map(|(a, b)| b - a).fold(0.0, f64::max),
        min_gap_length: c.gaps().iter().map(|(a, b)| b - a).reduce(f64::min),
        covered_fraction: total_measure / (hi - lo),
    })
}

/// One approximant in a [`cantor_trend`] table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendRow {
    pub p: u64,
    pub q: u64,
    pub stats: BandStatistics,
    /// Hausdorff distance (chordal) to the previous row's spectrum.
    pub hausdorff_to_previous: Option<f64>,
    /// Fraction of the energy grid (spacing `ε`) within `ε` of the union of
    /// the approximant spectra over all phases.
    pub phase_union_coverage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CantorTrend {
    pub rows: Vec<TrendRow>,
    /// Rows dropped because `q` exceeded [`BAND_SOLVER_CAP`].
    pub truncated: bool,
    pub max_band_length_decreasing: bool,
    pub hausdorff_decreasing: bool,
}

/// Band statistics of the periodic approximants `p_k/q_k` of `α` at phase
/// `x`, restricted to `window`, together with the grid coverage of their
/// unions over phases at resolution `epsilon`.
///
/// # Errors
/// Fewer than three convergents, a rational `α`, a bad window or `ε`.
pub fn cantor_trend(
    f: &Potential,
    x: f64,
    alpha: &Frequency,
    convergents: &[(u64, u64)],
    window: (f64, f64),
    epsilon: f64,
) -> Result<CantorTrend> {
    if alpha.is_rational() {
        return domain("cantor trend needs an irrational frequency");
    }
    if convergents.len() < 3 {
        return domain("at least three convergents are required");
    }
    let mut rows: Vec<TrendRow> = Vec::new();
    let mut truncated = false;
    let mut prev: Option<SpectrumSet> = None;
    for &(p, q) in convergents {
        if q > BAND_SOLVER_CAP {
            truncated = true;
            break;
        }
        let r = Rational::new(p, q)?;
        let values = site_values(f, r, RationalPhase::from_x(x, r.q), None)?;
        let s = periodic_spectrum(&values);
        let stats = band_stats(&s, window)?;
        let hausdorff_to_previous = match &prev {
            Some(ps) if !ps.is_empty() && !s.is_empty() => Some(hausdorff_distance(ps, &s, Metric::Chordal)?),
            _ => None,
        };
        let union = union_spectrum_over_phases(f, r, &UnionOptions::new(epsilon, window))?;
        let phase_union_coverage = grid_coverage(&union.set, window, epsilon).0;
        rows.push(TrendRow { p: r.p, q: r.q, stats, hausdorff_to_previous, phase_union_coverage });
        prev = Some(s);
    }
    let max_band_length_decreasing = rows.windows(2).all(|w| w[1].stats.max_band_length < w[0].stats.max_band_length);
    let hd: Vec<f64> = rows.iter().filter_map(|r| r.hausdorff_to_previous).collect();
    let hausdorff_decreasing = hd.windows(2).all(|w| w[1] < w[0]);
    Ok(CantorTrend { rows, truncated, max_band_length_decreasing, hausdorff_decreasing })
}

/// Result of [`gap_filling_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapFillingReport {
    pub grid_points: usize,
    pub covered_fraction: f64,
    /// Maximal runs of uncovered grid energies, as `(first, last)`.
    pub holes: Vec<(f64, f64)>,
    pub contains_infinity: bool,
    pub samples: usize,
}

/// Fraction of the energy grid `lo, lo + spacing, …, hi` that lies in the
/// `ε`-thickened union of spectra over the loop.
///
/// # Errors
/// Non-positive `spacing` or `ε`, or a failed union sweep.
pub fn gap_filling_check(lp: &ThetaLoop, window: (f64, f64), spacing: f64, epsilon: f64) -> Result<GapFillingReport> {
    let (lo, hi) = window;
    if !(spacing > 0.0) || !(hi > lo) {
        return domain("grid spacing must be positive and the window non-empty");
    }
    let union = union_spectrum_over_theta(lp, &UnionOptions::new(epsilon, window))?;
    let (covered_fraction, holes, n) = grid_coverage(&union.set, window, spacing);
    Ok(GapFillingReport {
        grid_points: n,
        covered_fraction,
        holes,
        contains_infinity: union.set.contains_infinity(),
        samples: union.samples,
    })
}

/// Covered fraction and uncovered runs of the grid `lo, lo + spacing, …, hi`.
fn grid_coverage(set: &SpectrumSet, (lo, hi): (f64, f64), spacing: f64) -> (f64, Vec<(f64, f64)>, usize) {
    let n = ((hi - lo) / spacing).round() as usize + 1;
    let mut covered = 0usize;
    let mut holes: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for k in 0..n {
        let e = (lo + k as f64 * spacing).min(hi);
        if set.contains(e) {
            covered += 1;
            holes.extend(open.take());
        } else {
            open = Some(open.map_or((e, e), |(a, _)| (a, e)));
        }
    }
    holes.extend(open);
    (covered as f64 / n as f64, holes, n)
}
