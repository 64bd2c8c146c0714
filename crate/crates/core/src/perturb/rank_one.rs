use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::{CircleArc, ExtendedReal};
use crate::spectra::{discriminant_bands, green_00, SpectrumSet};

/// Periodic potential `V(n) = period[n mod q]` whose value at the origin is
/// replaced by a coupling `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicBase {
    pub period: Vec<f64>,
}

/// Open gap of the base spectrum: the positive arc from `lower` to `upper`.
/// The unbounded gap runs from the top band edge through `∞` to the bottom one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralGap {
    pub lower: ExtendedReal,
    pub upper: ExtendedReal,
}

impl SpectralGap {
    #[must_use]
    pub fn arc(&self) -> CircleArc {
        CircleArc::new(self.lower, self.upper)
    }

    #[must_use]
    pub fn is_unbounded(&self) -> bool {
        self.arc().contains_infinity()
    }
}

impl PeriodicBase {
    /// # Errors
    /// Empty or non-finite period.
    pub fn new(period: Vec<f64>) -> Result<Self> {
        if period.is_empty() || period.iter().any(|v| !v.is_finite()) {
            return domain("the base period must be non-empty and finite");
        }
        Ok(Self { period })
    }

    #[must_use]
    pub fn q(&self) -> usize {
        self.period.len()
    }

    #[must_use]
    pub fn value(&self, n: i64) -> f64 {
        self.period[n.rem_euclid(self.q() as i64) as usize]
    }

    #[must_use]
    pub fn bands(&self) -> SpectrumSet {
        discriminant_bands(&self.period, None).expect("non-empty period")
    }

    /// Bounded gaps in increasing order followed by the unbounded gap.
    #[must_use]
    pub fn gaps(&self) -> Vec<SpectralGap> {
        let bands = self.bands();
        let iv = bands.intervals();
        let mut out: Vec<SpectralGap> =
            bands.gaps().into_iter().map(|(a, b)| SpectralGap { lower: a.into(), upper: b.into() }).collect();
        out.push(SpectralGap { lower: iv[iv.len() - 1].1.into(), upper: iv[0].0.into() });
        out
    }

    /// `G(0, 0; λ)` of the base operator, with `G(∞) = 0`.
    ///
    /// # Errors
    /// From [`green_00`].
    pub fn green(&self, lambda: ExtendedReal) -> Result<f64> {
        match lambda {
            ExtendedReal::Infinity => Ok(0.0),
            ExtendedReal::Finite(l) => Ok(green_00(&|n| ExtendedReal::Finite(self.value(n)), l)?.value),
        }
    }

    /// # Errors
    /// The arc meets a band.
    pub fn check_gap(&self, gap: &SpectralGap) -> Result<()> {
        let arc = gap.arc();
        let strictly_inside = |e: f64| {
            let e = ExtendedReal::Finite(e);
            e != gap.lower && e != gap.upper && arc.contains(e)
        };
        for &(a, b) in self.bands().intervals() {
            let tol = 1e-9 * (1.0 + a.abs().max(b.abs()));
            let shrunk = [a + tol, b - tol, 0.5 * (a + b)];
            if shrunk.iter().any(|&e| (a..=b).contains(&e) && strictly_inside(e)) {
                return domain(format!("({}, {}) is not a spectral gap", gap.lower, gap.upper));
            }
        }
        Ok(())
    }
}

/// Behaviour of `G` at a gap edge, estimated from two interior points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum EdgeValue {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl EdgeValue {
    fn as_f64(self) -> f64 {
        match self {
            Self::Finite(x) => x,
            Self::PlusInfinity => f64::INFINITY,
            Self::MinusInfinity => f64::NEG_INFINITY,
        }
    }
}

/// Interior offsets (fractions of the gap arc) used for edge estimates.
const EDGE_PROBES: [f64; 2] = [1e-6, 1e-8];
/// Growth between the two probes above which the edge value is taken as infinite.
const DIVERGENCE_RATIO: f64 = 3.0;

fn edge_value(base: &PeriodicBase, arc: &CircleArc, lower: bool) -> Result<EdgeValue> {
    let at = |eta: f64| base.green(arc.point_at(if lower { eta } else { 1.0 - eta }));
    let g1 = at(EDGE_PROBES[0])?;
    let g2 = at(EDGE_PROBES[1])?;
    if g2.abs() > 1.0 && g2.abs() > DIVERGENCE_RATIO * g1.abs() {
        Ok(if g2 > 0.0 { EdgeValue::PlusInfinity } else { EdgeValue::MinusInfinity })
    } else {
        Ok(EdgeValue::Finite(g2))
    }
}

/// Eigenvalue of the rank-one perturbation inside a gap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapEigenvalue {
    pub lambda: Option<ExtendedReal>,
    /// The root lies within `1e-8` of a gap edge.
    pub edge_proximity: bool,
    /// `t = ∞`: the decoupled site carries the eigenvalue `∞`.
    pub decoupled_infinity: bool,
    /// `|1 + s·G(λ)|`, or `|G(λ)|` for `t = ∞`.
    pub residual: f64,
}

/// Root of the secular equation `1 + (t - V(0))·G(λ) = 0` on the gap.
///
/// `G` increases along the gap arc, so the root is bracketed by the edge
/// values of `G` and found by bisection in arc length.
///
/// # Errors
/// The arc is not a gap, or Green's function evaluation fails.
pub fn gap_eigenvalue(base: &PeriodicBase, gap: &SpectralGap, t: ExtendedReal) -> Result<GapEigenvalue> {
    base.check_gap(gap)?;
    let arc = gap.arc();
    let v0 = base.value(0);
    let (target, s) = match t {
        ExtendedReal::Infinity => (0.0, f64::INFINITY),
        ExtendedReal::Finite(t) if t == v0 => {
            return Ok(GapEigenvalue { lambda: None, edge_proximity: false, decoupled_infinity: false, residual: 0.0 });
        }
        ExtendedReal::Finite(t) => (-1.0 / (t - v0), t - v0),
    };
    let residual = |g: f64| if s.is_infinite() { g.abs() } else { (1.0 + s * g).abs() };
    let decoupled_infinity = t.is_infinite();
    if decoupled_infinity && arc.contains_infinity() {
        return Ok(GapEigenvalue { lambda: Some(ExtendedReal::Infinity), edge_proximity: false, decoupled_infinity, residual: 0.0 });
    }
    let lo_edge = edge_value(base, &arc, true)?.as_f64();
    let hi_edge = edge_value(base, &arc, false)?.as_f64();
    if !(lo_edge < target && target < hi_edge) {
        return Ok(GapEigenvalue { lambda: None, edge_proximity: false, decoupled_infinity, residual: f64::NAN });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best = (0.5, f64::INFINITY);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = match base.green(arc.point_at(mid)) {
            Ok(g) => g,
            Err(Error::NotConverged(_)) => {
                // too close to an edge for the truncation: step inwards
                if mid < 0.5 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        best = (mid, residual(g));
        if g < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if best.1 <= 1e-13 {
            break;
        }
    }
    let lambda = arc.point_at(best.0);
    let near = |edge: ExtendedReal| match (edge, lambda) {
        (ExtendedReal::Finite(e), ExtendedReal::Finite(l)) => (e - l).abs() < 1e-8,
        _ => false,
    };
    Ok(GapEigenvalue {
        lambda: Some(lambda),
        edge_proximity: near(gap.lower) || near(gap.upper),
        decoupled_infinity,
        residual: best.1,
    })
}

/// `sign(t)·√(4 + t²)`, the eigenvalue of the free operator with coupling
/// `t ≠ 0` at the origin; `None` for `t = 0`.
#[must_use]
pub fn free_gap_eigenvalue(t: ExtendedReal) -> Option<ExtendedReal> {
    match t {
        ExtendedReal::Infinity => Some(ExtendedReal::Infinity),
        ExtendedReal::Finite(t) if t == 0.0 => None,
        ExtendedReal::Finite(t) => Some(ExtendedReal::Finite(t.signum() * (4.0 + t * t).sqrt())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowSample {
    pub t: ExtendedReal,
    pub lambda: Option<ExtendedReal>,
}

/// Eigenvalue branch in one gap as the coupling runs once round `ℝ̄`,
/// starting just after `V(0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapFlowCurve {
    pub gap: SpectralGap,
    pub samples: Vec<FlowSample>,
    /// Couplings `(t₋, t₊)` between which the branch exists.
    pub window: Option<(ExtendedReal, ExtendedReal)>,
    /// Branch values just inside the window, to compare with the gap edges.
    pub endpoint_lambdas: Option<(ExtendedReal, ExtendedReal)>,
    /// The branch moves strictly forward along the gap arc.
    pub monotone: bool,
}

/// Offset just inside the coupling window at which endpoint values are sampled.
const WINDOW_INSET: f64 = 1e-9;

/// Traces the gap eigenvalue over `t_samples`, reordered along the coupling
/// circle starting at `V(0)`.
///
/// The window ends solve `1 + s·G(g±) = 0` with the edge values of `G`; they
/// are checked against the samples where a root exists.
///
/// # Errors
/// Fewer than 8 samples, a non-gap, or a window that disagrees with the samples.
pub fn trace_gap_flow(base: &PeriodicBase, gap: &SpectralGap, t_samples: &[ExtendedReal]) -> Result<GapFlowCurve> {
    if t_samples.len() < 8 {
        return domain("gap flow needs at least 8 coupling samples");
    }
    base.check_gap(gap)?;
    let v0 = ExtendedReal::Finite(base.value(0));
    let circle = CircleArc::new(v0, v0);
    let mut ordered: Vec<(f64, ExtendedReal)> =
        t_samples.iter().filter(|&&t| t != v0).map(|&t| (circle.fraction_of(t).unwrap_or(0.0), t)).collect();
    ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut samples = Vec::with_capacity(ordered.len());
    for &(_, t) in &ordered {
        let ev = gap_eigenvalue(base, gap, t)?;
        samples.push(FlowSample { t, lambda: ev.lambda });
    }
    let arc = gap.arc();
    let positions: Vec<f64> = samples.iter().filter_map(|s| s.lambda).filter_map(|l| arc.fraction_of(l)).collect();
    let monotone = positions.windows(2).all(|w| w[1] > w[0] - 1e-9);

    let lo = edge_value(base, &arc, true)?;
    let hi = edge_value(base, &arc, false)?;
    let coupling = |e: EdgeValue| -> ExtendedReal {
        match e {
            EdgeValue::Finite(g) if g == 0.0 => ExtendedReal::Infinity,
            EdgeValue::Finite(g) => ExtendedReal::Finite(v0.to_f64() - 1.0 / g),
            _ => v0,
        }
    };
    let (t_lo, t_hi) = (coupling(lo), coupling(hi));
    let u_lo = if t_lo == v0 { 0.0 } else { circle.fraction_of(t_lo).unwrap_or(0.0) };
    let u_hi = if t_hi == v0 { 1.0 } else { circle.fraction_of(t_hi).unwrap_or(1.0) };
    let window = (u_hi > u_lo).then_some((t_lo, t_hi));
    for (&(u, _), s) in ordered.iter().zip(&samples) {
        let inside = u > u_lo + 1e-12 && u < u_hi - 1e-12;
        let outside = u < u_lo - 1e-12 || u > u_hi + 1e-12;
        if (inside && s.lambda.is_none()) || (outside && s.lambda.is_some()) {
            return Err(Error::Consistency(format!("coupling {} disagrees with the window", s.t)));
        }
    }
    let endpoint_lambdas = match window {
        Some(_) => {
            let a = gap_eigenvalue(base, gap, circle.point_at(u_lo + WINDOW_INSET))?.lambda;
            let b = gap_eigenvalue(base, gap, circle.point_at(u_hi - WINDOW_INSET))?.lambda;
            a.zip(b)
        }
        None => None,
    };
    Ok(GapFlowCurve { gap: *gap, samples, window, endpoint_lambdas, monotone })
}
