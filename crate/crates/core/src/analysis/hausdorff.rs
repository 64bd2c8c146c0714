use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::error::{domain, Result};
use crate::spectra::SpectrumSet;

/// Metric on spectral sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `|a - b|` on the real line; sets containing `∞` are rejected.
    Euclid,
    /// Chord length between Cayley images on the unit circle.
    Chordal,
}

/// Hausdorff distance between two non-empty closed sets.
///
/// Both one-sided distances are maximised exactly: `x ↦ dist(x, B)` is
/// piecewise linear on every interval of `A`, so its maximum sits at an
/// endpoint of `A` or at the midpoint of a gap of `B`.
///
/// # Errors
/// An empty set, or a set containing `∞` under [`Metric::Euclid`].
pub fn hausdorff_distance(a: &SpectrumSet, b: &SpectrumSet, metric: Metric) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return domain("Hausdorff distance of an empty set");
    }
    match metric {
        Metric::Euclid => {
            if a.contains_infinity() || b.contains_infinity() {
                return domain("sets containing infinity need the chordal metric");
            }
            Ok(directed_line(a.intervals(), b.intervals()).max(directed_line(b.intervals(), a.intervals())))
        }
        Metric::Chordal => {
            let (aa, ba) = (arcs(a), arcs(b));
            let d = directed_circle(&aa, &ba).max(directed_circle(&ba, &aa));
            Ok(2.0 * (0.5 * d).sin())
        }
    }
}

fn dist_line(x: f64, b: &[(f64, f64)]) -> f64 {
    b.iter().map(|&(lo, hi)| if x < lo { lo - x } else if x > hi { x - hi } else { 0.0 }).fold(f64::INFINITY, f64::min)
}

fn directed_line(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut best = 0.0f64;
    for &(lo, hi) in a {
        best = best.max(dist_line(lo, b)).max(dist_line(hi, b));
        for w in b.windows(2) {
            let mid = 0.5 * (w[0].1 + w[1].0);
            if mid > lo && mid < hi {
                best = best.max(dist_line(mid, b));
            }
        }
    }
    best
}

/// Angle in `(π/2, 5π/2)` increasing with the energy; `∞` sits at both ends.
fn angle(e: f64) -> f64 {
    2.0 * e.atan() + 1.5 * PI
}

fn arcs(s: &SpectrumSet) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = s.intervals().iter().map(|&(lo, hi)| (angle(lo), angle(hi))).collect();
    if s.contains_infinity() {
        v.insert(0, (FRAC_PI_2, FRAC_PI_2));
        v.push((FRAC_PI_2 + TAU, FRAC_PI_2 + TAU));
    }
    v
}

fn dist_circle(x: f64, b: &[(f64, f64)]) -> f64 {
    b.iter()
        .map(|&(lo, hi)| {
            if x >= lo && x <= hi {
                0.0
            } else {
                let d = (x - lo).abs().min((x - hi).abs());
                d.min(TAU - (x - lo).abs()).min(TAU - (x - hi).abs())
            }
        })
        .fold(f64::INFINITY, f64::min)
}

fn directed_circle(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut mids: Vec<f64> = b.windows(2).map(|w| 0.5 * (w[0].1 + w[1].0)).collect();
    if let (Some(first), Some(last)) = (b.first(), b.last()) {
        let m = 0.5 * (last.1 + first.0 + TAU);
        mids.push(m);
        mids.push(m - TAU);
    }
    let mut best = 0.0f64;
    for &(lo, hi) in a {
        best = best.max(dist_circle(lo, b)).max(dist_circle(hi, b));
        for &m in &mids {
            if m > lo && m < hi {
                best = best.max(dist_circle(m, b));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(iv: &[(f64, f64)]) -> SpectrumSet {
        SpectrumSet::new(iv.to_vec(), false)
    }

    #[test]
    fn small_examples() {
        let a = set(&[(-2.0, 2.0)]);
        let b = set(&[(-2.0, 2.0), (3.0, 3.0)]);
        assert_eq!(hausdorff_distance(&a, &b, Metric::Euclid).unwrap(), 1.0);
        assert_eq!(hausdorff_distance(&a, &a, Metric::Euclid).unwrap(), 0.0);
        let d = hausdorff_distance(&set(&[(0.0, 1.0)]), &set(&[(0.5, 1.5)]), Metric::Euclid).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gap_midpoint_is_found() {
        let a = set(&[(0.0, 10.0)]);
        let b = set(&[(0.0, 1.0), (9.0, 10.0)]);
        assert_eq!(hausdorff_distance(&a, &b, Metric::Euclid).unwrap(), 4.0);
    }

    #[test]
    fn infinity_needs_chordal() {
        let a = SpectrumSet::new(vec![(0.0, 1.0)], true);
        let b = set(&[(0.0, 1.0)]);
        assert!(hausdorff_distance(&a, &b, Metric::Euclid).is_err());
        let d = hausdorff_distance(&a, &b, Metric::Chordal).unwrap();
        // ∞ ↦ i, 1 ↦ 1: chord √2.
        assert!((d - 2f64.sqrt()).abs() < 1e-12, "{d}");
        assert!(hausdorff_distance(&SpectrumSet::empty(), &b, Metric::Chordal).is_err());
    }

    #[test]
    fn chordal_sees_large_energies_as_close() {
        let a = SpectrumSet::new(vec![(1e6, 1e6)], false);
        let b = SpectrumSet::new(vec![(-1e6, -1e6)], true);
        assert!(hausdorff_distance(&a, &b, Metric::Chordal).unwrap() < 1e-5);
    }

    fn arb_set() -> impl Strategy<Value = SpectrumSet> {
        (prop::collection::vec((-5.0f64..5.0, 0.0f64..1.0), 1..5), any::<bool>())
            .prop_map(|(v, inf)| SpectrumSet::new(v.into_iter().map(|(a, w)| (a, a + w)).collect(), inf))
    }

    proptest! {
        #[test]
        fn chordal_is_a_metric(a in arb_set(), b in arb_set(), c in arb_set()) {
            let ab = hausdorff_distance(&a, &b, Metric::Chordal).unwrap();
            let ba = hausdorff_distance(&b, &a, Metric::Chordal).unwrap();
            let bc = hausdorff_distance(&b, &c, Metric::Chordal).unwrap();
            let ac = hausdorff_distance(&a, &c, Metric::Chordal).unwrap();
            prop_assert!((ab - ba).abs() < 1e-14);
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert_eq!(hausdorff_distance(&a, &a, Metric::Chordal).unwrap(), 0.0);
        }

        #[test]
        fn euclid_is_a_metric(a in arb_set(), b in arb_set(), c in arb_set()) {
            let (a, b, c) = (a.clip(-10.0, 10.0), b.clip(-10.0, 10.0), c.clip(-10.0, 10.0));
            let ab = hausdorff_distance(&a, &b, Metric::Euclid).unwrap();
            let bc = hausdorff_distance(&b, &c, Metric::Euclid).unwrap();
            let ac = hausdorff_distance(&a, &c, Metric::Euclid).unwrap();
            prop_assert_eq!(ab, hausdorff_distance(&b, &a, Metric::Euclid).unwrap());
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert_eq!(hausdorff_distance(&a, &a, Metric::Euclid).unwrap(), 0.0);
        }

        #[test]
        fn euclid_matches_brute_force(a in arb_set(), b in arb_set()) {
            let (a, b) = (a.clip(-10.0, 10.0), b.clip(-10.0, 10.0));
            let d = hausdorff_distance(&a, &b, Metric::Euclid).unwrap();
            let mut brute = 0.0f64;
            for (x, y) in [(&a, &b), (&b, &a)] {
                for &(lo, hi) in x.intervals() {
                    for k in 0..=2000 {
                        let e = lo + (hi - lo) * f64::from(k) / 2000.0;
                        brute = brute.max(y.distance(e));
                    }
                }
            }
            prop_assert!(d >= brute - 1e-12 && d <= brute + 1e-3);
        }
    }
}
