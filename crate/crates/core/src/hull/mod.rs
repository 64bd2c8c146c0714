//! The compactified phase circle: the orbit `{nα}` is doubled and a gap of
//! length `2^{-|n|}/3` is inserted at every orbit point.
//!
//! The model circle is `[0, 2)` with `2 ≡ 0`. The Cantor part is the image of
//! the increasing map `h(y) = y + (1/3) Σ_{{nα} ≤ y} 2^{-|n|}`; gap `n` is the
//! interval `(h({nα} - 0), h({nα}))`. Sums run over `|n| ≤ N`; the neglected
//! tail is at most `(2/3)·2^{-N}`.

use std::io::Write;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::{frac, ExtendedReal, Frequency};
use crate::potentials::CircleMapTilde;

/// Length of the model circle.
pub const CIRCLE_LENGTH: f64 = 2.0;

/// Which one-sided limit a Cantor point stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `x + 0`, the right endpoint of a gap when `x` is on the orbit.
    Plus,
    /// `x - 0`, the left endpoint of a gap when `x` is on the orbit.
    Minus,
}

/// A point of the compactified circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HullPoint {
    Cantor { x: f64, side: Side },
    /// Interior of gap `n`, `s ∈ (-1, 0)`.
    Gap { n: i64, s: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapInfo {
    pub left: f64,
    pub right: f64,
    /// Orbit labels sharing this gap; several only for rational `α`.
    pub labels: Vec<i64>,
    pub merged: bool,
}

impl GapInfo {
    #[must_use]
    pub fn width(&self) -> f64 {
        self.right - self.left
    }
}

#[derive(Clone, Copy, Debug)]
struct OrbitPoint {
    n: i64,
    pos: f64,
    /// `n·p mod q` for rational `α`; equal residues are the same circle point.
    residue: Option<u64>,
}

/// Truncated model of the compactified circle for a fixed `α`.
#[derive(Clone, Debug)]
pub struct HullModel {
    alpha: Frequency,
    n_trunc: u32,
    /// Orbit points sorted by position.
    orbit: Vec<OrbitPoint>,
    /// `prefix[k]` is `(1/3)·Σ` of the weights of `orbit[..k]`.
    prefix: Vec<f64>,
}

fn weight(n: i64) -> f64 {
    (0.5f64).powi(n.unsigned_abs().min(2000) as i32)
}

impl HullModel {
    /// # Errors
    /// `N > 60` (weights below `2^{-60}` do not register in `f64` sums anyway).
    pub fn new(alpha: Frequency, n_trunc: u32) -> Result<Self> {
        if n_trunc > 60 {
            return domain("truncation depth above 60 has no effect in double precision");
        }
        let n_max = i64::from(n_trunc);
        let mut orbit: Vec<OrbitPoint> = (-n_max..=n_max)
            .map(|n| match &alpha {
                Frequency::Rational { p, q } => {
                    let r = (n.rem_euclid(*q as i64) as u64 * p) % q;
                    OrbitPoint { n, pos: r as f64 / *q as f64, residue: Some(r) }
                }
                Frequency::Irrational { value, .. } => OrbitPoint { n, pos: frac(n as f64 * value), residue: None },
            })
            .collect();
        orbit.sort_by(|a, b| a.pos.total_cmp(&b.pos).then(a.n.unsigned_abs().cmp(&b.n.unsigned_abs())).then(a.n.cmp(&b.n)));
        let mut prefix = Vec::with_capacity(orbit.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for o in &orbit {
            acc += weight(o.n) / 3.0;
            prefix.push(acc);
        }
        Ok(Self { alpha, n_trunc, orbit, prefix })
    }

    #[must_use]
    pub fn alpha(&self) -> &Frequency {
        &self.alpha
    }

    #[must_use]
    pub fn n_trunc(&self) -> u32 {
        self.n_trunc
    }

    /// Upper bound on the weight dropped by truncation.
    #[must_use]
    pub fn tail_bound(&self) -> f64 {
        (2.0 / 3.0) * weight(i64::from(self.n_trunc))
    }

    /// Total gap weight carried by orbit points strictly left of `y`
    /// (`strict`) or at or left of `y`.
    fn mass(&self, y: f64, strict: bool) -> f64 {
        let k = if strict {
            self.orbit.partition_point(|o| o.pos < y)
        } else {
            self.orbit.partition_point(|o| o.pos <= y)
        };
        self.prefix[k]
    }

    /// `h(y)`; `h(y) = 2` for `y ≥ 1` and `h(y) = 0` for `y < 0`.
    #[must_use]
    pub fn h(&self, y: f64) -> f64 {
        if y >= 1.0 {
            return CIRCLE_LENGTH;
        }
        if y < 0.0 {
            return 0.0;
        }
        y + self.mass(y, false)
    }

    /// `h(y - 0)`.
    #[must_use]
    pub fn h_left(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if y > 1.0 {
            return CIRCLE_LENGTH;
        }
        y + self.mass(y, true)
    }

    /// Position of orbit label `n`.
    ///
    /// # Errors
    /// `|n| > N`.
    pub fn orbit_position(&self, n: i64) -> Result<f64> {
        self.orbit
            .iter()
            .find(|o| o.n == n)
            .map(|o| o.pos)
            .ok_or_else(|| crate::Error::Domain(format!("label {n} exceeds the truncation depth {}", self.n_trunc)))
    }

    /// Gap attached to label `n`. For rational `α` all labels on the same
    /// circle point share one merged gap.
    ///
    /// # Errors
    /// `|n| > N`.
    pub fn gap_lookup(&self, n: i64) -> Result<GapInfo> {
        let me = *self
            .orbit
            .iter()
            .find(|o| o.n == n)
            .ok_or_else(|| crate::Error::Domain(format!("label {n} exceeds the truncation depth {}", self.n_trunc)))?;
        let same: Vec<&OrbitPoint> = match me.residue {
            Some(r) => self.orbit.iter().filter(|o| o.residue == Some(r)).collect(),
            None => vec![self.orbit.iter().find(|o| o.n == n).expect("present")],
        };
        let left = me.pos + self.mass(me.pos, true);
        let width: f64 = same.iter().map(|o| weight(o.n) / 3.0).sum();
        let mut labels: Vec<i64> = same.iter().map(|o| o.n).collect();
        labels.sort_unstable();
        Ok(GapInfo { left, right: left + width, merged: labels.len() > 1, labels })
    }

    /// Position of `θ` on the model circle `[0, 2)`.
    ///
    /// # Errors
    /// Gap labels beyond the truncation depth.
    pub fn position(&self, theta: &HullPoint) -> Result<f64> {
        match *theta {
            HullPoint::Cantor { x, side: Side::Plus } => Ok(self.h(frac(x)) % CIRCLE_LENGTH),
            HullPoint::Cantor { x, side: Side::Minus } => {
                let x = frac(x);
                Ok(if x == 0.0 { 0.0 } else { self.h_left(x) })
            }
            HullPoint::Gap { n, s } => {
                let g = self.gap_lookup(n)?;
                Ok(g.left + (s + 1.0) * g.width())
            }
        }
    }

    /// The Cantor point `x ± 0`; the side is dropped unless `x` is on the truncated orbit.
    #[must_use]
    pub fn theta_from_xt(&self, x: f64, side: Side) -> HullPoint {
        let x = frac(x);
        let on_orbit = self.orbit.iter().any(|o| o.pos == x);
        HullPoint::Cantor { x, side: if on_orbit { side } else { Side::Plus } }
    }

    /// The point of gap `n` where the jump value is `t`. Arc endpoints map to
    /// the adjacent Cantor points.
    ///
    /// # Errors
    /// `|n| > N`, or `t` not on the jump arc.
    pub fn theta_from_gap(&self, n: i64, t: ExtendedReal, tilde: &CircleMapTilde) -> Result<HullPoint> {
        let pos = self.orbit_position(n)?;
        let Some(s) = tilde.phi_arc_inverse(t) else {
            return domain(format!("{t} is not on the jump arc"));
        };
        Ok(if s >= 0.0 {
            HullPoint::Cantor { x: pos, side: Side::Plus }
        } else if s <= -1.0 {
            HullPoint::Cantor { x: pos, side: Side::Minus }
        } else {
            HullPoint::Gap { n, s }
        })
    }

    /// Operator data of `θ`: the phase, its side, and the jump value placed at
    /// the site whose phase is 0 (gap points only).
    ///
    /// # Errors
    /// `|n| > N`.
    pub fn operator_params(&self, theta: &HullPoint, tilde: &CircleMapTilde) -> Result<OperatorParams> {
        Ok(match *theta {
            HullPoint::Cantor { x, side } => OperatorParams { x: frac(x), side, jump: None },
            HullPoint::Gap { n, s } => OperatorParams {
                x: self.orbit_position(n)?,
                side: Side::Plus,
                jump: Some(JumpSite { site: -n, value: tilde.phi_arc(s) }),
            },
        })
    }

    /// Action of the shift by `m` sites.
    ///
    /// # Errors
    /// A gap label leaving the truncation window.
    pub fn translate(&self, theta: &HullPoint, m: i64) -> Result<HullPoint> {
        match *theta {
            HullPoint::Cantor { x, side } => {
                let x = match &self.alpha {
                    Frequency::Rational { p, q } => {
                        let steps = (m.rem_euclid(*q as i64) as u64 * p) % q;
                        frac(x + steps as f64 / *q as f64)
                    }
                    Frequency::Irrational { value, .. } => frac(x + m as f64 * value),
                };
                Ok(HullPoint::Cantor { x, side })
            }
            HullPoint::Gap { n, s } => {
                let k = n + m;
                if k.unsigned_abs() > u64::from(self.n_trunc) {
                    return domain(format!("label {k} exceeds the truncation depth {}", self.n_trunc));
                }
                Ok(HullPoint::Gap { n: k, s })
            }
        }
    }

    /// All points with jump value `t`, one per label `|n| ≤ N`.
    ///
    /// # Errors
    /// `t` not on the jump arc.
    pub fn s_alpha_t(&self, t: ExtendedReal, tilde: &CircleMapTilde) -> Result<Vec<HullPoint>> {
        let n_max = i64::from(self.n_trunc);
        (-n_max..=n_max).map(|n| self.theta_from_gap(n, t, tilde)).collect()
    }

    /// Gap table sorted by label, as `n,left,right,width` CSV rows.
    ///
    /// # Errors
    /// Write failures.
    pub fn write_gap_table(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "n,left,right,width")?;
        let n_max = i64::from(self.n_trunc);
        for n in -n_max..=n_max {
            let g = self.gap_lookup(n)?;
            writeln!(out, "{n},{},{},{}", g.left, g.right, g.width())?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JumpSite {
    /// Lattice site whose phase is 0.
    pub site: i64,
    pub value: ExtendedReal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OperatorParams {
    pub x: f64,
    pub side: Side,
    pub jump: Option<JumpSite>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{ArcChoice, Potential};
    use proptest::prelude::*;

    fn golden(n: u32) -> HullModel {
        HullModel::new(Frequency::golden(), n).unwrap()
    }

    #[test]
    fn h_is_increasing_and_normalised() {
        let m = golden(20);
        assert_eq!(m.h(1.0), 2.0);
        let mut prev = -1.0;
        for k in 0..=1000 {
            let y = f64::from(k) / 1000.0;
            let v = m.h(y);
            assert!(v > prev, "h not increasing at {y}");
            prev = v;
        }
        assert!(m.h(0.999_999_999) < 2.0 && m.h(0.999_999_999) > 2.0 - 1e-6);
    }

    #[test]
    fn zero_gap_is_first_third() {
        let m = golden(20);
        let g = m.gap_lookup(0).unwrap();
        assert_eq!(g.left, 0.0);
        assert!((g.right - 1.0 / 3.0).abs() < 1e-15);
        assert!(!g.merged);
    }

    #[test]
    fn gap_widths_and_order() {
        let m = golden(20);
        for n in -20..=20i64 {
            let g = m.gap_lookup(n).unwrap();
            assert!((g.width() - weight(n) / 3.0).abs() < 1e-16);
        }
        let a = frac(Frequency::golden().value());
        let g1 = m.gap_lookup(1).unwrap();
        let direct = a + (1.0 / 3.0) * (-20..=20i64).filter(|&k| frac(k as f64 * a) < a).map(weight).sum::<f64>();
        assert!((g1.left - direct).abs() < 1e-14);
    }

    #[test]
    fn rational_gaps_merge() {
        let m = HullModel::new(Frequency::rational(1, 2).unwrap(), 10).unwrap();
        let g = m.gap_lookup(0).unwrap();
        assert!(g.merged);
        assert!(g.labels.iter().all(|n| n % 2 == 0));
        let direct: f64 = (-10..=10i64).filter(|n| n % 2 == 0).map(|n| weight(n) / 3.0).sum();
        assert!((g.width() - direct).abs() < 1e-15);
        assert_eq!(m.gap_lookup(2).unwrap(), g);
    }

    #[test]
    fn total_measure_is_two() {
        let m = golden(30);
        let gaps: f64 = (-30..=30).map(|n| m.gap_lookup(n).unwrap().width()).sum();
        assert!((1.0 + gaps - 2.0).abs() <= m.tail_bound() + 1e-15);
    }

    #[test]
    fn gap_endpoints_are_cantor_limits() {
        let m = golden(20);
        let f = Potential::sawtooth(1.0).unwrap();
        let tilde = CircleMapTilde::new(&f, ArcChoice::ThroughInfinity).unwrap();
        for n in [-3i64, 0, 2, 7] {
            let g = m.gap_lookup(n).unwrap();
            let x = m.orbit_position(n).unwrap();
            let right = m.position(&HullPoint::Cantor { x, side: Side::Plus }).unwrap();
            let left = m.position(&HullPoint::Cantor { x, side: Side::Minus }).unwrap();
            assert!((right - g.right % 2.0).abs() < 1e-15);
            assert!((left - g.left).abs() < 1e-15);
            let start = m.theta_from_gap(n, f.f0(), &tilde).unwrap();
            assert_eq!(start, HullPoint::Cantor { x, side: Side::Plus });
        }
    }

    #[test]
    fn jump_value_round_trip() {
        let m = golden(10);
        let f = Potential::sawtooth(1.0).unwrap();
        let tilde = CircleMapTilde::new(&f, ArcChoice::ThroughInfinity).unwrap();
        for t in [ExtendedReal::Infinity, 5.0.into(), (-2.0).into()] {
            let theta = m.theta_from_gap(3, t, &tilde).unwrap();
            let p = m.operator_params(&theta, &tilde).unwrap();
            let j = p.jump.unwrap();
            assert_eq!(j.site, -3);
            let d = (crate::numerics::cayley(j.value) - crate::numerics::cayley(t)).norm();
            assert!(d < 1e-12, "{t} came back as {}", j.value);
        }
        assert!(m.theta_from_gap(3, 0.5.into(), &tilde).is_err());
    }

    #[test]
    fn translation_moves_labels() {
        let m = golden(10);
        let t = m.translate(&HullPoint::Gap { n: 2, s: -0.5 }, 3).unwrap();
        assert_eq!(t, HullPoint::Gap { n: 5, s: -0.5 });
        assert!(m.translate(&HullPoint::Gap { n: 9, s: -0.5 }, 3).is_err());
        let c = m.translate(&HullPoint::Cantor { x: 0.1, side: Side::Plus }, 1).unwrap();
        let HullPoint::Cantor { x, .. } = c else { panic!() };
        assert!((x - frac(0.1 + Frequency::golden().value())).abs() < 1e-15);
    }

    #[test]
    fn s_alpha_t_has_one_point_per_label() {
        let m = golden(5);
        let f = Potential::sawtooth(1.0).unwrap();
        let tilde = CircleMapTilde::new(&f, ArcChoice::ThroughInfinity).unwrap();
        let pts = m.s_alpha_t(ExtendedReal::Infinity, &tilde).unwrap();
        assert_eq!(pts.len(), 11);
        assert!(pts.iter().all(|p| matches!(p, HullPoint::Gap { .. })));
    }

    #[test]
    fn gap_table_rows() {
        let m = golden(2);
        let mut buf = Vec::new();
        m.write_gap_table(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("n,left,right,width"));
    }

    proptest! {
        #[test]
        fn gaps_are_disjoint(a in -15i64..=15, b in -15i64..=15) {
            prop_assume!(a != b);
            let m = golden(15);
            let (ga, gb) = (m.gap_lookup(a).unwrap(), m.gap_lookup(b).unwrap());
            prop_assert!(ga.right <= gb.left + 1e-15 || gb.right <= ga.left + 1e-15);
        }

        #[test]
        fn cantor_points_avoid_gap_interiors(y in 0.0f64..1.0) {
            let m = golden(15);
            let v = m.h(y);
            for n in -15..=15 {
                let g = m.gap_lookup(n).unwrap();
                prop_assert!(!(v > g.left + 1e-15 && v < g.right - 1e-15));
            }
        }
    }
}
