use serde::Serialize;

/// Finite union of closed intervals of `ℝ`, optionally together with `∞`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SpectrumSet {
    intervals: Vec<(f64, f64)>,
    contains_infinity: bool,
}

impl SpectrumSet {
    /// Sorts and merges overlapping intervals. Reversed pairs are reordered.
    #[must_use]
    pub fn new(intervals: Vec<(f64, f64)>, contains_infinity: bool) -> Self {
        let mut s = Self { intervals, contains_infinity };
        s.normalize(0.0);
        s
    }

    #[must_use]
    pub fn empty() -> Self {
        Self::default()
    }

    /// Degenerate intervals `[e, e]`.
    #[must_use]
    pub fn points(points: &[f64]) -> Self {
        Self::new(points.iter().map(|&e| (e, e)).collect(), false)
    }

    fn normalize(&mut self, merge_gap: f64) {
        for iv in &mut self.intervals {
            if iv.0 > iv.1 {
                *iv = (iv.1, iv.0);
            }
        }
        self.intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.intervals.len());
        for &(a, b) in &self.intervals {
            match out.last_mut() {
                Some(last) if a <= last.1 + merge_gap => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        self.intervals = out;
    }

    /// Merges intervals separated by gaps of at most `gap`.
    #[must_use]
    pub fn merge_closer_than(mut self, gap: f64) -> Self {
        self.normalize(gap);
        self
    }

    #[must_use]
    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    #[must_use]
    pub fn contains_infinity(&self) -> bool {
        self.contains_infinity
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && !self.contains_infinity
    }

    #[must_use]
    pub fn union(&self, other: &Self) -> Self {
        let mut iv = self.intervals.clone();
        iv.extend_from_slice(&other.intervals);
        Self::new(iv, self.contains_infinity || other.contains_infinity)
    }

    /// Every interval widened by `eps` on both sides.
    #[must_use]
    pub fn thicken(&self, eps: f64) -> Self {
        Self::new(self.intervals.iter().map(|&(a, b)| (a - eps, b + eps)).collect(), self.contains_infinity)
    }

    /// Intersection with `[lo, hi]`; drops `∞`.
    #[must_use]
    pub fn clip(&self, lo: f64, hi: f64) -> Self {
        let iv = self
            .intervals
            .iter()
            .filter(|&&(a, b)| b >= lo && a <= hi)
            .map(|&(a, b)| (a.max(lo), b.min(hi)))
            .collect();
        Self::new(iv, false)
    }

    /// Lebesgue measure of the finite part.
    #[must_use]
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// Euclidean distance from `e` to the finite part (`+inf` when empty).
    #[must_use]
    pub fn distance(&self, e: f64) -> f64 {
        let k = self.intervals.partition_point(|iv| iv.1 < e);
        let mut d = f64::INFINITY;
        if let Some(&(a, _)) = self.intervals.get(k) {
            d = d.min((a - e).max(0.0));
        }
        if k > 0 {
            d = d.min(e - self.intervals[k - 1].1);
        }
        d
    }

    #[must_use]
    pub fn contains(&self, e: f64) -> bool {
        self.distance(e) == 0.0
    }

    /// Gaps between consecutive intervals.
    #[must_use]
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.intervals.windows(2).map(|w| (w[0].1, w[1].0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_and_measure() {
        let s = SpectrumSet::new(vec![(2.0, 3.0), (0.0, 1.0), (0.5, 1.5)], false);
        assert_eq!(s.intervals(), &[(0.0, 1.5), (2.0, 3.0)]);
        assert!((s.measure() - 2.5).abs() < 1e-15);
        assert_eq!(s.gaps(), vec![(1.5, 2.0)]);
        assert_eq!(s.clone().merge_closer_than(0.5).intervals().len(), 1);
    }

    #[test]
    fn distances() {
        let s = SpectrumSet::new(vec![(0.0, 1.0), (3.0, 4.0)], false);
        assert_eq!(s.distance(0.5), 0.0);
        assert_eq!(s.distance(2.0), 1.0);
        assert_eq!(s.distance(-1.0), 1.0);
        assert_eq!(s.distance(6.0), 2.0);
        assert_eq!(SpectrumSet::empty().distance(0.0), f64::INFINITY);
    }

    #[test]
    fn clip_and_thicken() {
        let s = SpectrumSet::points(&[0.0, 1.0]).thicken(0.25);
        assert_eq!(s.intervals(), &[(-0.25, 0.25), (0.75, 1.25)]);
        assert_eq!(s.clip(0.0, 1.0).intervals(), &[(0.0, 0.25), (0.75, 1.0)]);
    }
}
