use serde::Serialize;

use super::dist_to_integer;
use crate::error::{domain, Result};

/// Reduced fraction `p/q` with `0 ≤ p < q`. `q = 1` (so `p = 0`) is allowed
/// here because integer frequencies still define a one-periodic operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub p: u64,
    pub q: u64,
}

impl Rational {
    /// Reduces `p/q` modulo one.
    ///
    /// # Errors
    /// `q == 0`.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return domain("denominator must be positive");
        }
        let p = p % q;
        let g = gcd(p, q);
        Ok(Self { p: p / g, q: q / g })
    }

    #[must_use]
    pub fn value(self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// Rotation number of the underlying circle rotation.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Frequency {
    Rational { p: u64, q: u64 },
    /// A float value, optionally with exactly known leading partial quotients
    /// (floats cannot resolve large quotients deep in the expansion).
    Irrational { value: f64, partial_quotients: Vec<u64> },
}

impl Frequency {
    /// Reduced `p/q`, required to lie strictly inside `(0, 1)`.
    ///
    /// # Errors
    /// `q == 0` or `p/q ∉ (0, 1)`.
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if q == 0 || p == 0 || p >= q {
            return domain("frequency must lie in (0,1)");
        }
        let g = gcd(p, q);
        Ok(Self::Rational { p: p / g, q: q / g })
    }

    /// # Errors
    /// Values outside `(0, 1)` or non-finite.
    pub fn irrational(value: f64) -> Result<Self> {
        if !(value > 0.0 && value < 1.0) {
            return domain("frequency must lie in (0,1)");
        }
        Ok(Self::Irrational { value, partial_quotients: Vec::new() })
    }

    /// `[0; a₁, a₂, …]` with the given quotients kept exactly.
    ///
    /// # Errors
    /// Empty input or a zero quotient.
    pub fn from_partial_quotients(quotients: &[u64]) -> Result<Self> {
        if quotients.is_empty() || quotients.contains(&0) {
            return domain("partial quotients must be positive and non-empty");
        }
        let mut x = 0.0;
        for &a in quotients.iter().rev() {
            x = 1.0 / (a as f64 + x);
        }
        if !(x > 0.0 && x < 1.0) {
            return domain("frequency must lie in (0,1)");
        }
        Ok(Self::Irrational { value: x, partial_quotients: quotients.to_vec() })
    }

    /// Golden mean `(√5 - 1)/2`.
    #[must_use]
    pub fn golden() -> Self {
        Self::Irrational { value: (5f64.sqrt() - 1.0) / 2.0, partial_quotients: Vec::new() }
    }

    #[must_use]
    pub fn value(&self) -> f64 {
        match self {
            Self::Rational { p, q } => *p as f64 / *q as f64,
            Self::Irrational { value, .. } => *value,
        }
    }

    #[must_use]
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Self::Rational { p, q } => Some(Rational { p: *p, q: *q }),
            Self::Irrational { .. } => None,
        }
    }

    #[must_use]
    pub fn is_rational(&self) -> bool {
        matches!(self, Self::Rational { .. })
    }
}

#[must_use]
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Partial quotients `a₁, a₂, …` and convergents `p_k/q_k` of `α = [0; a₁, a₂, …]`.
///
/// `convergents[0]` is `0/1`; `convergents[k]` uses `a₁ … a_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuedFraction {
    pub partial_quotients: Vec<u64>,
    pub convergents: Vec<(u64, u64)>,
    /// The expansion terminated because `α` is rational.
    pub terminated: bool,
    /// A convergent overflowed `u64`; later quotients were dropped.
    pub overflow: bool,
}

/// Float expansions stop once a quotient exceeds this size; such quotients
/// are artefacts of rounding.
const MAX_FLOAT_QUOTIENT: f64 = 1e8;

/// Float expansions stop once `ε·q_k²` exceeds this, the point where the
/// remainder carries no correct digits.
const FLOAT_AMPLIFICATION_LIMIT: f64 = 1e-4;

/// First `k_max` partial quotients of `α` with their convergents.
///
/// Rationals are expanded exactly with Euclid; floats by the Gauss map with
/// precision-based stopping; exactly known quotients are used verbatim.
#[must_use]
pub fn continued_fraction(alpha: &Frequency, k_max: usize) -> ContinuedFraction {
    let mut out = ContinuedFraction {
        partial_quotients: Vec::new(),
        convergents: vec![(0, 1)],
        terminated: false,
        overflow: false,
    };
    let push = |out: &mut ContinuedFraction, a: u64| -> bool {
        let n = out.convergents.len();
        let (p1, q1) = out.convergents[n - 1];
        let (p2, q2) = if n >= 2 { out.convergents[n - 2] } else { (1, 0) };
        let next = a
            .checked_mul(p1)
            .and_then(|v| v.checked_add(p2))
            .zip(a.checked_mul(q1).and_then(|v| v.checked_add(q2)));
        match next {
            Some(c) => {
                out.partial_quotients.push(a);
                out.convergents.push(c);
                true
            }
            None => {
                out.overflow = true;
                false
            }
        }
    };
    match alpha {
        Frequency::Rational { p, q } => {
            let (mut num, mut den) = (*q, *p);
            while out.partial_quotients.len() < k_max && den != 0 {
                let a = num / den;
                (num, den) = (den, num % den);
                if !push(&mut out, a) {
                    break;
                }
            }
            out.terminated = den == 0;
        }
        Frequency::Irrational { partial_quotients, .. } if !partial_quotients.is_empty() => {
            for &a in partial_quotients.iter().take(k_max) {
                if !push(&mut out, a) {
                    break;
                }
            }
        }
        Frequency::Irrational { value, .. } => {
            let mut x = *value;
            while out.partial_quotients.len() < k_max && x > 0.0 {
                let r = 1.0 / x;
                let a = r.floor();
                if !(1.0..=MAX_FLOAT_QUOTIENT).contains(&a) {
                    break;
                }
                if !push(&mut out, a as u64) {
                    break;
                }
                x = r - a;
                let q = out.convergents.last().map_or(1, |c| c.1) as f64;
                if f64::EPSILON * q * q > FLOAT_AMPLIFICATION_LIMIT {
                    break;
                }
            }
            out.terminated = x == 0.0;
        }
    }
    out
}

/// Running estimate of `β(α) = limsup log q_{k+1} / q_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BetaEstimate {
    pub value: f64,
    pub rational: bool,
    /// Fewer than `k_max + 1` convergents were available.
    pub truncated: bool,
}

/// `max_{k < K} log q_{k+1} / q_k` over the available convergents.
#[must_use]
pub fn beta_estimate(alpha: &Frequency, k_max: usize) -> BetaEstimate {
    if alpha.is_rational() {
        return BetaEstimate { value: 0.0, rational: true, truncated: false };
    }
    let cf = continued_fraction(alpha, k_max + 1);
    let value = cf
        .convergents
        .windows(2)
        .take(k_max)
        .map(|w| (w[1].1 as f64).ln() / w[0].1 as f64)
        .fold(0.0, f64::max);
    BetaEstimate { value, rational: false, truncated: cf.convergents.len() < k_max + 2 }
}

/// Outcome of scanning `dist(nα, ℤ) ≥ C / n^τ` over `1 ≤ n ≤ N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiophantineReport {
    pub holds: bool,
    /// `n` minimising `dist(nα, ℤ)·n^τ`; `None` for an empty scan.
    pub worst_n: Option<u64>,
    pub worst_value: Option<f64>,
}

#[must_use]
pub fn diophantine_probe(alpha: f64, c: f64, tau: f64, n_max: u64) -> DiophantineReport {
    let mut worst: Option<(u64, f64)> = None;
    for n in 1..=n_max {
        let v = dist_to_integer(n as f64 * alpha) * (n as f64).powf(tau);
        if worst.is_none_or(|(_, w)| v < w) {
            worst = Some((n, v));
        }
    }
    DiophantineReport {
        holds: worst.is_none_or(|(_, w)| w >= c),
        worst_n: worst.map(|w| w.0),
        worst_value: worst.map(|w| w.1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_quotients_are_ones() {
        let cf = continued_fraction(&Frequency::golden(), 20);
        assert_eq!(cf.partial_quotients, vec![1; 20]);
        let q: Vec<u64> = cf.convergents.iter().map(|c| c.1).collect();
        assert_eq!(&q[..8], &[1, 1, 2, 3, 5, 8, 13, 21]);
        assert!(!cf.overflow);
    }

    #[test]
    fn rational_expansion_is_exact() {
        let cf = continued_fraction(&Frequency::rational(5, 8).unwrap(), 10);
        assert_eq!(cf.partial_quotients, vec![1, 1, 1, 2]);
        assert_eq!(*cf.convergents.last().unwrap(), (5, 8));
        assert!(cf.terminated);
    }

    #[test]
    fn zero_depth_is_empty() {
        assert!(continued_fraction(&Frequency::golden(), 0).partial_quotients.is_empty());
    }

    #[test]
    fn invalid_frequencies_rejected() {
        for (p, q) in [(0, 1), (1, 1), (3, 2), (1, 0)] {
            let e = Frequency::rational(p, q).unwrap_err();
            assert!(e.to_string().contains("frequency must lie in (0,1)"));
        }
        assert!(Frequency::irrational(1.0).is_err());
        assert_eq!(Frequency::rational(4, 6).unwrap(), Frequency::Rational { p: 2, q: 3 });
    }

    #[test]
    fn beta_of_golden_is_small() {
        let b = beta_estimate(&Frequency::golden(), 20);
        assert!(b.value <= 0.70, "{b:?}");
        assert!(!b.rational && !b.truncated);
    }

    #[test]
    fn beta_of_liouville_like_number_is_large() {
        let digits: Vec<u64> = (0..4).map(|k| 1u64 << (1u32 << (k + 1))).collect();
        let alpha = Frequency::from_partial_quotients(&digits).unwrap();
        let b = beta_estimate(&alpha, 4);
        assert!(b.value > 1.0, "{b:?}");
    }

    #[test]
    fn beta_flags_rationals_and_overflow() {
        assert!(beta_estimate(&Frequency::rational(1, 3).unwrap(), 5).rational);
        let huge = Frequency::from_partial_quotients(&[1 << 40, 1 << 40, 1 << 40]).unwrap();
        let cf = continued_fraction(&huge, 3);
        assert!(cf.overflow);
        assert!(beta_estimate(&huge, 3).truncated);
    }

    #[test]
    fn diophantine_golden() {
        let a = Frequency::golden().value();
        let r = diophantine_probe(a, 0.2, 1.0, 1000);
        assert!(r.holds);
        assert_eq!(r.worst_n, Some(1));
        assert!(!diophantine_probe(a, 0.5, 1.0, 1000).holds);
        let empty = diophantine_probe(a, 0.5, 1.0, 0);
        assert!(empty.holds && empty.worst_n.is_none());
    }
}
