use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{symmetric_eigen_sorted, tridiagonal_matrix};

/// Reflection-symmetric potential `V(n) = V(-n)` on `[-N, N]`, stored as
/// `V(0), …, V(N)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetricFixture {
    half: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

/// Normalised eigenvector on `[-N, N]` (index `n + N`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixtureState {
    pub energy: f64,
    pub parity: Parity,
    pub vector: Vec<f64>,
}

impl FixtureState {
    #[must_use]
    pub fn at_origin(&self) -> f64 {
        self.vector[self.vector.len() / 2]
    }

    /// `(‖ψ₋‖, ‖ψ₊‖)`, the norms on `n < 0` and `n > 0`.
    #[must_use]
    pub fn half_norms(&self) -> (f64, f64) {
        let c = self.vector.len() / 2;
        let norm = |s: &[f64]| s.iter().map(|x| x * x).sum::<f64>().sqrt();
        (norm(&self.vector[..c]), norm(&self.vector[c + 1..]))
    }
}

impl SymmetricFixture {
    /// # Errors
    /// Fewer than two values or a non-finite value.
    pub fn new(half: Vec<f64>) -> Result<Self> {
        if half.len() < 2 || half.iter().any(|v| !v.is_finite()) {
            return Err(Error::Fixture("need finite values V(0), …, V(N) with N ≥ 1".into()));
        }
        Ok(Self { half })
    }

    /// # Errors
    /// Even length, or `V(n) ≠ V(-n)` beyond `1e-12` relative.
    pub fn from_full(values: &[f64]) -> Result<Self> {
        if values.len().is_multiple_of(2) {
            return Err(Error::Fixture("a symmetric fixture has 2N+1 sites".into()));
        }
        let n = values.len() / 2;
        for k in 1..=n {
            let (a, b) = (values[n - k], values[n + k]);
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::Fixture(format!("V({k}) = {b} differs from V(-{k}) = {a}")));
            }
        }
        Self::new(values[n..].to_vec())
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.half.len() - 1
    }

    #[must_use]
    pub fn potential(&self) -> Vec<f64> {
        let n = self.n();
        (0..=2 * n).map(|i| self.half[i.abs_diff(n)]).collect()
    }

    /// All eigenpairs, ascending, computed separately on the odd sector
    /// (Dirichlet half-line `1 … N`) and the even sector (`0 … N` with bond
    /// `√2` between `0` and `1`), so that parities are exact.
    #[must_use]
    pub fn states(&self) -> Vec<FixtureState> {
        let n = self.n();
        let r2 = std::f64::consts::SQRT_2;
        let mut out = Vec::with_capacity(2 * n + 1);
        let (eo, uo) = symmetric_eigen_sorted(tridiagonal_matrix(&self.half[1..], &vec![1.0; n - 1]));
        for (k, &e) in eo.iter().enumerate() {
            let mut v = vec![0.0; 2 * n + 1];
            for i in 1..=n {
                let x = uo[(i - 1, k)] / r2;
                v[n + i] = x;
                v[n - i] = -x;
            }
            out.push(FixtureState { energy: e, parity: Parity::Odd, vector: v });
        }
        let mut off = vec![1.0; n];
        off[0] = r2;
        let (ee, ue) = symmetric_eigen_sorted(tridiagonal_matrix(&self.half, &off));
        for (k, &e) in ee.iter().enumerate() {
            let mut v = vec![0.0; 2 * n + 1];
            v[n] = ue[(0, k)];
            for i in 1..=n {
                let x = ue[(i, k)] / r2;
                v[n + i] = x;
                v[n - i] = x;
            }
            out.push(FixtureState { energy: e, parity: Parity::Even, vector: v });
        }
        out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        out
    }
}

/// Open intervals between consecutive eigenvalues whose eigenvectors have
/// `|ψ(0)| > tol`, keeping those with at least two odd eigenvalues.
#[must_use]
pub fn admissible_windows(states: &[FixtureState], tol: f64) -> Vec<(f64, f64)> {
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(states.iter().filter(|s| s.at_origin().abs() > tol).map(|s| s.energy));
    edges.push(f64::INFINITY);
    edges
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|&(a, b)| states.iter().filter(|s| s.parity == Parity::Odd && s.energy > a && s.energy < b).count() >= 2)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaMainReport {
    pub lambda: f64,
    pub mu: f64,
    pub window: (f64, f64),
    pub m: f64,
    pub delta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `|⟨ψ₊, φ₊⟩|` for the two eigenvectors.
    pub orthogonality: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks `dist(λ, ∂J) ≤ |λ - μ| / √(1 - m²)` for every ordered pair of
/// distinct odd eigenvalues in the open interval `J`.
///
/// # Errors
/// [`Error::Fixture`] when `J` contains an eigenvalue whose eigenvector has
/// `|ψ(0)| > tol`.
pub fn lemma_main_verify(states: &[FixtureState], window: (f64, f64), tol: f64) -> Result<Vec<LemmaMainReport>> {
    let (a, b) = window;
    let inside: Vec<&FixtureState> = states.iter().filter(|s| s.energy > a && s.energy < b).collect();
    if let Some(s) = inside.iter().find(|s| s.at_origin().abs() > tol) {
        return Err(Error::Fixture(format!("eigenvalue {} in the window has psi(0) = {:e}", s.energy, s.at_origin())));
    }
    let odd: Vec<&FixtureState> = inside.into_iter().filter(|s| s.parity == Parity::Odd).collect();
    let c = states.first().map_or(0, |s| s.vector.len() / 2);
    let mut out = Vec::new();
    for phi in &odd {
        let (phm, php) = phi.half_norms();
        let delta = phm.min(php);
        let lhs = (phi.energy - a).min(b - phi.energy);
        for psi in &odd {
            if psi.energy == phi.energy {
                continue;
            }
            let (psm, psp) = psi.half_norms();
            let m = phm.max(psp).min(php.max(psm));
            let rhs = if m < 1.0 { (phi.energy - psi.energy).abs() / (1.0 - m * m).sqrt() } else { f64::INFINITY };
            out.push(LemmaMainReport {
                lambda: phi.energy,
                mu: psi.energy,
                window,
                m,
                delta,
                lhs,
                rhs,
                holds: lhs <= rhs,
                orthogonality: dot(&psi.vector[c + 1..], &phi.vector[c + 1..]).abs(),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    /// Minus the slope of `log|ψ(n)|` against `|n - n₀|`.
    pub fitted_rate: f64,
    pub stderr: f64,
    pub participation_ratio: f64,
    pub localized: bool,
    pub matches: bool,
    /// Points used in the fit.
    pub points: usize,
}

/// Below this amplitude `log|ψ|` is rounding noise.
pub const DECAY_FLOOR: f64 = 1e-13;

/// Exponential decay rate of an eigenvector away from its maximum, compared
/// with a reference Lyapunov exponent.
///
/// `ψ` counts as localized when its participation ratio `1/Σψ⁴` is below a
/// quarter of its length. The fit uses every site with `|ψ| > DECAY_FLOOR`
/// on both sides of the maximum.
#[must_use]
pub fn decay_rate(psi: &[f64], reference: f64) -> DecayFit {
    let norm2: f64 = psi.iter().map(|x| x * x).sum();
    let p4: f64 = psi.iter().map(|x| (x * x / norm2).powi(2)).sum();
    let participation_ratio = 1.0 / p4;
    let localized = participation_ratio < psi.len() as f64 / 4.0;
    let scale = norm2.sqrt();
    let peak = psi.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).map_or(0, |(i, _)| i);
    let pts: Vec<(f64, f64)> = psi
        .iter()
        .enumerate()
        .filter(|(i, x)| *i != peak && x.abs() / scale > DECAY_FLOOR)
        .map(|(i, x)| (i.abs_diff(peak) as f64, (x.abs() / scale).ln()))
        .collect();
    let k = pts.len();
    let (mut rate, mut stderr) = (f64::NAN, f64::INFINITY);
    if k >= 3 {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k as f64;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 {
            let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
            let resid: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
            rate = -slope;
            stderr = (resid / (k as f64 - 2.0) / sxx).sqrt();
        }
    }
    let matches = localized && (rate - reference).abs() <= (0.1 * reference).max(3.0 * stderr);
    DecayFit { fitted_rate: rate, stderr, participation_ratio, localized, matches, points: k }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::symmetric_eigen_sorted;

    fn cos_fixture(c: f64, n: usize) -> SymmetricFixture {
        SymmetricFixture::new((0..=n).map(|k| c * (k as f64).cos()).collect()).unwrap()
    }

    #[test]
    fn sectors_match_dense() {
        let fx = cos_fixture(2.0, 20);
        let v = fx.potential();
        let (e, _) = symmetric_eigen_sorted(tridiagonal_matrix(&v, &vec![1.0; v.len() - 1]));
        let states = fx.states();
        assert_eq!(states.len(), e.len());
        let h = tridiagonal_matrix(&v, &vec![1.0; v.len() - 1]);
        for (s, ed) in states.iter().zip(&e) {
            assert!((s.energy - ed).abs() < 1e-10);
            let x = nalgebra::DVector::from_column_slice(&s.vector);
            assert!((&h * &x - s.energy * &x).norm() < 1e-10);
            assert!((x.norm() - 1.0).abs() < 1e-12);
            if s.parity == Parity::Odd {
                assert_eq!(s.at_origin(), 0.0);
            }
        }
    }

    #[test]
    fn asymmetric_input_rejected() {
        assert!(SymmetricFixture::from_full(&[1.0, 0.0, 2.0]).is_err());
        assert!(SymmetricFixture::from_full(&[1.0, 0.0, 1.0]).is_ok());
    }

    #[test]
    fn cosine_fixture_pairs_hold() {
        let states = cos_fixture(2.0, 50).states();
        let windows = admissible_windows(&states, 1e-10);
        assert!(!windows.is_empty());
        for w in windows {
            let reps = lemma_main_verify(&states, w, 1e-10).unwrap();
            assert!(reps.len() >= 2);
            for r in reps {
                assert!(r.holds, "{r:?}");
                assert!(r.orthogonality < 1e-8);
                assert!((r.m - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn window_with_nonvanishing_state_is_rejected() {
        let states = cos_fixture(2.0, 10).states();
        assert!(matches!(lemma_main_verify(&states, (f64::NEG_INFINITY, f64::INFINITY), 1e-10), Err(Error::Fixture(_))));
    }

    #[test]
    fn single_eigenvalue_gives_no_pairs() {
        let states = cos_fixture(2.0, 10).states();
        let odd = states.iter().find(|s| s.parity == Parity::Odd).unwrap().energy;
        let reps = lemma_main_verify(&states, (odd - 1e-9, odd + 1e-9), 1e-10).unwrap();
        assert!(reps.is_empty());
    }

    #[test]
    fn free_state_is_extended() {
        let n = 101;
        let psi: Vec<f64> = (0..n).map(|k| (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).sin()).collect();
        let fit = decay_rate(&psi, 0.0);
        assert!(!fit.localized && !fit.matches);
    }

    #[test]
    fn exponential_profile_is_recovered() {
        let psi: Vec<f64> = (0..81).map(|k| (-0.7 * (k as f64 - 40.0).abs()).exp()).collect();
        let fit = decay_rate(&psi, 0.7);
        assert!(fit.localized && fit.matches);
        assert!((fit.fitted_rate - 0.7).abs() < 1e-10);
    }
}
