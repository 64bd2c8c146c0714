use serde::Serialize;

use super::set::SpectrumSet;
use super::sturm::{ring_eigenvalues, tridiagonal_eigenvalues};
use crate::error::{domain, Error, Result};
use crate::numerics::ExtendedReal;

/// How the period block is closed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Quasimomentum 0.
    Periodic,
    /// Quasimomentum `π`.
    Antiperiodic,
    /// No wrap-around bond.
    Open,
}

impl Boundary {
    fn corner(self) -> Option<f64> {
        match self {
            Self::Periodic => Some(1.0),
            Self::Antiperiodic => Some(-1.0),
            Self::Open => None,
        }
    }
}

/// Maximal run of finite sites. `closed` means the run is the whole block
/// wrapped into a ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub sites: Vec<usize>,
    pub closed: bool,
}

/// `q × q` block of a periodic operator with unit hopping.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicBlock {
    pub diagonal: Vec<ExtendedReal>,
    pub boundary: Boundary,
}

/// Spectrum of a block: finite eigenvalues (ascending) and the number of
/// infinite ones (one per infinite site).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockSpectrum {
    pub finite: Vec<f64>,
    pub infinite: usize,
}

impl PeriodicBlock {
    #[must_use]
    pub fn new(diagonal: Vec<ExtendedReal>, boundary: Boundary) -> Self {
        Self { diagonal, boundary }
    }

    /// Runs of finite sites between infinite ones, following the wrap-around
    /// bond unless the boundary is open.
    #[must_use]
    pub fn chains(&self) -> Vec<Chain> {
        let q = self.diagonal.len();
        let inf: Vec<usize> = (0..q).filter(|&k| self.diagonal[k].is_infinite()).collect();
        let wrap = self.boundary != Boundary::Open;
        if inf.is_empty() {
            return if q == 0 { Vec::new() } else { vec![Chain { sites: (0..q).collect(), closed: wrap }] };
        }
        let mut chains = Vec::new();
        if wrap {
            for (k, &a) in inf.iter().enumerate() {
                let b = if k + 1 < inf.len() { inf[k + 1] } else { inf[0] + q };
                let sites: Vec<usize> = (a + 1..b).map(|i| i % q).collect();
                if !sites.is_empty() {
                    chains.push(Chain { sites, closed: false });
                }
            }
        } else {
            let mut start = 0;
            for &a in inf.iter().chain(std::iter::once(&q)) {
                if a > start {
                    chains.push(Chain { sites: (start..a).collect(), closed: false });
                }
                start = a + 1;
            }
        }
        chains
    }

    fn finite_values(&self, sites: &[usize]) -> Vec<f64> {
        sites.iter().map(|&k| self.diagonal[k].finite().expect("chains hold finite sites")).collect()
    }

    #[must_use]
    pub fn eigenvalues(&self) -> BlockSpectrum {
        let mut finite = Vec::with_capacity(self.diagonal.len());
        let mut infinite = 0;
        for e in &self.diagonal {
            if e.is_infinite() {
                infinite += 1;
            }
        }
        for chain in self.chains() {
            let d = self.finite_values(&chain.sites);
            if chain.closed {
                finite.extend(ring_eigenvalues(&d, self.boundary.corner().expect("closed chains have a corner")));
            } else {
                finite.extend(tridiagonal_eigenvalues(&d, &vec![1.0; d.len().saturating_sub(1)]));
            }
        }
        finite.sort_by(f64::total_cmp);
        BlockSpectrum { finite, infinite }
    }
}

/// Finite site values, or the index of the first infinite one.
///
/// # Errors
/// [`Error::MustSplit`] when some value is `∞`.
pub fn finite_sites(values: &[ExtendedReal]) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(k, v)| v.finite().ok_or(Error::MustSplit { site: k }))
        .collect()
}

/// Spectrum of the `q`-periodic operator with finite period values `values`:
/// the bands `[E₁, E₂], [E₃, E₄], …` formed by merging the periodic and
/// antiperiodic block eigenvalues, clipped to `window` when given. Bands
/// closer than `4ε·scale` are merged (closed gaps).
///
/// # Errors
/// Empty input.
pub fn discriminant_bands(values: &[f64], window: Option<(f64, f64)>) -> Result<SpectrumSet> {
    if values.is_empty() {
        return domain("empty period");
    }
    let mut edges = ring_eigenvalues(values, 1.0);
    edges.extend(ring_eigenvalues(values, -1.0));
    edges.sort_by(f64::total_cmp);
    let scale = edges.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let bands: Vec<(f64, f64)> = edges.chunks(2).map(|c| (c[0], c[1])).collect();
    let set = SpectrumSet::new(bands, false).merge_closer_than(16.0 * f64::EPSILON * scale);
    Ok(match window {
        Some((lo, hi)) => set.clip(lo, hi),
        None => set,
    })
}

/// Spectrum of the periodic operator whose period may contain infinite
/// values: bands when all values are finite, otherwise the eigenvalues of the
/// decoupled open chains (each infinitely degenerate) together with `∞`.
#[must_use]
pub fn periodic_spectrum(values: &[ExtendedReal]) -> SpectrumSet {
    match finite_sites(values) {
        Ok(v) => discriminant_bands(&v, None).expect("non-empty period"),
        Err(_) => {
            let spec = PeriodicBlock::new(values.to_vec(), Boundary::Periodic).eigenvalues();
            SpectrumSet::new(spec.finite.iter().map(|&e| (e, e)).collect(), true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(v: &[f64]) -> Vec<ExtendedReal> {
        v.iter().map(|&x| ExtendedReal::from_f64(x)).collect()
    }

    #[test]
    fn two_periodic_bands() {
        let s = discriminant_bands(&[0.0, 2.0], None).unwrap();
        let r5 = 5f64.sqrt();
        let expect = [(1.0 - r5, 0.0), (2.0, 1.0 + r5)];
        assert_eq!(s.intervals().len(), 2);
        for (a, b) in s.intervals().iter().zip(expect) {
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn free_operator_is_one_band() {
        for q in 1..6 {
            let s = discriminant_bands(&vec![0.0; q], None).unwrap();
            assert_eq!(s.intervals().len(), 1, "q={q}: {s:?}");
            let (a, b) = s.intervals()[0];
            assert!((a + 2.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chains_split_at_infinite_sites() {
        let inf = f64::INFINITY;
        let b = PeriodicBlock::new(ext(&[1.0, inf, 2.0, 3.0, inf]), Boundary::Periodic);
        let chains = b.chains();
        assert_eq!(chains.len(), 2);
        assert_eq!(chains[0].sites, vec![2, 3]);
        assert_eq!(chains[1].sites, vec![0]);
        let open = PeriodicBlock::new(ext(&[1.0, inf, 2.0, 3.0, inf]), Boundary::Open).chains();
        assert_eq!(open[0].sites, vec![0]);
        assert_eq!(open[1].sites, vec![2, 3]);
        let spec = b.eigenvalues();
        assert_eq!(spec.infinite, 2);
        assert_eq!(spec.finite.len(), 3);
    }

    #[test]
    fn infinite_site_gives_flat_bands() {
        let s = periodic_spectrum(&ext(&[f64::INFINITY, 0.0, 0.0]));
        assert!(s.contains_infinity());
        let iv = s.intervals();
        assert_eq!(iv.len(), 2);
        assert!((iv[0].0 + 1.0).abs() < 1e-14 && (iv[1].1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn must_split_reports_site() {
        match finite_sites(&ext(&[0.0, f64::INFINITY])) {
            Err(Error::MustSplit { site }) => assert_eq!(site, 1),
            other => panic!("{other:?}"),
        }
    }
}
