use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::{cayley, ExtendedReal};
use crate::spectra::sturm::tridiagonal_eigenvalues;

/// Operator on `[-N, N]` with unit hopping whose diagonal may contain `∞`.
/// Infinite sites decouple; the finite runs between them are chains.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneralizedOperator {
    pub n: usize,
    pub diagonal: Vec<ExtendedReal>,
}

impl GeneralizedOperator {
    /// `values[k]` sits at site `k - N`.
    ///
    /// # Errors
    /// `values.len() != 2N + 1`.
    pub fn new(values: Vec<ExtendedReal>, n: usize) -> Result<Self> {
        if values.len() != 2 * n + 1 {
            return domain(format!("expected {} site values, got {}", 2 * n + 1, values.len()));
        }
        Ok(Self { n, diagonal: values })
    }

    #[must_use]
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Index ranges of maximal finite runs.
    #[must_use]
    pub fn chains(&self) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = None;
        for (k, v) in self.diagonal.iter().enumerate() {
            match (v.is_infinite(), start) {
                (false, None) => start = Some(k),
                (true, Some(s)) => {
                    out.push(s..k);
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push(s..self.dim());
        }
        out
    }

    /// Finite eigenvalues of all chains, ascending.
    #[must_use]
    pub fn finite_eigenvalues(&self) -> Vec<f64> {
        let mut ev = Vec::new();
        for c in self.chains() {
            let d: Vec<f64> = self.diagonal[c].iter().map(|v| v.to_f64()).collect();
            ev.extend(tridiagonal_eigenvalues(&d, &vec![1.0; d.len() - 1]));
        }
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// `U_H = i(H - i)(H + i)⁻¹`, assembled chain by chain from eigenvectors;
/// infinite sites contribute `i` on the diagonal.
#[must_use]
pub fn cayley_matrix(op: &GeneralizedOperator) -> DMatrix<Complex64> {
    let n = op.dim();
    let mut u = DMatrix::<Complex64>::zeros(n, n);
    for (k, v) in op.diagonal.iter().enumerate() {
        if v.is_infinite() {
            u[(k, k)] = Complex64::new(0.0, 1.0);
        }
    }
    for c in op.chains() {
        let d: Vec<f64> = op.diagonal[c.clone()].iter().map(|v| v.to_f64()).collect();
        let h = crate::oracle::tridiagonal_matrix(&d, &vec![1.0; d.len() - 1]);
        let (values, vectors) = crate::oracle::symmetric_eigen_sorted(h);
        let phases: Vec<Complex64> = values.iter().map(|&l| cayley(l.into())).collect();
        let m = c.len();
        for i in 0..m {
            for j in 0..m {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..m {
                    s += phases[k] * vectors[(i, k)] * vectors[(j, k)];
                }
                u[(c.start + i, c.start + j)] = s;
            }
        }
    }
    u
}

/// Largest singular value by Lanczos on `DᴴD` with full reorthogonalisation.
#[must_use]
pub fn operator_norm(d: &DMatrix<Complex64>) -> f64 {
    let n = d.ncols();
    if n == 0 {
        return 0.0;
    }
    let steps = n.min(120);
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(steps);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas: Vec<f64> = Vec::with_capacity(steps);
    // deterministic start vector with no special structure
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + ((i * 7919) % 101) as f64 / 101.0, ((i * 104_729) % 97) as f64 / 97.0));
    v /= Complex64::new(v.norm(), 0.0);
    let dh = d.adjoint();
    for _ in 0..steps {
        let mut w = &dh * (d * &v);
        let a = v.dotc(&w).re;
        alphas.push(a);
        basis.push(v.clone());
        for b in &basis {
            let proj = b.dotc(&w);
            w -= b * proj;
        }
        for b in &basis {
            let proj = b.dotc(&w);
            w -= b * proj;
        }
        let beta = w.norm();
        if beta < 1e-14 * alphas.iter().fold(1e-300f64, |m, x| m.max(x.abs())) || basis.len() == n {
            break;
        }
        betas.push(beta);
        v = w / Complex64::new(beta, 0.0);
    }
    let k = alphas.len();
    let top = tridiagonal_eigenvalues(&alphas, &betas[..k - 1]).last().copied().unwrap_or(0.0);
    top.max(0.0).sqrt()
}

/// `‖U_H - U_{H∞}‖` against `4/M`, where `H∞` puts `∞` on the sites `S`
/// and `M = min_S |V|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormBoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub m_min: f64,
    pub holds: bool,
}

/// # Errors
/// Wrong length, sites outside `[-N, N]`, or `M = 0`.
pub fn verify_norm_bound(values: &[ExtendedReal], sites: &[i64], n: usize) -> Result<NormBoundReport> {
    let op = GeneralizedOperator::new(values.to_vec(), n)?;
    let mut inf = op.clone();
    let mut m_min = f64::INFINITY;
    for &s in sites {
        if s.unsigned_abs() as usize > n {
            return domain(format!("site {s} outside the window"));
        }
        let k = (s + n as i64) as usize;
        m_min = m_min.min(values[k].to_f64().abs());
        inf.diagonal[k] = ExtendedReal::Infinity;
    }
    if m_min == 0.0 {
        return domain("the potential vanishes on S");
    }
    let lhs = operator_norm(&(cayley_matrix(&op) - cayley_matrix(&inf)));
    let rhs = 4.0 / m_min;
    Ok(NormBoundReport { lhs, rhs, m_min, holds: lhs <= rhs })
}

/// `max_ψ ‖(U_{H_j} - U_H) ψ‖` for every operator of a sequence, against a limit.
///
/// # Errors
/// Size mismatches.
pub fn strong_convergence_probe(
    sequence: &[Vec<ExtendedReal>],
    limit: &[ExtendedReal],
    n: usize,
    tests: &[DVector<Complex64>],
) -> Result<Vec<f64>> {
    let u = cayley_matrix(&GeneralizedOperator::new(limit.to_vec(), n)?);
    sequence
        .iter()
        .map(|vals| {
            let uj = cayley_matrix(&GeneralizedOperator::new(vals.clone(), n)?);
            let diff = uj - &u;
            tests
                .iter()
                .map(|psi| {
                    if psi.len() != 2 * n + 1 {
                        return domain("test vector has the wrong length");
                    }
                    Ok((&diff * psi).norm())
                })
                .try_fold(0.0f64, |m, r| r.map(|x| m.max(x)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(v: &[f64]) -> Vec<ExtendedReal> {
        v.iter().map(|&x| ExtendedReal::from_f64(x)).collect()
    }

    #[test]
    fn cayley_matrix_is_unitary_and_matches_resolvent() {
        let vals = ext(&[0.3, -1.0, 2.0, f64::INFINITY, 0.5]);
        let op = GeneralizedOperator::new(vals, 2).unwrap();
        let u = cayley_matrix(&op);
        let id = DMatrix::<Complex64>::identity(5, 5);
        assert!((u.adjoint() * &u - &id).norm() < 1e-12);
        // first chain against i(H - i)(H + i)^{-1}
        let h = crate::oracle::tridiagonal_matrix(&[0.3, -1.0, 2.0], &[1.0, 1.0]).map(|x| Complex64::new(x, 0.0));
        let i = Complex64::new(0.0, 1.0);
        let id3 = DMatrix::<Complex64>::identity(3, 3);
        let direct = (&h - &id3 * i) * (&h + &id3 * i).try_inverse().unwrap() * i;
        assert!((u.view((0, 0), (3, 3)) - direct).norm() < 1e-12);
        assert_eq!(u[(3, 3)], i);
        assert_eq!(u[(2, 3)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn lanczos_norm_matches_svd() {
        let vals: Vec<ExtendedReal> = (0..41).map(|k| ExtendedReal::from_f64((f64::from(k) * 1.3).sin() * 6.0)).collect();
        let mut inf = vals.clone();
        for k in [3, 10, 11, 30] {
            inf[k] = ExtendedReal::Infinity;
        }
        let d = cayley_matrix(&GeneralizedOperator::new(vals, 20).unwrap())
            - cayley_matrix(&GeneralizedOperator::new(inf, 20).unwrap());
        let svd = d.clone().svd(false, false).singular_values.max();
        assert!((operator_norm(&d) - svd).abs() < 1e-8 * svd.max(1.0));
    }

    #[test]
    fn chains_split() {
        let op = GeneralizedOperator::new(ext(&[f64::INFINITY, 1.0, 2.0, f64::INFINITY, 3.0]), 2).unwrap();
        assert_eq!(op.chains(), vec![1..3, 4..5]);
        assert_eq!(op.finite_eigenvalues().len(), 3);
    }

    #[test]
    fn single_site_norm_constant() {
        // For large M the difference is (2/M)·wwᵀ with ‖w‖² = 1 + 2·Im m(i) = √5,
        // m the free half-line m-function.
        let n = 40;
        let mut vals = vec![ExtendedReal::Finite(0.0); 2 * n + 1];
        vals[n] = 1000.0.into();
        let r = verify_norm_bound(&vals, &[0], n).unwrap();
        let constant = r.lhs * r.m_min;
        assert!((constant - 2.0 * 5f64.sqrt()).abs() < 1e-2, "{r:?}");
        assert!((r.rhs - 4.0 / 1000.0).abs() < 1e-15);
        assert!(verify_norm_bound(&vals, &[1], n).is_err());
    }
}
