//! Independent reference routines. They share no code with the fast paths
//! they are used to check: dense factorisations come from `nalgebra`, and the
//! large tridiagonal solver is an implicit QL iteration.

use nalgebra::{DMatrix, SymmetricEigen};

/// Dense symmetric matrix of a chain with diagonal `diag` and off-diagonal `off`.
#[must_use]
pub fn tridiagonal_matrix(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
    let n = diag.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
    }
    for (i, &e) in off.iter().enumerate() {
        m[(i, i + 1)] = e;
        m[(i + 1, i)] = e;
    }
    m
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[must_use]
pub fn dense_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    sorted_eigenvalues(tridiagonal_matrix(diag, off))
}

/// Ring with unit hopping and corner coupling, assembled densely
/// (`n = 1, 2` handled as Bloch blocks).
#[must_use]
pub fn dense_ring_eigenvalues(diag: &[f64], corner: f64) -> Vec<f64> {
    let n = diag.len();
    let mut m = tridiagonal_matrix(diag, &vec![1.0; n.saturating_sub(1)]);
    match n {
        0 => return Vec::new(),
        1 => m[(0, 0)] += 2.0 * corner,
        _ => {
            m[(0, n - 1)] += corner;
            m[(n - 1, 0)] += corner;
        }
    }
    sorted_eigenvalues(m)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with Wilkinson shifts.
///
/// # Panics
/// If an eigenvalue needs more than 60 sweeps.
#[must_use]
pub fn ql_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 60, "QL iteration did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    d
}

/// Eigenvalues (ascending) with unit eigenvectors as columns, from a dense
/// symmetric matrix.
#[must_use]
pub fn symmetric_eigen_sorted(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let n = eig.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ql_matches_dense() {
        let diag: Vec<f64> = (0..40).map(|i| (f64::from(i) * 0.7).sin() * 3.0).collect();
        let off = vec![1.0; 39];
        let a = ql_tridiagonal_eigenvalues(&diag, &off);
        let b = dense_tridiagonal_eigenvalues(&diag, &off);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn ql_free_chain() {
        let n = 200;
        let a = ql_tridiagonal_eigenvalues(&vec![0.0; n], &vec![1.0; n - 1]);
        for (k, e) in a.iter().enumerate() {
            let exact = -2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((e - exact).abs() < 1e-12);
        }
    }
}
