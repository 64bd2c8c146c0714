//! Sturm counts and bisection for symmetric tridiagonal matrices, open or
//! closed into a ring.

/// Pivots smaller than this are replaced by `-PIVOT_GUARD` (counted negative).
const PIVOT_GUARD: f64 = 1e-280;

fn guard(p: f64) -> f64 {
    if p.abs() < PIVOT_GUARD {
        -PIVOT_GUARD
    } else {
        p
    }
}

/// Number of eigenvalues strictly below `lambda` of the tridiagonal matrix
/// with diagonal `diag` and off-diagonal `off` (`off.len() + 1 == diag.len()`).
#[must_use]
pub fn sturm_count(diag: &[f64], off: &[f64], lambda: f64) -> usize {
    let mut count = 0;
    let mut p = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        p = guard(d - lambda - e2 / p);
        if p < 0.0 {
            count += 1;
        }
    }
    count
}

/// Sturm count for the ring matrix with unit off-diagonals and corner
/// coupling `corner` between the first and last sites (`n ≥ 2`).
///
/// The last site is split off: the count of the open chain on sites
/// `0..n-1` plus the sign of the Schur complement
/// `d_{n-1} - λ - wᵀ(T - λ)⁻¹w`, with the solve done by Gaussian elimination
/// with partial pivoting. Direct `LDLᵀ` of the ring is avoided because its
/// fill-in cancels catastrophically after a small pivot.
#[must_use]
pub fn ring_sturm_count(diag: &[f64], corner: f64, lambda: f64) -> usize {
    let n = diag.len();
    debug_assert!(n >= 2);
    let m = n - 1;
    let off = vec![1.0; m - 1];
    let mut w = vec![0.0; m];
    w[0] += corner;
    w[m - 1] += 1.0;
    let step = 1e-13 * lambda.abs().max(1.0);
    let mut l = lambda;
    // λ on a spectral point of the open chain: move just below it
    for k in 0..16 {
        let a: Vec<f64> = diag[..m].iter().map(|d| d - l).collect();
        if let Some(x) = solve_tridiagonal(&a, &off, &w) {
            let schur = diag[m] - l - w.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
            return sturm_count(&diag[..m], &off, l) + usize::from(schur < 0.0);
        }
        l -= step * f64::from(1u32 << k);
    }
    sturm_count(&diag[..m], &off, l)
}

/// Solves the symmetric tridiagonal system `(diag, off) x = b` by Gaussian
/// elimination with partial pivoting. `None` when a pivot is negligible
/// against the matrix scale.
fn solve_tridiagonal(diag: &[f64], off: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let scale = diag.iter().fold(2.0f64, |s, d| s.max(d.abs() + 2.0));
    let m = diag.len();
    let mut d = diag.to_vec();
    let mut dl = off.to_vec();
    let mut du = off.to_vec();
    let mut du2 = vec![0.0; m.saturating_sub(2)];
    let mut b = b.to_vec();
    for i in 0..m.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            let l = if d[i] == 0.0 { 0.0 } else { dl[i] / d[i] };
            d[i + 1] -= l * du[i];
            b[i + 1] -= l * b[i];
        } else {
            let l = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - l * tmp;
            if i + 2 < m {
                du2[i] = du[i + 1];
                du[i + 1] *= -l;
            }
            du[i] = tmp;
            let bi = b[i];
            b[i] = b[i + 1];
            b[i + 1] = bi - l * b[i + 1];
        }
        dl[i] = 0.0;
    }
    if d.iter().any(|p| p.abs() <= 1e-14 * scale) {
        return None;
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut r = b[i];
        if i + 1 < m {
            r -= du[i] * x[i + 1];
        }
        if i + 2 < m {
            r -= du2[i] * x[i + 2];
        }
        x[i] = r / d[i];
    }
    Some(x)
}

/// Gershgorin interval for a ring or chain with off-diagonal magnitudes `off_sum[i]` per row.
fn gershgorin(diag: &[f64], radius: f64) -> (f64, f64) {
    let lo = diag.iter().copied().fold(f64::INFINITY, f64::min) - radius;
    let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + radius;
    (lo - 1e-9 * (1.0 + lo.abs()), hi + 1e-9 * (1.0 + hi.abs()))
}

/// All `n` eigenvalues in `[lo, hi]` given a counting function, by recursive
/// bisection. Counts are clamped between those at the interval ends, so a
/// count that is off by one within a few ulps of an eigenvalue cannot create
/// or lose eigenvalues.
pub fn bisect_all(count: impl Fn(f64) -> usize, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let (c_lo, c_hi) = (count(lo), count(hi));
    split(&count, lo, hi, c_lo, c_hi, &mut out);
    out
}

fn split(count: &impl Fn(f64) -> usize, lo: f64, hi: f64, c_lo: usize, c_hi: usize, out: &mut Vec<f64>) {
    if c_hi <= c_lo {
        return;
    }
    let tol = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
    let mid = 0.5 * (lo + hi);
    if hi - lo <= tol || mid <= lo || mid >= hi {
        out.extend(std::iter::repeat_n(mid, c_hi - c_lo));
        return;
    }
    let c_mid = count(mid).clamp(c_lo, c_hi);
    split(count, lo, mid, c_lo, c_mid, out);
    split(count, mid, hi, c_mid, c_hi, out);
}

/// Eigenvalues, ascending, of the tridiagonal matrix `(diag, off)`.
#[must_use]
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    if diag.is_empty() {
        return Vec::new();
    }
    let radius = 2.0 * off.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let (lo, hi) = gershgorin(diag, radius);
    bisect_all(|l| sturm_count(diag, off, l), diag.len(), lo, hi)
}

/// Eigenvalues, ascending, of the `n`-site ring with unit hopping closed by
/// `corner` (`+1` periodic, `-1` antiperiodic). Small rings fold the corner
/// into the diagonal or the single bond.
#[must_use]
pub fn ring_eigenvalues(diag: &[f64], corner: f64) -> Vec<f64> {
    match diag.len() {
        0 => Vec::new(),
        1 => vec![diag[0] + 2.0 * corner],
        2 => tridiagonal_eigenvalues(diag, &[1.0 + corner]),
        _ => {
            let (lo, hi) = gershgorin(diag, 1.0 + corner.abs().max(1.0));
            bisect_all(|l| ring_sturm_count(diag, corner, l), diag.len(), lo, hi)
        }
    }
}
