use serde::Serialize;

use super::block::finite_sites;
use crate::error::Result;
use crate::numerics::ExtendedReal;

/// Entries above this magnitude trigger renormalisation of a running product.
const RESCALE_AT: f64 = 1e100;

/// A `2 × 2` matrix stored as `exp(log_scale) · m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferMatrix {
    pub m: [[f64; 2]; 2],
    pub log_scale: f64,
}

impl TransferMatrix {
    #[must_use]
    pub fn identity() -> Self {
        Self { m: [[1.0, 0.0], [0.0, 1.0]], log_scale: 0.0 }
    }

    /// Left-multiplies by the one-step matrix `[[E - v, -1], [1, 0]]`.
    pub fn step(&mut self, energy: f64, v: f64) {
        let a = energy - v;
        let [[m00, m01], [m10, m11]] = self.m;
        self.m = [[a * m00 - m10, a * m01 - m11], [m00, m01]];
        let big = self.m.iter().flatten().fold(0.0f64, |x, y| x.max(y.abs()));
        if big > RESCALE_AT {
            for r in &mut self.m {
                for x in r {
                    *x /= big;
                }
            }
            self.log_scale += big.ln();
        }
    }

    /// Trace in absolute units (may overflow to `±inf`).
    #[must_use]
    pub fn trace(&self) -> f64 {
        (self.m[0][0] + self.m[1][1]) * self.log_scale.exp()
    }

    /// Determinant in absolute units.
    #[must_use]
    pub fn determinant(&self) -> f64 {
        (self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]) * (2.0 * self.log_scale).exp()
    }
}

/// Monodromy `T_{q-1} ⋯ T_0` over one period.
///
/// # Errors
/// [`crate::Error::MustSplit`] if a site value is infinite.
pub fn transfer_product(values: &[ExtendedReal], energy: f64) -> Result<TransferMatrix> {
    let v = finite_sites(values)?;
    let mut t = TransferMatrix::identity();
    for x in v {
        t.step(energy, x);
    }
    Ok(t)
}

/// Discriminant `tr M(E)` of the period.
///
/// # Errors
/// See [`transfer_product`].
pub fn discriminant(values: &[ExtendedReal], energy: f64) -> Result<f64> {
    Ok(transfer_product(values, energy)?.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_site() {
        let t = transfer_product(&[1.0.into()], 3.0).unwrap();
        assert_eq!(t.m, [[2.0, -1.0], [1.0, 0.0]]);
    }

    #[test]
    fn free_discriminant_is_chebyshev() {
        // tr M for V = 0 and q sites is 2·T_q(E/2)
        for q in 1..8 {
            let v = vec![0.0.into(); q];
            for e in [-1.7, 0.3, 1.9] {
                let exact = 2.0 * (q as f64 * (e / 2.0f64).acos()).cos();
                assert!((discriminant(&v, e).unwrap() - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rescaling_keeps_value() {
        let v = vec![0.0.into(); 400];
        let t = transfer_product(&v, 3.0).unwrap();
        assert!(t.log_scale > 0.0);
        let k = (1.5f64 + (1.25f64).sqrt()).ln();
        assert!((t.trace().ln() - 400.0 * k).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn unimodular(v in proptest::collection::vec(-3.0f64..3.0, 1..20), e in -4.0f64..4.0) {
            let vals: Vec<ExtendedReal> = v.iter().map(|&x| x.into()).collect();
            let t = transfer_product(&vals, e).unwrap();
            prop_assume!(t.log_scale == 0.0);
            let norm2 = t.m.iter().flatten().map(|x| x * x).sum::<f64>();
            prop_assert!((t.determinant() - 1.0).abs() < 1e-13 * norm2.max(1.0));
        }
    }
}
