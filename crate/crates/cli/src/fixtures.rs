//! Seeded fixture families used by `verify` and the acceptance checks.

use cantor_core::analysis::SymmetricFixture;
use cantor_core::numerics::ExtendedReal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Operator on `[-n, n]` with large values `|V| ≥ m` on the sites `sites`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormFixture {
    pub n: usize,
    pub values: Vec<ExtendedReal>,
    pub sites: Vec<i64>,
    pub m: f64,
}

/// `count` random fixtures: `n = 10`, background `V ∈ [-3, 3]`, one to three
/// large sites with `|V| = M(1 + u)`, `M ∈ [10, 100]`, `u ∈ [0, 1)`, random sign.
#[must_use]
pub fn norm_bound_fixtures(seed: u64, count: usize) -> Vec<NormFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 10usize;
    (0..count)
        .map(|_| {
            let mut values: Vec<f64> = (0..=2 * n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let m = rng.gen_range(10.0..100.0);
            let k = rng.gen_range(1..=3usize);
            let mut sites: Vec<i64> = Vec::with_capacity(k);
            while sites.len() < k {
                let s = rng.gen_range(-(n as i64)..=n as i64);
                if !sites.contains(&s) {
                    sites.push(s);
                }
            }
            sites.sort_unstable();
            for &s in &sites {
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                values[(s + n as i64) as usize] = sign * m * (1.0 + rng.gen_range(0.0..1.0));
            }
            NormFixture { n, values: values.into_iter().map(ExtendedReal::Finite).collect(), sites, m }
        })
        .collect()
}

/// Twenty reflection-symmetric fixtures `V(n) = 2 cos(|n| + 2πk/20)` on `[-50, 50]`.
#[must_use]
pub fn symmetric_fixtures() -> Vec<SymmetricFixture> {
    (0..20)
        .map(|k| {
            let shift = std::f64::consts::TAU * f64::from(k) / 20.0;
            SymmetricFixture::new((0..=50).map(|n| 2.0 * (f64::from(n) + shift).cos()).collect())
                .expect("finite values on a non-trivial range")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_seeded() {
        assert_eq!(norm_bound_fixtures(3, 5), norm_bound_fixtures(3, 5));
        for f in norm_bound_fixtures(1, 20) {
            for &s in &f.sites {
                assert!(f.values[(s + 10) as usize].to_f64().abs() >= f.m);
            }
        }
    }
}
