use cantor_core::analysis::{band_stats, det_winding, hausdorff_distance, Metric};
use cantor_core::numerics::{ExtendedReal, Rational};
use cantor_core::oracle::{dense_ring_eigenvalues, dense_tridiagonal_eigenvalues, ql_tridiagonal_eigenvalues, tridiagonal_matrix};
use cantor_core::perturb::{gap_eigenvalue, trace_gap_flow, PeriodicBase};
use cantor_core::potentials::{ArcChoice, CircleMapTilde, Potential};
use cantor_core::spectra::sturm::{ring_eigenvalues, tridiagonal_eigenvalues};
use cantor_core::spectra::{discriminant_bands, green_00, site_values, RationalPhase, ThetaLoop};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn golden_approximant_rings_match_dense() {
    let f = Potential::sawtooth(10.0).unwrap();
    for (p, q) in [(21, 34), (34, 55), (55, 89)] {
        let r = Rational::new(p, q).unwrap();
        for u in [0.0, 0.3, 0.77] {
            let v: Vec<f64> = site_values(&f, r, RationalPhase { j: 0, u }, None).unwrap().iter().map(|x| x.to_f64()).collect();
            for corner in [1.0, -1.0] {
                let d = max_diff(&ring_eigenvalues(&v, corner), &dense_ring_eigenvalues(&v, corner));
                assert!(d < 1e-9, "q={q} u={u} corner={corner}: {d}");
            }
        }
    }
}

#[test]
fn localized_maryland_ring_keeps_q_eigenvalues() {
    let f = Potential::maryland(1.0).unwrap();
    for (p, q, u) in [(21, 34, 0.2890625), (34, 55, 0.02734375)] {
        let r = Rational::new(p, q).unwrap();
        let v: Vec<f64> = site_values(&f, r, RationalPhase { j: 0, u }, None).unwrap().iter().map(|x| x.to_f64()).collect();
        let ours = ring_eigenvalues(&v, 1.0);
        assert_eq!(ours.len(), q as usize);
        assert!(max_diff(&ours, &dense_ring_eigenvalues(&v, 1.0)) < 1e-9);
    }
}

#[test]
fn random_chains_match_ql_and_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [1usize, 2, 5, 40, 200] {
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let off: Vec<f64> = (1..n).map(|_| rng.gen_range(0.2..1.5)).collect();
        let ours = tridiagonal_eigenvalues(&diag, &off);
        assert!(max_diff(&ours, &ql_tridiagonal_eigenvalues(&diag, &off)) < 1e-10);
        assert!(max_diff(&ours, &dense_tridiagonal_eigenvalues(&diag, &off)) < 1e-10);
    }
}

#[test]
fn bands_contain_every_bloch_eigenvalue() {
    let v = [0.3, -1.2, 2.0, 0.7, -0.4];
    let bands = discriminant_bands(&v, None).unwrap();
    assert_eq!(bands.intervals().len(), 5);
    for k in 0..=16 {
        let theta = std::f64::consts::PI * f64::from(k) / 16.0;
        // real form of the Bloch matrix: eigenvalues of the ring with corner e^{iθ}
        let n = v.len();
        let mut h = nalgebra::DMatrix::<nalgebra::Complex<f64>>::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = v[i].into();
            if i + 1 < n {
                h[(i, i + 1)] = 1.0.into();
                h[(i + 1, i)] = 1.0.into();
            }
        }
        let z = nalgebra::Complex::from_polar(1.0, theta);
        h[(0, n - 1)] += z.conj();
        h[(n - 1, 0)] += z;
        for e in h.symmetric_eigenvalues().iter() {
            assert!(bands.distance(*e) < 1e-9, "θ={theta} E={e}");
        }
    }
}

#[test]
fn green_function_matches_truncated_resolvent() {
    let base = PeriodicBase::new(vec![0.5, -1.0, 1.5]).unwrap();
    let n = 400usize;
    let diag: Vec<f64> = (0..=2 * n).map(|i| base.value(i as i64 - n as i64)).collect();
    let h = tridiagonal_matrix(&diag, &vec![1.0; 2 * n]);
    for gap in base.gaps().iter().filter(|g| !g.is_unbounded()) {
        let lambda = 0.5 * (gap.lower.to_f64() + gap.upper.to_f64());
        let shifted = &h - nalgebra::DMatrix::<f64>::identity(2 * n + 1, 2 * n + 1) * lambda;
        let inv = shifted.try_inverse().unwrap();
        let g = green_00(&|k: i64| ExtendedReal::Finite(base.value(k)), lambda).unwrap();
        assert!((g.value - inv[(n, n)]).abs() < 1e-8, "{} vs {}", g.value, inv[(n, n)]);
    }
}

#[test]
fn rank_one_eigenvalue_matches_dense() {
    let base = PeriodicBase::new(vec![0.0, 2.0]).unwrap();
    let n = 300usize;
    for gap in base.gaps() {
        for t in [-3.0, 0.5, 4.0] {
            let ev = gap_eigenvalue(&base, &gap, t.into()).unwrap();
            let Some(ExtendedReal::Finite(l)) = ev.lambda else { continue };
            let mut diag: Vec<f64> = (0..=2 * n).map(|i| base.value(i as i64 - n as i64)).collect();
            diag[n] = t;
            let e = dense_tridiagonal_eigenvalues(&diag, &vec![1.0; 2 * n]);
            let nearest = e.iter().map(|x| (x - l).abs()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-8, "t={t} λ={l} nearest {nearest}");
        }
    }
}

#[test]
fn gap_flows_are_monotone() {
    let base = PeriodicBase::new(vec![0.0, 2.0, -1.0]).unwrap();
    let ts: Vec<ExtendedReal> = (-40..=40).map(|k| ExtendedReal::Finite(f64::from(k) * 0.37)).chain([ExtendedReal::Infinity]).collect();
    for gap in base.gaps() {
        let c = trace_gap_flow(&base, &gap, &ts).unwrap();
        assert!(c.monotone);
    }
}

#[test]
fn winding_counts_for_larger_q() {
    let f = Potential::sawtooth(2.0).unwrap();
    let tilde = CircleMapTilde::new(&f, ArcChoice::ThroughInfinity).unwrap();
    for (p, q) in [(13, 21), (21, 34)] {
        let lp = ThetaLoop::new(tilde.clone(), Rational::new(p, q).unwrap());
        assert_eq!(det_winding(&lp, 16).unwrap().winding, q as i64);
    }
}

#[test]
fn approximant_spectra_approach_each_other() {
    let f = Potential::sawtooth(1.0).unwrap();
    let spec = |p: u64, q: u64| {
        let r = Rational::new(p, q).unwrap();
        let v: Vec<f64> = site_values(&f, r, RationalPhase { j: 0, u: 0.0 }, None).unwrap().iter().map(|x| x.to_f64()).collect();
        discriminant_bands(&v, None).unwrap()
    };
    let (a, b, c) = (spec(8, 13), spec(13, 21), spec(21, 34));
    let ab = hausdorff_distance(&a, &b, Metric::Euclid).unwrap();
    let bc = hausdorff_distance(&b, &c, Metric::Euclid).unwrap();
    assert!(bc < ab, "{ab} {bc}");
    assert!(band_stats(&c, (-4.0, 5.0)).unwrap().max_band_length < band_stats(&a, (-4.0, 5.0)).unwrap().max_band_length);
}
