//! Work items per command, a bounded worker pool and the ordered merge.

use std::panic::{catch_unwind, AssertUnwindSafe};

use cantor_core::analysis::{
    admissible_windows, band_stats, det_winding, gap_filling_check, hausdorff_distance, lemma_main_verify, Metric,
};
use cantor_core::hull::HullModel;
use cantor_core::numerics::{continued_fraction, from_cayley_angle, ExtendedReal, Frequency, Rational};
use cantor_core::perturb::{free_gap_eigenvalue, gap_eigenvalue, trace_gap_flow, verify_norm_bound, PeriodicBase};
use cantor_core::potentials::{ArcChoice, CircleMapTilde, Potential};
use cantor_core::spectra::{
    discriminant_bands, finite_sites, lyapunov, periodic_spectrum, site_values, union_spectrum_over_phases, RationalPhase,
    SpectrumSet, ThetaLoop, UnionOptions,
};
use cantor_core::{Error, Result};
use rayon::prelude::*;

use crate::config::{Command, JobConfig};
use crate::fixtures::{norm_bound_fixtures, symmetric_fixtures};
use crate::records::Record;

/// Exit status of a sweep.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<Record>,
    pub exit_code: i32,
}

type Job<'a> = Box<dyn Fn() -> Result<Vec<Record>> + Send + Sync + 'a>;

/// Runs every work item of the configured command on `workers` threads and
/// merges the records in item order.
///
/// A failing or panicking item yields a single record with
/// `status = "failed"` and the sweep continues.
///
/// # Errors
/// Setup failures: an unusable potential or frequency for the command, or a
/// thread pool that cannot be built.
pub fn run_sweep(cfg: &JobConfig, workers: usize) -> Result<SweepOutput> {
    let f = cfg.potential.build()?;
    let jobs = jobs(cfg, &f)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Consistency(format!("worker pool: {e}")))?;
    let results: Vec<Vec<Record>> = pool.install(|| jobs.par_iter().enumerate().map(|(i, job)| run_item(cfg.command, i, job)).collect());
    let mut records: Vec<Record> = results.into_iter().flatten().collect();
    if cfg.command == Command::CantorTrend {
        records.push(trend_summary(&records));
    }
    let failed = records.iter().any(|r| r.get("status").and_then(|s| s.as_str()) == Some("failed"));
    let verify_failed = records.iter().any(|r| r.get("pass").and_then(serde_json::Value::as_bool) == Some(false));
    let exit_code = if failed {
        EXIT_ERROR
    } else if verify_failed {
        EXIT_VERIFY_FAILED
    } else {
        EXIT_OK
    };
    Ok(SweepOutput { records, exit_code })
}

fn run_item(command: Command, index: usize, job: &Job<'_>) -> Vec<Record> {
    let failure = |msg: String| vec![Record::new().with("command", command.name()).with("index", index).with("status", "failed").with("error", msg)];
    match catch_unwind(AssertUnwindSafe(job)) {
        Ok(Ok(records)) => records
            .into_iter()
            .map(|r| r.with("command", command.name()).with("index", index).with("status", "ok"))
            .collect(),
        Ok(Err(e)) => failure(e.to_string()),
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            failure(format!("panic: {msg}"))
        }
    }
}

fn require_rational(cfg: &JobConfig) -> Result<Rational> {
    cfg.frequency
        .as_rational()
        .ok_or_else(|| Error::Domain(format!("{} needs a rational frequency p/q", cfg.command.name())))
}

/// The frequency itself when rational, otherwise its convergents (after
/// `0/1`), at most `cfg.convergents` of them with distinct denominators.
fn rationals(cfg: &JobConfig) -> Result<Vec<Rational>> {
    if let Some(r) = cfg.frequency.as_rational() {
        return Ok(vec![r]);
    }
    let cf = continued_fraction(&cfg.frequency, cfg.convergents + 2);
    let mut out: Vec<Rational> = Vec::new();
    for &(p, q) in cf.convergents.iter().skip(1) {
        if out.last().is_none_or(|r| r.q < q) {
            out.push(Rational::new(p, q)?);
        }
    }
    out.truncate(cfg.convergents);
    Ok(out)
}

fn phase_values(f: &Potential, r: Rational, x: f64) -> Result<Vec<ExtendedReal>> {
    site_values(f, r, RationalPhase::from_x(x, r.q), None)
}

fn band_record(set: &SpectrumSet, window: (f64, f64)) -> Result<Record> {
    let clipped = set.clip(window.0, window.1);
    let stats = band_stats(set, window)?;
    Ok(Record::new()
        .with("bands", clipped.intervals().to_vec())
        .with("band_count", stats.band_count)
        .with("measure", stats.total_measure)
        .with("max_band_length", stats.max_band_length)
        .with("min_gap_length", stats.min_gap_length)
        .with("contains_infinity", set.contains_infinity()))
}

fn jobs<'a>(cfg: &'a JobConfig, f: &'a Potential) -> Result<Vec<Job<'a>>> {
    let mut jobs: Vec<Job<'a>> = Vec::new();
    match cfg.command {
        Command::Bands => {
            let r = require_rational(cfg)?;
            for k in 0..cfg.theta_samples {
                let x = k as f64 / cfg.theta_samples as f64;
                jobs.push(Box::new(move || {
                    let set = periodic_spectrum(&phase_values(f, r, x)?);
                    Ok(vec![band_record(&set, cfg.window)?.with("x", x).with("p", r.p).with("q", r.q)])
                }));
            }
        }
        Command::Lyapunov => {
            let alpha = cfg.frequency.value();
            let (lo, hi) = cfg.window;
            let n = ((hi - lo) / cfg.resolution).round() as usize + 1;
            for k in 0..n {
                let e = (lo + k as f64 * cfg.resolution).min(hi);
                jobs.push(Box::new(move || {
                    let est = lyapunov(f, alpha, e, cfg.lyapunov_steps, cfg.lyapunov_phases, cfg.seed)?;
                    Ok(vec![Record::new()
                        .with("energy", e)
                        .with("mean", est.mean)
                        .with("stderr", est.stderr)
                        .with("n_phases", est.n_phases)
                        .with("n_steps", est.n_steps)
                        .with("skipped_fraction", est.skipped_fraction)
                        .with("reliable", est.reliable)])
                }));
            }
        }
        Command::GapFlow => {
            let r = require_rational(cfg)?;
            let period = finite_sites(&phase_values(f, r, cfg.phase)?)?;
            let base = PeriodicBase::new(period)?;
            let ts: Vec<ExtendedReal> =
                (0..cfg.t_samples).map(|k| from_cayley_angle(std::f64::consts::TAU * k as f64 / cfg.t_samples as f64)).collect();
            for gap in base.gaps() {
                let base = base.clone();
                let ts = ts.clone();
                jobs.push(Box::new(move || {
                    let c = trace_gap_flow(&base, &gap, &ts)?;
                    let samples: Vec<(ExtendedReal, Option<ExtendedReal>)> = c.samples.iter().map(|s| (s.t, s.lambda)).collect();
                    Ok(vec![Record::new()
                        .with("gap", (gap.lower, gap.upper))
                        .with("unbounded", gap.is_unbounded())
                        .with("samples", samples)
                        .with("window", c.window)
                        .with("endpoint_lambdas", c.endpoint_lambdas)
                        .with("monotone", c.monotone)])
                }));
            }
        }
        Command::Winding => {
            let tilde = CircleMapTilde::for_potential(f, cfg.arc)?;
            let degree = tilde.degree(512)?;
            for r in rationals(cfg)? {
                let tilde = tilde.clone();
                jobs.push(Box::new(move || {
                    let w = det_winding(&ThetaLoop::new(tilde.clone(), r), 16)?;
                    let expected = r.q as i64 * degree;
                    Ok(vec![Record::new()
                        .with("p", r.p)
                        .with("q", r.q)
                        .with("winding", w.winding)
                        .with("raw", w.raw)
                        .with("samples", w.samples)
                        .with("degree", degree)
                        .with("expected", expected)
                        .with("matches", w.winding == expected)])
                }));
            }
        }
        Command::Hull => {
            let n = i64::from(cfg.hull_terms);
            let model = HullModel::new(cfg.frequency.clone(), cfg.hull_terms)?;
            for k in -n..=n {
                let model = model.clone();
                jobs.push(Box::new(move || {
                    let g = model.gap_lookup(k)?;
                    Ok(vec![Record::new()
                        .with("n", k)
                        .with("left", g.left)
                        .with("right", g.right)
                        .with("width", g.width())
                        .with("labels", g.labels.clone())
                        .with("merged", g.merged)])
                }));
            }
        }
        Command::CantorTrend => {
            if cfg.frequency.is_rational() {
                return Err(Error::Domain("cantor-trend needs an irrational frequency".into()));
            }
            let rs = rationals(cfg)?;
            if rs.len() < 3 {
                return Err(Error::Domain("cantor-trend needs at least three convergents".into()));
            }
            for (k, &r) in rs.iter().enumerate() {
                let prev = k.checked_sub(1).map(|j| rs[j]);
                jobs.push(Box::new(move || {
                    let set = periodic_spectrum(&phase_values(f, r, cfg.phase)?);
                    let haus = match prev {
                        Some(pr) => {
                            let ps = periodic_spectrum(&phase_values(f, pr, cfg.phase)?);
                            Some(hausdorff_distance(&ps, &set, Metric::Chordal)?)
                        }
                        None => None,
                    };
                    let union = union_spectrum_over_phases(f, r, &UnionOptions::new(cfg.epsilon, cfg.window))?;
                    let cover = union.set.clip(cfg.window.0, cfg.window.1);
                    let n = ((cfg.window.1 - cfg.window.0) / cfg.epsilon).round() as usize + 1;
                    let covered = (0..n).filter(|&i| cover.contains((cfg.window.0 + i as f64 * cfg.epsilon).min(cfg.window.1))).count();
                    Ok(vec![band_record(&set, cfg.window)?
                        .with("p", r.p)
                        .with("q", r.q)
                        .with("hausdorff_to_previous", haus)
                        .with("covered_fraction", band_stats(&set, cfg.window)?.covered_fraction)
                        .with("phase_union_coverage", covered as f64 / n as f64)])
                }));
            }
        }
        Command::GapFilling => {
            let tilde = CircleMapTilde::for_potential(f, cfg.arc)?;
            for r in rationals(cfg)? {
                let tilde = tilde.clone();
                jobs.push(Box::new(move || {
                    let rep = gap_filling_check(&ThetaLoop::new(tilde.clone(), r), cfg.window, cfg.resolution, cfg.epsilon)?;
                    Ok(vec![Record::new()
                        .with("p", r.p)
                        .with("q", r.q)
                        .with("covered_fraction", rep.covered_fraction)
                        .with("holes", rep.holes.clone())
                        .with("grid_points", rep.grid_points)
                        .with("samples", rep.samples)
                        .with("contains_infinity", rep.contains_infinity)])
                }));
            }
        }
        Command::Verify => {
            for suite in &cfg.suites {
                let inject = cfg.inject_failure.as_deref() == Some(suite.as_str());
                jobs.push(Box::new(move || {
                    let mut rec = run_suite(suite, cfg.seed)?;
                    if inject {
                        rec.set("pass", false);
                        rec.set("injected", true);
                    }
                    Ok(vec![rec.with("suite", suite.as_str())])
                }));
            }
        }
    }
    Ok(jobs)
}

fn trend_summary(rows: &[Record]) -> Record {
    let ok: Vec<&Record> = rows.iter().filter(|r| r.get("status").and_then(|s| s.as_str()) == Some("ok")).collect();
    let series = |key: &str| -> Vec<f64> { ok.iter().filter_map(|r| r.number(key)).collect() };
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    Record::new()
        .with("command", "cantor-trend")
        .with("kind", "summary")
        .with("rows", ok.len())
        .with("max_band_length_decreasing", decreasing(&series("max_band_length")))
        .with("hausdorff_decreasing", decreasing(&series("hausdorff_to_previous")))
        .with("band_count_equals_q", ok.iter().all(|r| r.number("band_count") == r.number("q")))
        .with("min_phase_union_coverage", series("phase_union_coverage").into_iter().fold(f64::INFINITY, f64::min))
        .with("status", "ok")
}

/// Width of the tolerance used by the `lemma_main` suite for `|ψ(0)|`.
pub const LEMMA_TOL: f64 = 1e-10;

/// One verification suite as a record with `pass`, `checked` and `failures`.
///
/// # Errors
/// Unknown suite names or failures of the underlying computations.
pub fn run_suite(name: &str, seed: u64) -> Result<Record> {
    let rec = |checked: usize, failures: usize, worst: f64| {
        Record::new().with("pass", failures == 0).with("checked", checked).with("failures", failures).with("worst", worst)
    };
    match name {
        "band_oracle" => {
            let s = discriminant_bands(&[0.0, 2.0], None)?;
            let r5 = 5f64.sqrt();
            let expect = [(1.0 - r5, 0.0), (2.0, 1.0 + r5)];
            let iv = s.intervals();
            let worst = if iv.len() == 2 {
                iv.iter().zip(expect).map(|(a, b)| (a.0 - b.0).abs().max((a.1 - b.1).abs())).fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            Ok(rec(1, usize::from(!(worst <= 1e-9)), worst))
        }
        "rank_one" => {
            let base = PeriodicBase::new(vec![0.0])?;
            let gap = base.gaps()[0];
            let mut worst = 0.0f64;
            for t in [3.0, -0.5, 10.0] {
                let ev = gap_eigenvalue(&base, &gap, t.into())?;
                let exact = free_gap_eigenvalue(t.into()).map(ExtendedReal::to_f64);
                let d = match (ev.lambda.map(ExtendedReal::to_f64), exact) {
                    (Some(a), Some(b)) => (a - b).abs(),
                    _ => f64::INFINITY,
                };
                worst = worst.max(d);
            }
            Ok(rec(3, usize::from(!(worst <= 1e-8)), worst))
        }
        "norm_bound" => {
            let fx = norm_bound_fixtures(seed, 100);
            let mut failures = 0;
            let mut worst = 0.0f64;
            for x in &fx {
                let r = verify_norm_bound(&x.values, &x.sites, x.n)?;
                worst = worst.max(r.lhs * r.m_min);
                failures += usize::from(!r.holds);
            }
            Ok(rec(fx.len(), failures, worst).with("worst_is", "max M·‖U_H − U_H∞‖"))
        }
        "lemma_main" => {
            let mut checked = 0;
            let mut failures = 0;
            let mut worst_orth = 0.0f64;
            for fx in symmetric_fixtures() {
                let states = fx.states();
                for w in admissible_windows(&states, LEMMA_TOL) {
                    for r in lemma_main_verify(&states, w, LEMMA_TOL)? {
                        checked += 1;
                        worst_orth = worst_orth.max(r.orthogonality);
                        failures += usize::from(!r.holds || r.orthogonality > 1e-8);
                    }
                }
            }
            Ok(rec(checked, failures, worst_orth).with("worst_is", "max |<θ+, φ+>|"))
        }
        "winding" => {
            let mut checked = 0;
            let mut failures = 0;
            for f in [Potential::sawtooth(1.0)?, Potential::maryland(1.0)?] {
                for arc in [ArcChoice::ThroughInfinity, ArcChoice::Bounded] {
                    let tilde = CircleMapTilde::for_potential(&f, arc)?;
                    let deg = tilde.degree(512)?;
                    for r in continued_fraction(&Frequency::golden(), 6).convergents.iter().skip(1) {
                        let r = Rational::new(r.0, r.1)?;
                        let w = det_winding(&ThetaLoop::new(tilde.clone(), r), 16)?;
                        checked += 1;
                        failures += usize::from(w.winding != r.q as i64 * deg);
                    }
                }
            }
            Ok(rec(checked, failures, 0.0))
        }
        other => Err(Error::Domain(format!("unknown suite {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn run(text: &str, workers: usize) -> SweepOutput {
        run_sweep(&parse_config(text).unwrap(), workers).unwrap()
    }

    #[test]
    fn bands_in_theta_order() {
        let out = run("command = bands\nalpha = 2/5\n[grid]\ntheta_samples = 10\n", 3);
        assert_eq!(out.records.len(), 10);
        assert_eq!(out.exit_code, EXIT_OK);
        for (k, r) in out.records.iter().enumerate() {
            assert_eq!(r.number("index"), Some(k as f64));
            assert_eq!(r.number("x"), Some(k as f64 / 10.0));
        }
    }

    #[test]
    fn worker_count_does_not_change_bytes() {
        let text = "command = lyapunov\nalpha = golden\nwindow = [-1, 1]\n[grid]\nresolution = 0.5\n[tolerance]\nlyapunov_steps = 500\nlyapunov_phases = 4\n";
        let a = run(text, 1);
        let b = run(text, 4);
        let lines = |o: &SweepOutput| o.records.iter().map(Record::to_line).collect::<Vec<_>>();
        assert_eq!(lines(&a), lines(&b));
    }

    #[test]
    fn passing_and_injected_verify() {
        let out = run("command = verify\nalpha = 1/2\n[verify]\nsuites = band_oracle, rank_one\n", 2);
        assert_eq!(out.exit_code, EXIT_OK);
        let out = run("command = verify\nalpha = 1/2\n[verify]\nsuites = band_oracle, rank_one\ninject_failure = rank_one\n", 2);
        assert_eq!(out.exit_code, EXIT_VERIFY_FAILED);
        let flagged: Vec<&Record> = out.records.iter().filter(|r| r.get("pass") == Some(&serde_json::Value::Bool(false))).collect();
        assert_eq!(flagged.len(), 1);
        assert_eq!(flagged[0].get("suite").and_then(|s| s.as_str()), Some("rank_one"));
    }

    #[test]
    fn panicking_item_is_isolated() {
        let jobs: Vec<Job<'_>> = vec![Box::new(|| Ok(vec![Record::new()])), Box::new(|| panic!("boom")), Box::new(|| Ok(vec![Record::new()]))];
        let rows: Vec<Vec<Record>> = jobs.iter().enumerate().map(|(i, j)| run_item(Command::Bands, i, j)).collect();
        assert_eq!(rows[1][0].get("status").and_then(|s| s.as_str()), Some("failed"));
        assert!(rows[1][0].get("error").and_then(|s| s.as_str()).unwrap().contains("boom"));
        assert_eq!(rows[2][0].get("status").and_then(|s| s.as_str()), Some("ok"));
    }

    #[test]
    fn bands_need_rational_frequency() {
        assert!(run_sweep(&parse_config("command = bands\nalpha = golden\n").unwrap(), 1).is_err());
    }
}
