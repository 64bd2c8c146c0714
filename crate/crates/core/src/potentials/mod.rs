//! Sampling functions on `[0, 1)`, monotonicity audits and classification.

mod tilde;

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

pub use tilde::{ArcChoice, CircleMapTilde};

use crate::error::{domain, Error, Result};
use crate::numerics::{frac, ExtendedReal};

type SampleFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Built-in potential families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Builtin {
    /// `scale · x`.
    Sawtooth { scale: f64 },
    /// `-λ cot(πx)`, increasing from `-∞` to `+∞`, with `f(0) = ∞`.
    Maryland { lambda: f64 },
    /// `offset + slope·x + wiggle·sin(2πx)`.
    WeakSawtooth { offset: f64, slope: f64, wiggle: f64 },
    /// `value` everywhere.
    Constant { value: f64 },
}

#[derive(Clone)]
enum Kind {
    Builtin(Builtin),
    Table { xs: Vec<f64>, ys: Vec<f64> },
    Custom { name: String, f: SampleFn },
}

/// A real function on `[0, 1)`, extended to `ℝ` by periodicity, with its
/// values at the jump point recorded as extended reals.
#[derive(Clone)]
pub struct Potential {
    kind: Kind,
    f0: ExtendedReal,
    f1m: ExtendedReal,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential").field("name", &self.name()).field("f0", &self.f0).field("f1m", &self.f1m).finish()
    }
}

/// Default grid for audits run at construction time.
pub const AUDIT_GRID: usize = 1000;

impl Potential {
    /// # Errors
    /// Non-finite parameters, or a weak sawtooth whose wiggle breaks the
    /// uniform lower bound on divided differences.
    pub fn from_builtin(b: Builtin) -> Result<Self> {
        let params: &[f64] = match &b {
            Builtin::Sawtooth { scale } => &[*scale],
            Builtin::Maryland { lambda } => &[*lambda],
            Builtin::WeakSawtooth { offset, slope, wiggle } => &[*offset, *slope, *wiggle],
            Builtin::Constant { value } => &[*value],
        };
        if params.iter().any(|p| !p.is_finite()) {
            return domain("potential parameters must be finite");
        }
        let (f0, f1m) = match b {
            Builtin::Sawtooth { scale } => (0.0.into(), scale.into()),
            Builtin::Maryland { .. } => (ExtendedReal::Infinity, ExtendedReal::Infinity),
            Builtin::WeakSawtooth { offset, slope, .. } => (offset.into(), (offset + slope).into()),
            Builtin::Constant { value } => (value.into(), value.into()),
        };
        let pot = Self { kind: Kind::Builtin(b), f0, f1m };
        if let Builtin::WeakSawtooth { .. } = b {
            let audit = pot.check_gamma_monotone(4 * AUDIT_GRID)?;
            if !audit.ok {
                return domain(format!(
                    "weak sawtooth is not gamma-monotone (min divided difference {})",
                    audit.gamma_lower_bound
                ));
            }
        }
        let mismatch = pot.limit_audit(AUDIT_GRID);
        if mismatch > 1e-5 {
            return Err(Error::Consistency(format!("left limits disagree with values by {mismatch}")));
        }
        Ok(pot)
    }

    /// # Errors
    /// See [`Potential::from_builtin`].
    pub fn sawtooth(scale: f64) -> Result<Self> {
        Self::from_builtin(Builtin::Sawtooth { scale })
    }

    /// # Errors
    /// See [`Potential::from_builtin`].
    pub fn maryland(lambda: f64) -> Result<Self> {
        Self::from_builtin(Builtin::Maryland { lambda })
    }

    /// # Errors
    /// See [`Potential::from_builtin`].
    pub fn constant(value: f64) -> Result<Self> {
        Self::from_builtin(Builtin::Constant { value })
    }

    /// Piecewise-linear interpolation through `(x, y)` nodes.
    ///
    /// Nodes must start at `x = 0`, be strictly increasing and stay below 1.
    /// The left limit at 1 extrapolates the last segment.
    ///
    /// # Errors
    /// Fewer than two nodes, unsorted or out-of-range abscissae, non-finite ordinates.
    pub fn piecewise_table(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return domain("a table needs at least two nodes");
        }
        if points[0].0 != 0.0 {
            return domain("the first table node must be at x = 0");
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) || points.last().is_some_and(|p| p.0 >= 1.0) {
            return domain("table abscissae must increase strictly inside [0, 1)");
        }
        if points.iter().any(|p| !p.1.is_finite()) {
            return domain("table values must be finite");
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        let n = xs.len();
        let slope = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
        let f1m = ys[n - 1] + slope * (1.0 - xs[n - 1]);
        Ok(Self { f0: ys[0].into(), f1m: f1m.into(), kind: Kind::Table { xs, ys } })
    }

    /// Reads a table with one `x y` pair per line (comma or whitespace
    /// separated, `#` comments allowed).
    ///
    /// # Errors
    /// I/O failures, malformed lines and the conditions of [`Potential::piecewise_table`].
    pub fn from_table_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() });
            if fields.len() != 2 {
                return Err(Error::Parse { line: i + 1, msg: "expected two columns".into() });
            }
            points.push((parse(fields[0])?, parse(fields[1])?));
        }
        Self::piecewise_table(&points)
    }

    /// User-supplied function, continuous on `(0, 1)`. `f` may return `±inf`
    /// only at `x = 0`; `f1m` is its left limit at 1.
    ///
    /// # Errors
    /// `NaN` at 0 or for `f1m`.
    pub fn custom(name: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static, f1m: f64) -> Result<Self> {
        let f0 = ExtendedReal::new(f(0.0))?;
        Ok(Self { kind: Kind::Custom { name: name.to_owned(), f: Arc::new(f) }, f0, f1m: ExtendedReal::new(f1m)? })
    }

    #[must_use]
    pub fn name(&self) -> String {
        match &self.kind {
            Kind::Builtin(b) => match b {
                Builtin::Sawtooth { scale } => format!("sawtooth(scale={scale})"),
                Builtin::Maryland { lambda } => format!("maryland(lambda={lambda})"),
                Builtin::WeakSawtooth { offset, slope, wiggle } => {
                    format!("weak_sawtooth(offset={offset},slope={slope},wiggle={wiggle})")
                }
                Builtin::Constant { value } => format!("constant(value={value})"),
            },
            Kind::Table { xs, .. } => format!("table({} nodes)", xs.len()),
            Kind::Custom { name, .. } => name.clone(),
        }
    }

    #[must_use]
    pub fn builtin(&self) -> Option<Builtin> {
        match &self.kind {
            Kind::Builtin(b) => Some(*b),
            _ => None,
        }
    }

    /// `f(0)`.
    #[must_use]
    pub fn f0(&self) -> ExtendedReal {
        self.f0
    }

    /// `f(1 - 0)`.
    #[must_use]
    pub fn f1m(&self) -> ExtendedReal {
        self.f1m
    }

    fn raw(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Builtin(b) => match *b {
                Builtin::Sawtooth { scale } => scale * x,
                Builtin::Maryland { lambda } => -lambda / (PI * x).tan(),
                Builtin::WeakSawtooth { offset, slope, wiggle } => offset + slope * x + wiggle * (2.0 * PI * x).sin(),
                Builtin::Constant { value } => value,
            },
            Kind::Table { xs, ys } => {
                let k = xs.partition_point(|&a| a <= x).saturating_sub(1).min(xs.len() - 2);
                ys[k] + (ys[k + 1] - ys[k]) * (x - xs[k]) / (xs[k + 1] - xs[k])
            }
            Kind::Custom { f, .. } => f(x),
        }
    }

    /// `f(x)` for `x` reduced modulo 1.
    #[must_use]
    pub fn eval(&self, x: f64) -> ExtendedReal {
        let x = frac(x);
        if x == 0.0 {
            self.f0
        } else {
            ExtendedReal::from_f64(self.raw(x))
        }
    }

    /// `f(x - 0)` for `x ∈ (0, 1]`; other arguments are reduced into that range.
    #[must_use]
    pub fn left_limit(&self, x: f64) -> ExtendedReal {
        let x = frac(x);
        if x == 0.0 {
            self.f1m
        } else {
            ExtendedReal::from_f64(self.raw(x))
        }
    }

    /// Largest relative mismatch between `f(x - 0)` and `f(x - h)` on an interior grid.
    #[must_use]
    pub fn limit_audit(&self, n: usize) -> f64 {
        let h = 1e-9;
        (1..n)
            .map(|i| {
                let x = i as f64 / n as f64;
                match (self.left_limit(x), self.eval(x - h)) {
                    (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => (a - b).abs() / (1.0 + a.abs()),
                    (ExtendedReal::Infinity, ExtendedReal::Infinity) => 0.0,
                    _ => f64::INFINITY,
                }
            })
            .fold(0.0, f64::max)
    }

    /// Smallest divided difference `(f(y) - f(x))/(y - x)` over adjacent grid
    /// points `k/n` in `[0, 1)`; the point 0 is skipped when `f(0) = ∞`.
    ///
    /// # Errors
    /// `n < 2`, or an infinite value at an interior grid point.
    pub fn check_gamma_monotone(&self, n: usize) -> Result<GammaAudit> {
        if n < 2 {
            return domain("audit grid needs at least two points");
        }
        let start = usize::from(self.f0.is_infinite());
        let mut prev: Option<(f64, f64)> = None;
        let mut gamma = f64::INFINITY;
        for i in start..n {
            let x = i as f64 / n as f64;
            let Some(y) = self.eval(x).finite() else {
                return domain(format!("infinite value at interior point {x}"));
            };
            if let Some((px, py)) = prev {
                gamma = gamma.min((y - py) / (x - px));
            }
            prev = Some((x, y));
        }
        Ok(GammaAudit { gamma_lower_bound: gamma, ok: gamma > 0.0 })
    }

    /// # Errors
    /// Propagated from [`Potential::check_gamma_monotone`].
    pub fn classify(&self, n: usize) -> Result<Classification> {
        let audit = self.check_gamma_monotone(n)?;
        let continuous = self.f0 == self.f1m;
        let class = match self.builtin() {
            Some(Builtin::Maryland { .. }) => PotentialClass::Maryland,
            Some(Builtin::Constant { .. }) => PotentialClass::Constant,
            _ if continuous && self.f0.is_infinite() => PotentialClass::Maryland,
            _ if audit.ok && !continuous => PotentialClass::GammaMonotone,
            _ if audit.gamma_lower_bound == 0.0 && continuous => PotentialClass::Constant,
            _ => PotentialClass::Other,
        };
        Ok(Classification {
            class,
            simple_discontinuity: !continuous,
            continuous_circle_map: continuous,
            gamma_monotone: audit.ok,
            gamma_lower_bound: audit.gamma_lower_bound,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaAudit {
    pub gamma_lower_bound: f64,
    pub ok: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialClass {
    GammaMonotone,
    Maryland,
    Constant,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub class: PotentialClass,
    /// `f(0) ≠ f(1 - 0)`.
    pub simple_discontinuity: bool,
    /// `f(0) = f(1 - 0)` in `ℝ̄`, so `f` closes up into a circle map.
    pub continuous_circle_map: bool,
    pub gamma_monotone: bool,
    pub gamma_lower_bound: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sawtooth_audit() {
        let f = Potential::sawtooth(1.0).unwrap();
        let a = f.check_gamma_monotone(1000).unwrap();
        assert!((a.gamma_lower_bound - 1.0).abs() < 1e-9 && a.ok);
        assert_eq!(f.f0(), 0.0.into());
        assert_eq!(f.f1m(), 1.0.into());
        assert_eq!(f.left_limit(1.0), 1.0.into());
        assert_eq!(f.eval(1.25), 0.25.into());
    }

    #[test]
    fn maryland_audit() {
        let lambda = 2.0;
        let f = Potential::maryland(lambda).unwrap();
        assert!(f.f0().is_infinite() && f.f1m().is_infinite());
        let a = f.check_gamma_monotone(1000).unwrap();
        assert!(a.ok);
        assert!(a.gamma_lower_bound >= lambda * PI - 1e-6, "{a:?}");
        let c = f.classify(1000).unwrap();
        assert_eq!(c.class, PotentialClass::Maryland);
        assert!(c.continuous_circle_map && !c.simple_discontinuity);
    }

    #[test]
    fn weak_sawtooth_rejected_when_wiggle_too_large() {
        let e = Potential::from_builtin(Builtin::WeakSawtooth { offset: 0.0, slope: 1.0, wiggle: 0.2 });
        assert!(e.is_err());
        let ok = Potential::from_builtin(Builtin::WeakSawtooth { offset: 0.0, slope: 1.0, wiggle: 0.1 }).unwrap();
        let a = ok.check_gamma_monotone(4000).unwrap();
        assert!((a.gamma_lower_bound - (1.0 - 0.2 * PI)).abs() < 1e-3);
    }

    #[test]
    fn constant_is_not_gamma_monotone() {
        let f = Potential::constant(0.5).unwrap();
        let c = f.classify(100).unwrap();
        assert!(!c.gamma_monotone);
        assert_eq!(c.class, PotentialClass::Constant);
    }

    #[test]
    fn interior_infinity_is_an_error() {
        let f = Potential::custom("pole", |x| if (x - 0.5).abs() < 1e-12 { f64::INFINITY } else { x }, 1.0).unwrap();
        assert!(f.check_gamma_monotone(10).is_err());
    }

    #[test]
    fn table_interpolates_and_extrapolates() {
        let f = Potential::piecewise_table(&[(0.0, 0.0), (0.5, 1.0), (0.75, 2.0)]).unwrap();
        assert_eq!(f.eval(0.25), 0.5.into());
        assert_eq!(f.eval(0.875), 2.5.into());
        assert_eq!(f.f1m(), 3.0.into());
        assert!(Potential::piecewise_table(&[(0.1, 0.0), (0.5, 1.0)]).is_err());
        assert!(Potential::piecewise_table(&[(0.0, 0.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn limits_consistent_for_builtins() {
        for b in [
            Builtin::Sawtooth { scale: 3.0 },
            Builtin::Maryland { lambda: 1.0 },
            Builtin::WeakSawtooth { offset: 1.0, slope: 2.0, wiggle: 0.1 },
        ] {
            let f = Potential::from_builtin(b).unwrap();
            assert!(f.limit_audit(1000) < 1e-5, "{b:?}");
        }
    }
}
