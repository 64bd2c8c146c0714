//! Job files: flat `key = value` lines grouped under `[section]` headers.
//!
//! ```text
//! command = bands
//!
//! [potential]
//! kind = sawtooth
//! scale = 1
//!
//! [frequency]
//! alpha = 5/8
//!
//! [grid]
//! window = [-3, 3]
//! theta_samples = 10
//! ```
//!
//! A handful of keys may also appear before the first header: `command`,
//! `potential` (the kind), `alpha`, `window`, `arc`, `worker_count` and `seed`.
//! `#` starts a comment.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use cantor_core::numerics::Frequency;
use cantor_core::potentials::{ArcChoice, Builtin, Potential};
use cantor_core::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Bands,
    Lyapunov,
    GapFlow,
    Winding,
    Hull,
    CantorTrend,
    GapFilling,
    Verify,
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "bands" => Self::Bands,
            "lyapunov" => Self::Lyapunov,
            "gapflow" => Self::GapFlow,
            "winding" => Self::Winding,
            "hull" => Self::Hull,
            "cantor-trend" => Self::CantorTrend,
            "gap-filling" => Self::GapFilling,
            "verify" => Self::Verify,
            _ => return Err(format!("unknown command {s:?}")),
        })
    }
}

impl Command {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Self::Bands => "bands",
            Self::Lyapunov => "lyapunov",
            Self::GapFlow => "gapflow",
            Self::Winding => "winding",
            Self::Hull => "hull",
            Self::CantorTrend => "cantor-trend",
            Self::GapFilling => "gap-filling",
            Self::Verify => "verify",
        }
    }
}

/// How the potential was specified; kept so records can name it.
#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    Builtin(Builtin),
    Table(PathBuf),
}

impl PotentialSpec {
    /// # Errors
    /// Invalid parameters or an unreadable table.
    pub fn build(&self) -> Result<Potential> {
        match self {
            Self::Builtin(b) => Potential::from_builtin(*b),
            Self::Table(p) => Potential::from_table_file(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    pub potential: PotentialSpec,
    pub frequency: Frequency,
    /// Number of convergents used by commands that walk the expansion.
    pub convergents: usize,
    pub arc: ArcChoice,
    pub window: (f64, f64),
    /// Energy grid spacing.
    pub resolution: f64,
    pub theta_samples: usize,
    pub t_samples: usize,
    /// Phase `x` for fixed-phase commands.
    pub phase: f64,
    pub epsilon: f64,
    pub lyapunov_steps: usize,
    pub lyapunov_phases: usize,
    pub hull_terms: u32,
    pub suites: Vec<String>,
    pub inject_failure: Option<String>,
    pub records: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: u64,
}

/// Suites run by `verify` when none are listed.
pub const DEFAULT_SUITES: [&str; 5] = ["band_oracle", "rank_one", "norm_bound", "lemma_main", "winding"];

const KEYS: &[&str] = &[
    "command",
    "potential.kind",
    "potential.scale",
    "potential.lambda",
    "potential.value",
    "potential.offset",
    "potential.slope",
    "potential.wiggle",
    "potential.table",
    "frequency.alpha",
    "frequency.digits",
    "frequency.convergents",
    "grid.window",
    "grid.resolution",
    "grid.theta_samples",
    "grid.t_samples",
    "grid.phase",
    "grid.arc",
    "grid.hull_terms",
    "tolerance.epsilon",
    "tolerance.lyapunov_steps",
    "tolerance.lyapunov_phases",
    "verify.suites",
    "verify.inject_failure",
    "output.records",
    "output.svg",
    "output.table",
    "run.worker_count",
    "run.seed",
];

fn alias(key: &str) -> Option<&'static str> {
    Some(match key {
        "command" => "command",
        "potential" => "potential.kind",
        "alpha" => "frequency.alpha",
        "window" => "grid.window",
        "arc" => "grid.arc",
        "worker_count" => "run.worker_count",
        "seed" => "run.seed",
        _ => return None,
    })
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

struct Entries(BTreeMap<&'static str, (usize, String)>);

impl Entries {
    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.0.get(key)
    }

    fn line(&self, key: &str) -> usize {
        self.raw(key).map_or(0, |e| e.0)
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some((line, v)) => v.parse().or_else(|_| err(*line, format!("{key}: cannot parse {v:?}"))),
        }
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v: f64 = self.get(key, default)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            err(self.line(key), format!("{key} must be positive"))
        }
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        let v: usize = self.get(key, default)?;
        if v >= 1 {
            Ok(v)
        } else {
            err(self.line(key), format!("{key} must be at least 1"))
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(|(_, v)| PathBuf::from(v))
    }
}

fn parse_window(line: usize, s: &str) -> Result<(f64, f64)> {
    let inner = s.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']'));
    let Some(inner) = inner else { return err(line, "window must look like [lo, hi]") };
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return err(line, "window must have two endpoints");
    }
    let (Ok(lo), Ok(hi)) = (parts[0].parse::<f64>(), parts[1].parse::<f64>()) else {
        return err(line, format!("malformed window {s:?}"));
    };
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return err(line, "window must be a finite interval with lo < hi");
    }
    Ok((lo, hi))
}

fn parse_frequency(e: &Entries) -> Result<Frequency> {
    let bad = |line, r: Result<Frequency>| r.or_else(|x| err(line, x.to_string()));
    if let Some((line, digits)) = e.raw("frequency.digits") {
        let q: std::result::Result<Vec<u64>, _> = digits.split(',').map(|d| d.trim().parse::<u64>()).collect();
        let Ok(q) = q else { return err(*line, format!("malformed digits {digits:?}")) };
        return bad(*line, Frequency::from_partial_quotients(&q));
    }
    let Some((line, a)) = e.raw("frequency.alpha") else {
        return err(0, "missing required key alpha");
    };
    if a == "golden" {
        return Ok(Frequency::golden());
    }
    if let Some((p, q)) = a.split_once('/') {
        let (Ok(p), Ok(q)) = (p.trim().parse::<u64>(), q.trim().parse::<u64>()) else {
            return err(*line, format!("malformed fraction {a:?}"));
        };
        return bad(*line, Frequency::rational(p, q));
    }
    match a.parse::<f64>() {
        Ok(v) => bad(*line, Frequency::irrational(v)),
        Err(_) => err(*line, format!("malformed frequency {a:?}")),
    }
}

fn parse_potential(e: &Entries) -> Result<PotentialSpec> {
    let kind = e.raw("potential.kind").map_or("sawtooth", |(_, v)| v.as_str());
    let line = e.line("potential.kind");
    Ok(PotentialSpec::Builtin(match kind {
        "sawtooth" => Builtin::Sawtooth { scale: e.get("potential.scale", 1.0)? },
        "maryland" => Builtin::Maryland { lambda: e.get("potential.lambda", 1.0)? },
        "constant" => Builtin::Constant { value: e.get("potential.value", 0.0)? },
        "weak_sawtooth" => Builtin::WeakSawtooth {
            offset: e.get("potential.offset", 0.0)?,
            slope: e.get("potential.slope", 1.0)?,
            wiggle: e.get("potential.wiggle", 0.0)?,
        },
        "table" => match e.path("potential.table") {
            Some(p) => return Ok(PotentialSpec::Table(p)),
            None => return err(line, "potential kind table needs potential.table"),
        },
        other => return err(line, format!("unknown potential {other:?}")),
    }))
}

/// # Errors
/// [`Error::Parse`] with the offending line (0 for a missing key).
pub fn parse_config(text: &str) -> Result<JobConfig> {
    parse_config_for(text, None)
}

/// As [`parse_config`], with the command supplied from outside (the command
/// line). A `command` key in the text must then agree with it.
///
/// # Errors
/// [`Error::Parse`] with the offending line (0 for a missing key).
pub fn parse_config_for(text: &str, given: Option<Command>) -> Result<JobConfig> {
    let mut section = String::new();
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            if name.contains('[') || name.contains(']') {
                return err(line, "nested section headers are not supported");
            }
            section = name.trim().to_string();
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return err(line, format!("expected key = value, found {content:?}"));
        };
        let (k, v) = (k.trim(), v.trim());
        let key = if section.is_empty() { alias(k) } else { KEYS.iter().copied().find(|&c| c == format!("{section}.{k}")) };
        let Some(key) = key else {
            let full = if section.is_empty() { k.to_string() } else { format!("[{section}] {k}") };
            return err(line, format!("unknown key {full}"));
        };
        if entries.insert(key, (line, v.to_string())).is_some() {
            return err(line, format!("duplicate key {k}"));
        }
    }
    let e = Entries(entries);
    let command = match (e.raw("command"), given) {
        (Some((line, c)), given) => {
            let c = c.parse::<Command>().or_else(|m| err(*line, m))?;
            if given.is_some_and(|g| g != c) {
                return err(*line, format!("job file is for {}, not {}", c.name(), given.map_or("", Command::name)));
            }
            c
        }
        (None, Some(g)) => g,
        (None, None) => return err(0, "missing required key command"),
    };
    let window = match e.raw("grid.window") {
        Some((line, w)) => parse_window(*line, w)?,
        None => (-4.0, 5.0),
    };
    let arc = match e.raw("grid.arc").map(|(l, v)| (*l, v.as_str())) {
        None | Some((_, "through_infinity")) => ArcChoice::ThroughInfinity,
        Some((_, "bounded")) => ArcChoice::Bounded,
        Some((line, other)) => return err(line, format!("unknown arc {other:?}")),
    };
    let phase: f64 = e.get("grid.phase", 0.0)?;
    if !(0.0..1.0).contains(&phase) {
        return err(e.line("grid.phase"), "phase must lie in [0, 1)");
    }
    let workers = match e.raw("run.worker_count") {
        None => None,
        Some(_) => Some(e.count("run.worker_count", 1)?),
    };
    let suites = match e.raw("verify.suites") {
        Some((line, s)) => {
            let list: Vec<String> = s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
            if let Some(bad) = list.iter().find(|x| !DEFAULT_SUITES.contains(&x.as_str())) {
                return err(*line, format!("unknown suite {bad:?}"));
            }
            if list.is_empty() {
                return err(*line, "suite list is empty");
            }
            list
        }
        None => DEFAULT_SUITES.iter().map(|s| (*s).to_string()).collect(),
    };
    Ok(JobConfig {
        command,
        potential: parse_potential(&e)?,
        frequency: parse_frequency(&e)?,
        convergents: e.count("frequency.convergents", 6)?,
        arc,
        window,
        resolution: e.positive("grid.resolution", 0.05)?,
        theta_samples: e.count("grid.theta_samples", 16)?,
        t_samples: e.count("grid.t_samples", 64)?,
        phase,
        epsilon: e.positive("tolerance.epsilon", 0.05)?,
        lyapunov_steps: e.count("tolerance.lyapunov_steps", 20_000)?,
        lyapunov_phases: e.count("tolerance.lyapunov_phases", 16)?,
        hull_terms: u32::try_from(e.count("grid.hull_terms", 12)?).unwrap_or(u32::MAX),
        suites,
        inject_failure: e.raw("verify.inject_failure").map(|(_, v)| v.clone()),
        records: e.path("output.records"),
        svg: e.path("output.svg"),
        table: e.path("output.table"),
        workers,
        seed: e.get("run.seed", 1)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(r: Result<JobConfig>) -> (usize, String) {
        match r {
            Err(Error::Parse { line, msg }) => (line, msg),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flat_example() {
        let c = parse_config("command=bands\npotential=sawtooth\nalpha=5/8\nwindow=[-3,3]\n").unwrap();
        assert_eq!(c.command, Command::Bands);
        assert_eq!(c.frequency.as_rational().map(|r| (r.p, r.q)), Some((5, 8)));
        assert_eq!(c.window, (-3.0, 3.0));
        assert_eq!(c.seed, 1);
    }

    #[test]
    fn sections() {
        let text = "command = gap-filling # comment\n[potential]\nkind = maryland\nlambda = 2\n[frequency]\ndigits = 1,1,1,1\n[grid]\narc = bounded\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.potential, PotentialSpec::Builtin(Builtin::Maryland { lambda: 2.0 }));
        assert_eq!(c.arc, ArcChoice::Bounded);
        assert!(!c.frequency.is_rational());
    }

    #[test]
    fn validation_errors() {
        let (line, msg) = line_of(parse_config("command = bands\nalpha = 0/1\n"));
        assert_eq!(line, 2);
        assert!(msg.contains("frequency must lie in (0,1)"), "{msg}");
        let (line, _) = line_of(parse_config("command = bands\nalpha = 1/2\nworker_count = 0\n"));
        assert_eq!(line, 3);
        let (line, msg) = line_of(parse_config("command = bands\n[grid]\nwidth = 3\n"));
        assert_eq!(line, 3);
        assert!(msg.contains("unknown key"));
        let (line, _) = line_of(parse_config("command = sing\nalpha = 1/2\n"));
        assert_eq!(line, 1);
        let (line, msg) = line_of(parse_config("alpha = 1/2\n"));
        assert_eq!(line, 0);
        assert!(msg.contains("command"));
        let (line, _) = line_of(parse_config("command = bands\nalpha = 1/2\n[grid]\nresolution = x\n"));
        assert_eq!(line, 4);
        let (line, _) = line_of(parse_config("command = bands\nalpha = 1/2\n[grid]\nresolution = -1\n"));
        assert_eq!(line, 4);
    }

    #[test]
    fn command_from_outside() {
        let cfg = parse_config_for("alpha = 1/2\n", Some(Command::Hull)).unwrap();
        assert_eq!(cfg.command, Command::Hull);
        let (line, _) = line_of(parse_config_for("command = bands\nalpha = 1/2\n", Some(Command::Hull)));
        assert_eq!(line, 1);
    }
}
