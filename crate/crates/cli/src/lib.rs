//! Job files, parallel sweeps, JSON-lines records and SVG plots for the
//! `cantor-spec` driver.

pub mod config;
pub mod fixtures;
pub mod records;
pub mod svg;
pub mod sweep;

/// Environment variable consulted when neither the flag nor the job file sets
/// a worker count.
pub const WORKERS_ENV: &str = "CANTOR_SPEC_WORKERS";

/// Worker count: flag, then job file, then `CANTOR_SPEC_WORKERS`, then 1.
#[must_use]
pub fn resolve_workers(flag: Option<usize>, config: Option<usize>, env: Option<&str>) -> usize {
    flag.or(config)
        .or_else(|| env.and_then(|s| s.trim().parse().ok()))
        .unwrap_or(1)
        .max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worker_precedence() {
        assert_eq!(resolve_workers(Some(3), Some(2), Some("5")), 3);
        assert_eq!(resolve_workers(None, Some(2), Some("5")), 2);
        assert_eq!(resolve_workers(None, None, Some("5")), 5);
        assert_eq!(resolve_workers(None, None, Some("x")), 1);
        assert_eq!(resolve_workers(None, None, None), 1);
        assert_eq!(resolve_workers(Some(0), None, None), 1);
    }
}
