//! Monte Carlo and analytic checks of the distributional identities, run by
//! name and summarized as [`ComparisonReport`]s.

mod checks;
mod stats;

pub use checks::registry;
pub use stats::*;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest accepted sample size for a check.
pub const MIN_SAMPLES: usize = 10_000;

/// One scalar comparison inside a report.
///
/// `sigma_units` is `|observed − expected|` divided by the entry's scale: a
/// standard error for Monte Carlo estimates, or the pinned tolerance for exact
/// comparisons. Most entries pass when `sigma_units < limit`; entries whose
/// name ends in `(must differ)` pass when `sigma_units > limit`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentError {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub sigma_units: f64,
    pub limit: f64,
    pub passed: bool,
}

impl MomentError {
    /// `observed` within `limit` standard errors of `expected`.
    pub fn sigma(name: impl Into<String>, observed: f64, expected: f64, se: f64, limit: f64) -> Self {
        let units = if se > 0.0 {
            (observed - expected).abs() / se
        } else if observed == expected {
            0.0
        } else {
            f64::MAX
        };
        Self::finish(name.into(), observed, expected, units, limit, false)
    }

    /// `|observed − expected| < tol`.
    pub fn absolute(name: impl Into<String>, observed: f64, expected: f64, tol: f64) -> Self {
        Self::sigma(name, observed, expected, tol, 1.0)
    }

    /// `|observed − expected| < tol · |expected|`.
    pub fn relative(name: impl Into<String>, observed: f64, expected: f64, tol: f64) -> Self {
        Self::sigma(name, observed, expected, tol * expected.abs(), 1.0)
    }

    /// `observed` at most `limit` standard errors above `expected`.
    pub fn upper(name: impl Into<String>, observed: f64, expected: f64, se: f64, limit: f64) -> Self {
        let units = ((observed - expected) / se).max(0.0);
        Self::finish(name.into(), observed, expected, units, limit, false)
    }

    /// `observed < bound`, reported as the ratio `observed / bound`.
    pub fn below(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self::finish(name.into(), observed, bound, observed / bound, 1.0, false)
    }

    /// `observed` more than `limit` standard errors away from `expected`.
    pub fn distinct(name: impl Into<String>, observed: f64, expected: f64, se: f64, limit: f64) -> Self {
        let units = (observed - expected).abs() / se;
        Self::finish(format!("{} (must differ)", name.into()), observed, expected, units, limit, true)
    }

    fn finish(name: String, observed: f64, expected: f64, sigma_units: f64, limit: f64, reject: bool) -> Self {
        let passed = if reject {
            sigma_units > limit
        } else {
            sigma_units < limit
        };
        MomentError {
            name,
            observed,
            expected,
            sigma_units,
            limit,
            passed,
        }
    }
}

/// Verdict of one named check. Numeric fields depend only on the check name,
/// the sample size and the seed; `runtime_ms` is 0 unless timings were
/// requested.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub check_name: String,
    pub n_samples: usize,
    pub tv_distance: Option<f64>,
    pub chi2: Option<f64>,
    pub moment_errors: Vec<MomentError>,
    pub tolerance: f64,
    pub passed: bool,
    pub seed: u64,
    pub runtime_ms: u64,
}

/// What a check body produces before it is stamped with its name and seed.
#[derive(Debug, Clone, Default)]
pub(crate) struct Outcome {
    pub n_samples: usize,
    pub tv_distance: Option<f64>,
    pub chi2: Option<f64>,
    pub moment_errors: Vec<MomentError>,
    pub tolerance: f64,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.tv_distance.is_none_or(|tv| tv < self.tolerance) && self.moment_errors.iter().all(|m| m.passed)
    }
}

/// Sample size and seed shared by every check of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub samples: usize,
    pub seed: u64,
    pub timings: bool,
}

pub struct Check {
    pub name: &'static str,
    pub summary: &'static str,
    pub(crate) run: fn(&RunConfig) -> Result<Outcome>,
}

pub fn check_names() -> Vec<&'static str> {
    registry().iter().map(|c| c.name).collect()
}

pub fn run_identity_check(name: &str, config: &RunConfig) -> Result<ComparisonReport> {
    let check = registry()
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::UnknownCheck(name.to_string()))?;
    if config.samples < MIN_SAMPLES {
        return Err(Error::invalid("run_identity_check", format!("samples must be >= {MIN_SAMPLES}")));
    }
    let start = Instant::now();
    let outcome = (check.run)(config)?;
    let runtime_ms = if config.timings {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    Ok(ComparisonReport {
        check_name: check.name.to_string(),
        passed: outcome.passed(),
        n_samples: outcome.n_samples,
        tv_distance: outcome.tv_distance,
        chi2: outcome.chi2,
        moment_errors: outcome.moment_errors,
        tolerance: outcome.tolerance,
        seed: config.seed,
        runtime_ms,
    })
}

/// Runs the named checks (`"all"` expands to the registry) concurrently on
/// at most `threads` workers and returns the reports sorted by name.
pub fn run_suite(names: &[String], config: &RunConfig, threads: Option<usize>) -> Result<Vec<ComparisonReport>> {
    let mut wanted: Vec<String> = if names.iter().any(|n| n == "all") {
        check_names().into_iter().map(String::from).collect()
    } else {
        names.to_vec()
    };
    wanted.sort();
    wanted.dedup();
    if let Some(bad) = wanted.iter().find(|n| !check_names().contains(&n.as_str())) {
        return Err(Error::UnknownCheck(bad.clone()));
    }
    let run = || -> Result<Vec<ComparisonReport>> {
        wanted.par_iter().map(|n| run_identity_check(n, config)).collect()
    };
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::invalid("run_suite", e.to_string()))?
            .install(run),
        None => run(),
    }
}
