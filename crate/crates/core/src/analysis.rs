//! Work-factor comparison: trials-to-success statistics and the cost of each
//! algorithm, analytically and by Monte-Carlo over the full pipeline.
//!
//! Two notions of expected trials are carried side by side:
//!
//! * **analytic bound**: `1 / (1 - Pr(y = 0))`, counting only the zero
//!   frequency as failure;
//! * **exact**: `1 / p` with `p` the mass of every `y` the pipeline turns
//!   into the true period.
//!
//! The Amplified-QFT costs `k + 1` oracle/transform applications per run;
//! QFT and QHS cost one.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closedform::{closed_form_pr, closed_form_table, ratio_bounds, Algorithm, Baseline, RatioBounds};
use crate::error::{Error, Result};
use crate::offset::test_period_known_s;
use crate::oracle::{OracleHandle, OracleSpec};
use crate::recovery::{recover_period, recoverable_probability};
use crate::simulator::GroverSchedule;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Trials until the first success with per-trial probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricStats {
    pub p: f64,
    pub expected_trials: f64,
    pub variance: f64,
}

impl GeometricStats {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Half-width of the normal-approximation interval for the mean of
    /// `runs` draws at quantile `z`.
    pub fn mean_half_width(&self, runs: u64, z: f64) -> f64 {
        z * self.std_dev() / (runs as f64).sqrt()
    }
}

/// `E[X] = 1/p`, `Var[X] = (1-p)/p²`.
pub fn geometric_stats(p: f64) -> Result<GeometricStats> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(GeometricStats {
        p,
        expected_trials: 1.0 / p,
        variance: (1.0 - p) / (p * p),
    })
}

/// Exact statistics from the recoverable mass.
pub fn expected_trials(algorithm: Algorithm, spec: &OracleSpec) -> Result<GeometricStats> {
    geometric_stats(recoverable_probability(algorithm, spec))
}

/// Statistics with failure counted only at `y = 0`.
pub fn analytic_trials_bound(algorithm: Algorithm, spec: &OracleSpec) -> Result<GeometricStats> {
    geometric_stats(1.0 - closed_form_pr(algorithm, 0, spec))
}

/// `N/4M` for QFT, `N/2M` for QHS.
pub fn trials_lower_bound(baseline: Baseline, n: u64, m: u64) -> f64 {
    let c = match baseline {
        Baseline::Qft => 4.0,
        Baseline::Qhs => 2.0,
    };
    n as f64 / (c * m as f64)
}

/// `(1-p)/p²` at the largest admissible `p = 1 - Pr(y = 0)`. For QFT this is
/// `(N/(N-M))²((N-2M)/4M)²`.
pub fn variance_lower_bound(baseline: Baseline, n: u64, m: u64) -> f64 {
    let nf = n as f64;
    let mf = m as f64;
    let p = match baseline {
        Baseline::Qft => 1.0 - (1.0 - 2.0 * mf / nf).powi(2),
        Baseline::Qhs => 2.0 * mf * (nf - mf) / (nf * nf),
    };
    (1.0 - p) / (p * p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkfactorReport {
    pub algorithm: Algorithm,
    /// Oracle/transform applications per run.
    pub per_run_cost: f64,
    /// `1 / p`, `p` the recoverable mass.
    pub expected_runs: f64,
    pub total_cost: f64,
    /// `total_cost` over the Amplified-QFT's `total_cost`.
    pub ratio_vs_amplified: f64,
    /// `1 / (1 - Pr(y = 0))`.
    pub bound_runs: f64,
    /// `per_run_cost · bound_runs`; the Amplified-QFT is charged `k + 1`.
    pub bound_cost: f64,
    /// `bound_cost / (k + 1)`.
    pub bound_ratio: f64,
}

/// One row per algorithm, Amplified-QFT first.
pub fn workfactor_comparison(spec: &OracleSpec) -> Result<Vec<WorkfactorReport>> {
    let schedule = GroverSchedule::new(spec.n(), spec.m())?;
    let amplified_cost = (schedule.k + 1) as f64;
    let amplified_runs = expected_trials(Algorithm::Amplified, spec)?.expected_trials;
    let amplified_total = amplified_cost * amplified_runs;

    Algorithm::ALL
        .iter()
        .map(|&algorithm| {
            let per_run_cost = match algorithm {
                Algorithm::Amplified => amplified_cost,
                _ => 1.0,
            };
            let expected_runs = expected_trials(algorithm, spec)?.expected_trials;
            let total_cost = per_run_cost * expected_runs;
            let (bound_runs, bound_cost) = match algorithm {
                Algorithm::Amplified => (1.0, amplified_cost),
                _ => {
                    let runs = analytic_trials_bound(algorithm, spec)?.expected_trials;
                    (runs, runs)
                }
            };
            Ok(WorkfactorReport {
                algorithm,
                per_run_cost,
                expected_runs,
                total_cost,
                ratio_vs_amplified: total_cost / amplified_total,
                bound_runs,
                bound_cost,
                bound_ratio: bound_cost / amplified_cost,
            })
        })
        .collect()
}

/// Empirical trials-to-success over independent runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloStats {
    pub algorithm: Algorithm,
    pub runs: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// 95% confidence interval for the mean.
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Repeats sample → recover → verify until success, `runs` times.
///
/// Verification uses the known offset with the three-probe test; a single
/// marked label carries no period information, so for `M = 1` the candidate
/// is compared with the true period instead. The outcome of each `y` is
/// computed once and reused.
pub fn monte_carlo_trials(algorithm: Algorithm, spec: &OracleSpec, runs: u64, seed: u64) -> Result<MonteCarloStats> {
    if runs == 0 {
        return Err(Error::DegenerateInstance("Monte-Carlo needs at least one run"));
    }
    let table = closed_form_table(algorithm, spec);
    let handle = OracleHandle::new(*spec);
    let mut outcome: Vec<Option<bool>> = vec![None; spec.n() as usize];
    let mut succeeds = |y: u64| -> bool {
        *outcome[y as usize].get_or_insert_with(|| match recover_period(y, spec.n(), None).accepted {
            Some(q) if spec.m() >= 2 => test_period_known_s(&handle, spec.s(), q, spec.m()),
            Some(q) => q == spec.p(),
            None => false,
        })
    };
    if !(0..spec.n()).any(|y| table.pr(y) > 0.0 && succeeds(y)) {
        return Err(Error::InvalidProbability(0.0));
    }

    let index = WeightedIndex::new(table.entries().iter().map(|e| e.pr))
        .map_err(|_| Error::InvalidProbability(table.total()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..runs {
        let mut trials = 1u64;
        while !succeeds(index.sample(&mut rng) as u64) {
            trials += 1;
        }
        let t = trials as f64;
        sum += t;
        sum_sq += t * t;
    }
    let r = runs as f64;
    let mean = sum / r;
    let variance = if runs > 1 {
        ((sum_sq - r * mean * mean) / (r - 1.0)).max(0.0)
    } else {
        0.0
    };
    let half = Z95 * (variance / r).sqrt();
    Ok(MonteCarloStats {
        algorithm,
        runs,
        mean,
        variance,
        ci_low: mean - half,
        ci_high: mean + half,
    })
}

/// Amplitude ratio at a `y` whose transform row sums to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralUnitaryRatio {
    /// `(N/(-2M))·tan θ·sin 2kθ`.
    pub amp_ratio: f64,
    /// `amp_ratio²`.
    pub pr_ratio: f64,
    pub bounds: RatioBounds,
}

pub fn general_unitary_ratio(n: u64, m: u64) -> Result<GeneralUnitaryRatio> {
    let bounds = ratio_bounds(n, m, Baseline::Qft)?;
    let schedule = GroverSchedule::new(n, m)?;
    let theta = schedule.theta;
    let amp_ratio = n as f64 / (-2.0 * m as f64) * theta.tan() * (2.0 * schedule.k as f64 * theta).sin();
    Ok(GeneralUnitaryRatio {
        amp_ratio,
        pr_ratio: amp_ratio * amp_ratio,
        bounds,
    })
}
