//! Exact case-by-case measurement probabilities and their ratio bounds.
//!
//! For `y ≠ 0` the amplitude of every algorithm is a multiple of the geometric
//! sum `Σ_{r<M} ω^{rPy}`, whose squared magnitude is the Dirichlet ratio
//! `R = sin²(πMPy/N) / sin²(πPy/N)`. Which case applies depends only on
//! `Py mod N` and `MPy mod N`:
//!
//! | case      | condition                      | Amplified-QFT            | QFT              | QHS                 |
//! |-----------|--------------------------------|--------------------------|------------------|---------------------|
//! | Zero      | `y = 0`                        | `cos²2kθ`                | `(1 - 2M/N)²`    | `1 - 2M(N-M)/N²`    |
//! | Resonant  | `Py ≡ 0`, `y ≠ 0`              | `tan²θ sin²2kθ`          | `4M²/N²`         | `2M²/N²`            |
//! | Generic   | `Py ≢ 0`, `MPy ≢ 0`            | `tan²θ sin²2kθ · R / M²` | `4R/N²`          | `2R/N²`             |
//! | Null      | `Py ≢ 0`, `MPy ≡ 0`            | `0`                      | `0`              | `0`                 |

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::OracleSpec;
use crate::simulator::{GroverSchedule, ProbabilityTable, Source};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumCase {
    Zero,
    Resonant,
    Generic,
    Null,
}

impl SpectrumCase {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumCase::Zero => "zero",
            SpectrumCase::Resonant => "resonant",
            SpectrumCase::Generic => "generic",
            SpectrumCase::Null => "null",
        }
    }
}

impl fmt::Display for SpectrumCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The three measurement procedures being compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Amplified,
    Qft,
    Qhs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Amplified, Algorithm::Qft, Algorithm::Qhs];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Amplified => "amplified",
            Algorithm::Qft => "qft",
            Algorithm::Qhs => "qhs",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Baseline the Amplified-QFT is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    Qft,
    Qhs,
}

impl Baseline {
    pub fn algorithm(self) -> Algorithm {
        match self {
            Baseline::Qft => Algorithm::Qft,
            Baseline::Qhs => Algorithm::Qhs,
        }
    }

    /// The exact width `upper - lower` of the ratio sandwich.
    pub fn gap(self) -> f64 {
        match self {
            Baseline::Qft => 1.0,
            Baseline::Qhs => 2.0,
        }
    }
}

/// Bounds on `Pr_amplified(y) / Pr_baseline(y)` for non-zero, non-null `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioBounds {
    pub lower: f64,
    pub upper: f64,
    pub approx: f64,
}

impl RatioBounds {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    /// `lower ≤ ratio ≤ upper`, with a relative slack of `tol`.
    pub fn contains(&self, ratio: f64, tol: f64) -> bool {
        ratio >= self.lower * (1.0 - tol) - tol && ratio <= self.upper * (1.0 + tol)
    }
}

/// Case of `y` for the instance's `(N, P, M)`.
pub fn classify(y: u64, spec: &OracleSpec) -> SpectrumCase {
    let n = spec.n();
    if y == 0 {
        return SpectrumCase::Zero;
    }
    let py = mul_mod(spec.p(), y, n);
    if py == 0 {
        SpectrumCase::Resonant
    } else if mul_mod(spec.m(), py, n) == 0 {
        SpectrumCase::Null
    } else {
        SpectrumCase::Generic
    }
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// `sin²(πr/N)` for an integer residue `r`, folded into `[0, N/2]` first.
fn sin_sq_residue(r: u64, n: u64) -> f64 {
    let r = r % n;
    let folded = r.min(n - r);
    (PI * folded as f64 / n as f64).sin().powi(2)
}

/// `R = sin²(πMPy/N) / sin²(πPy/N)`, evaluated on reduced residues.
///
/// Defined for Generic and Null `y` only; Null returns exactly `0`.
pub fn dirichlet_ratio(y: u64, spec: &OracleSpec) -> Result<f64> {
    match classify(y, spec) {
        SpectrumCase::Null => Ok(0.0),
        SpectrumCase::Generic => {
            let n = spec.n();
            let py = mul_mod(spec.p(), y, n);
            let mpy = mul_mod(spec.m(), py, n);
            Ok(sin_sq_residue(mpy, n) / sin_sq_residue(py, n))
        }
        case => Err(Error::CaseMismatch(case)),
    }
}

/// Amplified-QFT `Pr(y)` for the given schedule.
pub fn amplified_pr(y: u64, spec: &OracleSpec, schedule: &GroverSchedule) -> f64 {
    match classify(y, spec) {
        SpectrumCase::Zero => (2.0 * schedule.k as f64 * schedule.theta).cos().powi(2),
        SpectrumCase::Resonant => schedule.resonant_gain(),
        SpectrumCase::Generic => {
            let m = spec.m() as f64;
            schedule.resonant_gain() * generic_ratio(y, spec) / (m * m)
        }
        SpectrumCase::Null => 0.0,
    }
}

/// QFT-algorithm `Pr(y)`.
pub fn qft_pr(y: u64, spec: &OracleSpec) -> f64 {
    let n = spec.n() as f64;
    let m = spec.m() as f64;
    match classify(y, spec) {
        SpectrumCase::Zero => (1.0 - 2.0 * m / n).powi(2),
        SpectrumCase::Resonant => 4.0 * m * m / (n * n),
        SpectrumCase::Generic => 4.0 * generic_ratio(y, spec) / (n * n),
        SpectrumCase::Null => 0.0,
    }
}

/// QHS `Pr(y)`.
pub fn qhs_pr(y: u64, spec: &OracleSpec) -> f64 {
    let n = spec.n() as f64;
    let m = spec.m() as f64;
    match classify(y, spec) {
        SpectrumCase::Zero => 1.0 - 2.0 * m * (n - m) / (n * n),
        SpectrumCase::Resonant => 2.0 * m * m / (n * n),
        SpectrumCase::Generic => 2.0 * generic_ratio(y, spec) / (n * n),
        SpectrumCase::Null => 0.0,
    }
}

fn generic_ratio(y: u64, spec: &OracleSpec) -> f64 {
    dirichlet_ratio(y, spec).expect("caller matched the generic case")
}

/// `Pr(y)` for any algorithm, using the standard schedule.
pub fn closed_form_pr(algorithm: Algorithm, y: u64, spec: &OracleSpec) -> f64 {
    match algorithm {
        Algorithm::Amplified => amplified_pr(y, spec, &schedule_for(spec)),
        Algorithm::Qft => qft_pr(y, spec),
        Algorithm::Qhs => qhs_pr(y, spec),
    }
}

/// Full closed-form table with the standard schedule.
pub fn closed_form_table(algorithm: Algorithm, spec: &OracleSpec) -> ProbabilityTable {
    closed_form_table_with(algorithm, spec, &schedule_for(spec))
}

/// Full closed-form table; `schedule` is used only by the amplified case.
pub fn closed_form_table_with(
    algorithm: Algorithm,
    spec: &OracleSpec,
    schedule: &GroverSchedule,
) -> ProbabilityTable {
    let probs: Vec<f64> = (0..spec.n())
        .map(|y| match algorithm {
            Algorithm::Amplified => amplified_pr(y, spec, schedule),
            Algorithm::Qft => qft_pr(y, spec),
            Algorithm::Qhs => qhs_pr(y, spec),
        })
        .collect();
    ProbabilityTable::from_probabilities(spec, &probs, Source::ClosedForm)
}

fn schedule_for(spec: &OracleSpec) -> GroverSchedule {
    GroverSchedule::new(spec.n(), spec.m()).expect("valid instances have M ≥ 1")
}

/// Ratio bounds for `(N, M)` against a baseline; needs `2M ≤ N`.
///
/// `upper = (N/cM)(N/(N-M))`, `lower = upper·(1 - 2M/N)²`, `approx = N/cM`
/// with `c = 4` for QFT and `c = 2` for QHS.
pub fn ratio_bounds(n: u64, m: u64, baseline: Baseline) -> Result<RatioBounds> {
    if m == 0 || n == 0 {
        return Err(Error::DegenerateInstance("ratio bounds need M, N ≥ 1"));
    }
    if 2 * m > n {
        return Err(Error::MarkedSetTooLarge { double: 2 * m, n });
    }
    let nf = n as f64;
    let mf = m as f64;
    let c = match baseline {
        Baseline::Qft => 4.0,
        Baseline::Qhs => 2.0,
    };
    let approx = nf / (c * mf);
    let upper = approx * nf / (nf - mf);
    let lower = upper * (1.0 - 2.0 * mf / nf).powi(2);
    Ok(RatioBounds { lower, upper, approx })
}

pub fn pr_ratio_bounds(spec: &OracleSpec, baseline: Baseline) -> Result<RatioBounds> {
    ratio_bounds(spec.n(), spec.m(), baseline)
}

/// `Pr_amplified(y) / Pr_baseline(y)`; `None` for Zero and Null `y`.
pub fn pr_ratio(y: u64, spec: &OracleSpec, baseline: Baseline) -> Option<f64> {
    match classify(y, spec) {
        SpectrumCase::Zero | SpectrumCase::Null => None,
        _ => {
            let amplified = closed_form_pr(Algorithm::Amplified, y, spec);
            Some(amplified / closed_form_pr(baseline.algorithm(), y, spec))
        }
    }
}
