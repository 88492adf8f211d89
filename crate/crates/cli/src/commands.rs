use std::fs;

use lpq::analysis::{monte_carlo_trials, trials_lower_bound, workfactor_comparison, MonteCarloStats};
use lpq::closedform::{classify, closed_form_table, closed_form_table_with, pr_ratio, pr_ratio_bounds, Baseline};
use lpq::offset::{find_offset_counting, find_offset_decreasing, test_period_known_s, Method, Transcript};
use lpq::recovery::{recover_period, recoverable_set, success_set, RecoveryStatus};
use lpq::simulator::{
    amplified_qft_state_with, qft_state, qhs_probabilities, GroverSchedule, ProbabilityTable, Source, SOFT_N_LIMIT,
};
use lpq::{Algorithm, Error, OracleHandle, OracleSpec, SpectrumCase};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::render::{emit, json, opt_real, real, verdict, Csv, Real};
use crate::CliError;

/// Prints a warning when `n` exceeds `LPQ_SOFT_N_LIMIT` (default 2^16).
fn warn_if_large(n: u64) {
    let limit = std::env::var("LPQ_SOFT_N_LIMIT")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(SOFT_N_LIMIT);
    if n > limit {
        eprintln!("warning: N = {n} exceeds the soft limit {limit}; full-spectrum work may be slow");
    }
}

fn instance(config: &RunConfig) -> Result<OracleSpec, CliError> {
    let spec = config.spec()?;
    warn_if_large(spec.n());
    Ok(spec)
}

#[derive(Serialize)]
struct SpectrumRow {
    y: u64,
    case: SpectrumCase,
    closed_form: Real,
    simulated: Real,
    deviation: Real,
}

#[derive(Serialize)]
struct SpectrumReport {
    instance: OracleSpec,
    algorithm: Algorithm,
    iterations: Option<u64>,
    max_deviation: Real,
    rows: Vec<SpectrumRow>,
}

pub fn spectrum(config: &RunConfig) -> Result<(), CliError> {
    let spec = instance(config)?;
    let algorithm = config.algorithm();
    let schedule = match config.iterations_override {
        Some(k) => GroverSchedule::with_iterations(spec.n(), spec.m(), k)?,
        None => GroverSchedule::new(spec.n(), spec.m())?,
    };
    let closed = closed_form_table_with(algorithm, &spec, &schedule);
    let simulated = match algorithm {
        Algorithm::Amplified => amplified_qft_state_with(&spec, schedule.k).probabilities(),
        Algorithm::Qft => qft_state(&spec).probabilities(),
        Algorithm::Qhs => qhs_probabilities(&spec),
    };
    let simulated = ProbabilityTable::from_probabilities(&spec, &simulated, Source::Simulated);
    let max_deviation = closed.max_abs_deviation(&simulated);
    let iterations = (algorithm == Algorithm::Amplified).then_some(schedule.k);

    let text = match config.format() {
        Format::Json => json(&SpectrumReport {
            instance: spec,
            algorithm,
            iterations,
            max_deviation: Real(max_deviation),
            rows: closed
                .entries()
                .iter()
                .zip(simulated.entries())
                .map(|(c, s)| SpectrumRow {
                    y: c.y,
                    case: c.case,
                    closed_form: Real(c.pr),
                    simulated: Real(s.pr),
                    deviation: Real((c.pr - s.pr).abs()),
                })
                .collect(),
        })?,
        Format::Csv => {
            let mut csv = Csv::new();
            let mut meta = instance_pairs(&spec);
            meta.push(("algorithm", algorithm.to_string()));
            if let Some(k) = iterations {
                meta.push(("k", k.to_string()));
            }
            meta.push(("max_deviation", real(max_deviation)));
            csv.comment(&meta).row(&["y", "case", "closed_form", "simulated", "deviation"]);
            for (c, s) in closed.entries().iter().zip(simulated.entries()) {
                csv.row(&[
                    c.y.to_string(),
                    c.case.to_string(),
                    real(c.pr),
                    real(s.pr),
                    real((c.pr - s.pr).abs()),
                ]);
            }
            csv.finish()
        }
    };
    emit(config.out.as_deref(), &text)
}

fn instance_pairs(spec: &OracleSpec) -> Vec<(&'static str, String)> {
    vec![
        ("n", spec.n().to_string()),
        ("m", spec.m().to_string()),
        ("p", spec.p().to_string()),
        ("s", spec.s().to_string()),
    ]
}

#[derive(Serialize)]
struct CompareRow {
    y: u64,
    case: SpectrumCase,
    amplified: Real,
    qft: Real,
    qhs: Real,
    ratio_qft: Option<Real>,
    ratio_qhs: Option<Real>,
    excluded: bool,
}

#[derive(Serialize)]
struct SummedRatio {
    ratio: Option<Real>,
    verdict: &'static str,
}

#[derive(Serialize)]
struct BoundsCheck {
    baseline: Baseline,
    lower: Real,
    upper: Real,
    approx: Real,
    gap: Real,
    pointwise: &'static str,
    success_set: SummedRatio,
    recoverable_set: SummedRatio,
}

#[derive(Serialize)]
struct CompareReport {
    instance: OracleSpec,
    bounds: Vec<BoundsCheck>,
    rows: Vec<CompareRow>,
}

const RATIO_TOLERANCE: f64 = 1e-9;

pub fn compare(config: &RunConfig) -> Result<(), CliError> {
    let spec = instance(config)?;
    let tables: Vec<ProbabilityTable> = Algorithm::ALL.iter().map(|&a| closed_form_table(a, &spec)).collect();
    let rows: Vec<CompareRow> = (0..spec.n())
        .map(|y| {
            let case = classify(y, &spec);
            CompareRow {
                y,
                case,
                amplified: Real(tables[0].pr(y)),
                qft: Real(tables[1].pr(y)),
                qhs: Real(tables[2].pr(y)),
                ratio_qft: pr_ratio(y, &spec, Baseline::Qft).map(Real),
                ratio_qhs: pr_ratio(y, &spec, Baseline::Qhs).map(Real),
                excluded: matches!(case, SpectrumCase::Zero | SpectrumCase::Null),
            }
        })
        .collect();

    let sets = [success_set(&spec), recoverable_set(&spec)];
    let mut bounds = Vec::new();
    for (baseline, base) in [(Baseline::Qft, &tables[1]), (Baseline::Qhs, &tables[2])] {
        let b = pr_ratio_bounds(&spec, baseline)?;
        let pointwise = (0..spec.n())
            .filter_map(|y| pr_ratio(y, &spec, baseline))
            .all(|r| b.contains(r, RATIO_TOLERANCE));
        let summed = |set: &[u64]| {
            let denominator = base.mass_of(set);
            let ratio = (denominator > 0.0).then(|| tables[0].mass_of(set) / denominator);
            SummedRatio {
                ratio: ratio.map(Real),
                verdict: verdict(ratio.is_none_or(|r| b.contains(r, RATIO_TOLERANCE))),
            }
        };
        bounds.push(BoundsCheck {
            baseline,
            lower: Real(b.lower),
            upper: Real(b.upper),
            approx: Real(b.approx),
            gap: Real(b.gap()),
            pointwise: verdict(pointwise),
            success_set: summed(&sets[0]),
            recoverable_set: summed(&sets[1]),
        });
    }

    let text = match config.format() {
        Format::Json => json(&CompareReport {
            instance: spec,
            bounds,
            rows,
        })?,
        Format::Csv => {
            let mut csv = Csv::new();
            csv.comment(&instance_pairs(&spec));
            for b in &bounds {
                let baseline = match b.baseline {
                    Baseline::Qft => "qft",
                    Baseline::Qhs => "qhs",
                };
                csv.comment(&[
                    ("baseline", baseline.to_string()),
                    ("lower", real(b.lower.0)),
                    ("upper", real(b.upper.0)),
                    ("approx", real(b.approx.0)),
                    ("gap", real(b.gap.0)),
                    ("pointwise", b.pointwise.to_string()),
                    ("success_set_ratio", opt_real(b.success_set.ratio.map(|r| r.0))),
                    ("success_set", b.success_set.verdict.to_string()),
                    ("recoverable_set_ratio", opt_real(b.recoverable_set.ratio.map(|r| r.0))),
                    ("recoverable_set", b.recoverable_set.verdict.to_string()),
                ]);
            }
            csv.row(&["y", "case", "amplified", "qft", "qhs", "ratio_qft", "ratio_qhs", "excluded"]);
            for r in &rows {
                csv.row(&[
                    r.y.to_string(),
                    r.case.to_string(),
                    real(r.amplified.0),
                    real(r.qft.0),
                    real(r.qhs.0),
                    opt_real(r.ratio_qft.map(|x| x.0)),
                    opt_real(r.ratio_qhs.map(|x| x.0)),
                    r.excluded.to_string(),
                ]);
            }
            csv.finish()
        }
    };
    emit(config.out.as_deref(), &text)
}

#[derive(Debug, Clone, Serialize)]
struct Verification {
    instance: OracleSpec,
    candidate: u64,
    verified: bool,
}

#[derive(Serialize)]
struct RecoverReport {
    n: u64,
    q_max: u64,
    #[serde(flatten)]
    result: lpq::recovery::RecoveryResult,
    verification: Option<Verification>,
}

pub fn recover(config: &RunConfig) -> Result<(), CliError> {
    let n = config.n()?;
    let y = config.y()?;
    if n == 0 {
        return Err(Error::DegenerateInstance("N must be at least 1").into());
    }
    if y >= n {
        return Err(Error::LabelOutOfRange { label: y, n }.into());
    }
    let q_max = config.q_max.unwrap_or_else(|| lpq::recovery::isqrt(n));
    let mut result = recover_period(y, n, Some(q_max));

    let verification = if config.verify.unwrap_or(false) {
        let spec = instance(config)?;
        if spec.n() != n {
            return Err(CliError::Validation("--verify needs the instance's N".into()));
        }
        result = result.against_period(spec.p());
        result.accepted.map(|q| Verification {
            instance: spec,
            candidate: q,
            verified: test_period_known_s(&OracleHandle::new(spec), spec.s(), q, spec.m()),
        })
    } else {
        None
    };

    let text = match config.format() {
        Format::Json => json(&RecoverReport {
            n,
            q_max,
            result: result.clone(),
            verification: verification.clone(),
        })?,
        Format::Csv => {
            let mut csv = Csv::new();
            let mut meta = vec![
                ("y", y.to_string()),
                ("n", n.to_string()),
                ("q_max", q_max.to_string()),
                ("accepted", result.accepted.map(|q| q.to_string()).unwrap_or_default()),
                ("status", status_name(result.status).to_string()),
            ];
            if let Some(v) = &verification {
                meta.push(("verified", v.verified.to_string()));
            }
            csv.comment(&meta).row(&["index", "d", "q", "approximates"]);
            for (i, c) in result.convergents.iter().enumerate() {
                csv.row(&[i.to_string(), c.d.to_string(), c.q.to_string(), c.approximates(y, n).to_string()]);
            }
            csv.finish()
        }
    };
    emit(config.out.as_deref(), &text)?;

    match (result.status, &verification) {
        (RecoveryStatus::NoCandidate, _) => Err(CliError::NoCandidate),
        (_, Some(v)) if !v.verified => Err(CliError::Verification(format!(
            "candidate period {} rejected by the oracle",
            v.candidate
        ))),
        _ => Ok(()),
    }
}

fn status_name(status: RecoveryStatus) -> &'static str {
    match status {
        RecoveryStatus::Recovered => "recovered",
        RecoveryStatus::NoCandidate => "no-candidate",
        RecoveryStatus::GcdObstruction => "gcd-obstruction",
    }
}

pub fn find_offset(config: &RunConfig) -> Result<(), CliError> {
    let spec = instance(config)?;
    let period = config.period.unwrap_or(spec.p());
    if period == 0 {
        return Err(CliError::Validation("putative period must be positive".into()));
    }
    let handle = OracleHandle::new(spec);
    let outcome = match config.method() {
        Method::Counting => find_offset_counting(&handle, period, spec.m(), config.seed()),
        Method::Decreasing => find_offset_decreasing(&handle, period, spec.m(), config.seed()),
    };
    let (transcript, failure) = match outcome {
        Ok(t) => (t, None),
        Err(Error::VerificationFailed { period, transcript }) => (
            *transcript,
            Some(CliError::Verification(format!("putative period {period} failed verification"))),
        ),
        Err(e @ Error::NonTermination { .. }) => return Err(CliError::Verification(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    emit(config.out.as_deref(), &render_transcript(&transcript, config.format())?)?;
    failure.map_or(Ok(()), Err)
}

fn render_transcript(t: &Transcript, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => json(t)?,
        Format::Csv => {
            let mut csv = Csv::new();
            let method = match t.method {
                Method::Counting => "counting",
                Method::Decreasing => "decreasing",
            };
            let mut meta = vec![
                ("method", method.to_string()),
                ("period", t.putative_period.to_string()),
                ("offset", t.offset.map(|s| s.to_string()).unwrap_or_default()),
                ("verified", t.verified.to_string()),
                ("iterations", t.iterations.to_string()),
                ("retries", t.retries.to_string()),
                ("quantum_queries", t.quantum_queries.to_string()),
                ("classical_probes", t.classical_probes.to_string()),
            ];
            if let Some(c) = &t.counting {
                meta.push(("t", c.contract.t.to_string()));
                meta.push(("true_count", c.contract.r.to_string()));
                meta.push(("reported_count", c.reported.to_string()));
            }
            csv.comment(&meta).row(&["step", "label"]);
            for (i, x) in t.history.iter().enumerate() {
                csv.row(&[i.to_string(), x.to_string()]);
            }
            csv.finish()
        }
    })
}

#[derive(Serialize)]
struct TrialsRow {
    algorithm: Algorithm,
    per_run_cost: Real,
    expected_runs: Real,
    total_cost: Real,
    ratio_vs_amplified: Real,
    bound_runs: Real,
    bound_cost: Real,
    bound_ratio: Real,
    trials_lower_bound: Option<Real>,
    lower_bound_verdict: Option<&'static str>,
    monte_carlo: Option<MonteCarloStats>,
}

#[derive(Serialize)]
struct TrialsReport {
    instance: OracleSpec,
    iterations: u64,
    rows: Vec<TrialsRow>,
}

fn trials_report(spec: &OracleSpec, runs: u64, seed: u64) -> Result<TrialsReport, CliError> {
    let reports = workfactor_comparison(spec).map_err(|e| match e {
        Error::InvalidProbability(_) => CliError::Validation(format!(
            "no measurement recovers P = {}; expected trials are unbounded",
            spec.p()
        )),
        e => e.into(),
    })?;
    let mut rows = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        let baseline = match r.algorithm {
            Algorithm::Qft => Some(Baseline::Qft),
            Algorithm::Qhs => Some(Baseline::Qhs),
            Algorithm::Amplified => None,
        };
        let lower = baseline.map(|b| trials_lower_bound(b, spec.n(), spec.m()));
        let monte_carlo = if runs > 0 {
            Some(monte_carlo_trials(r.algorithm, spec, runs, seed.wrapping_add(i as u64))?)
        } else {
            None
        };
        rows.push(TrialsRow {
            algorithm: r.algorithm,
            per_run_cost: Real(r.per_run_cost),
            expected_runs: Real(r.expected_runs),
            total_cost: Real(r.total_cost),
            ratio_vs_amplified: Real(r.ratio_vs_amplified),
            bound_runs: Real(r.bound_runs),
            bound_cost: Real(r.bound_cost),
            bound_ratio: Real(r.bound_ratio),
            trials_lower_bound: lower.map(Real),
            lower_bound_verdict: lower.map(|l| verdict(r.expected_runs >= l * (1.0 - 1e-12))),
            monte_carlo,
        });
    }
    Ok(TrialsReport {
        instance: *spec,
        iterations: GroverSchedule::new(spec.n(), spec.m())?.k,
        rows,
    })
}

fn render_trials(report: &TrialsReport, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => json(report)?,
        Format::Csv => {
            let mut csv = Csv::new();
            let mut meta = instance_pairs(&report.instance);
            meta.push(("k", report.iterations.to_string()));
            csv.comment(&meta).row(&[
                "algorithm",
                "per_run_cost",
                "expected_runs",
                "total_cost",
                "ratio_vs_amplified",
                "bound_runs",
                "bound_cost",
                "bound_ratio",
                "trials_lower_bound",
                "lower_bound_verdict",
                "mc_runs",
                "mc_mean",
                "mc_variance",
                "mc_ci_low",
                "mc_ci_high",
            ]);
            for r in &report.rows {
                let mc = r.monte_carlo.as_ref();
                csv.row(&[
                    r.algorithm.to_string(),
                    real(r.per_run_cost.0),
                    real(r.expected_runs.0),
                    real(r.total_cost.0),
                    real(r.ratio_vs_amplified.0),
                    real(r.bound_runs.0),
                    real(r.bound_cost.0),
                    real(r.bound_ratio.0),
                    opt_real(r.trials_lower_bound.map(|x| x.0)),
                    r.lower_bound_verdict.unwrap_or_default().to_string(),
                    mc.map(|m| m.runs.to_string()).unwrap_or_default(),
                    opt_real(mc.map(|m| m.mean)),
                    opt_real(mc.map(|m| m.variance)),
                    opt_real(mc.map(|m| m.ci_low)),
                    opt_real(mc.map(|m| m.ci_high)),
                ]);
            }
            csv.finish()
        }
    })
}

pub fn trials(config: &RunConfig) -> Result<(), CliError> {
    let spec = instance(config)?;
    let report = trials_report(&spec, config.runs.unwrap_or(0), config.seed())?;
    emit(config.out.as_deref(), &render_trials(&report, config.format())?)
}

/// Band the scaled workfactor ratio must stay in across a sweep.
const BAND_FACTOR: f64 = 4.0;

pub fn sweep(config: &RunConfig) -> Result<(), CliError> {
    let (m, p, s) = (config.m()?, config.p()?, config.s()?);
    let lo = config.log2_n_min.unwrap_or(8);
    let hi = config.log2_n_max.unwrap_or(14);
    if lo > hi || hi > 40 {
        return Err(CliError::Validation(format!("invalid exponent range {lo}..={hi}")));
    }
    if let Some(dir) = &config.out {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", dir.display())))?;
    }
    let extension = match config.format() {
        Format::Csv => "csv",
        Format::Json => "json",
    };

    let mut csv = Csv::new();
    csv.comment(&[("m", m.to_string()), ("p", p.to_string()), ("s", s.to_string())]);
    csv.row(&["n", "k_plus_1", "qft_ratio", "qft_ratio_scaled", "qft_bound_ratio", "qft_bound_ratio_scaled"]);
    let mut scaled = Vec::new();
    for j in lo..=hi {
        let n = 1u64 << j;
        let spec = OracleSpec::new(n, m, p, s, config.strict())?;
        warn_if_large(n);
        let report = trials_report(&spec, config.runs.unwrap_or(0), config.seed())?;
        if let Some(dir) = &config.out {
            let path = dir.join(format!("sweep-n{n}.{extension}"));
            emit(Some(&path), &render_trials(&report, config.format())?)?;
        }
        let qft = report.rows.iter().find(|r| r.algorithm == Algorithm::Qft).expect("three rows");
        let root = (n as f64 / m as f64).sqrt();
        let pair = (qft.ratio_vs_amplified.0 / root, qft.bound_ratio.0 / root);
        scaled.push(pair);
        csv.row(&[
            n.to_string(),
            real(report.rows[0].per_run_cost.0),
            real(qft.ratio_vs_amplified.0),
            real(pair.0),
            real(qft.bound_ratio.0),
            real(pair.1),
        ]);
    }
    let in_band = |column: &dyn Fn(&(f64, f64)) -> f64| {
        let values: Vec<f64> = scaled.iter().map(column).collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(0.0, f64::max);
        max / min <= BAND_FACTOR && min >= 1.0 / BAND_FACTOR && max <= BAND_FACTOR
    };
    csv.comment(&[
        ("band_factor", BAND_FACTOR.to_string()),
        ("qft_ratio_band", verdict(in_band(&|x| x.0)).to_string()),
        ("qft_bound_ratio_band", verdict(in_band(&|x| x.1)).to_string()),
    ]);
    emit(None, &csv.finish())
}
