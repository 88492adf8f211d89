//! Verifying a putative period and recovering the offset `s`.
//!
//! The three-probe test `f(s₁) = f(s₁ + P₁) = f(s₁ + (M-1)P₁) = 1` holds only
//! for the true pair once `M ≥ 2`: a smaller `P₁` lands between members, a
//! larger one (or a larger `s₁`) overshoots the last member, and a smaller
//! `s₁` starts below the first.
//!
//! Two quantum-assisted searches are simulated classically:
//!
//! * **counting**: measure a member `x₁ = s + r₁P` after amplification, count
//!   the members below it through `g(x) = max(0, x₁ - (x+1)P)` with an
//!   idealized exact counter, and read off `s = x₁ - RP`;
//! * **decreasing**: repeatedly amplify over the `g`-image and measure a
//!   smaller member until `f(x - P) = 0`.
//!
//! The counter is a model, not a phase-estimation circuit: it returns the
//! exact count with a fixed probability (at least 2/3) and a wrong count
//! otherwise, and is charged `⌈√((R+1)(T-R+1))⌉` oracle applications.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{MarkedSet, OracleHandle};
use crate::simulator::GroverSchedule;

/// Retries allowed when a measurement lands outside the marked set.
pub const RETRY_CAP: u64 = 16;

/// Minimum success probability of the idealized counter.
pub const COUNTER_CONFIDENCE: f64 = 2.0 / 3.0;

/// `f(s) = f(s + P₁) = f(s + (M-1)P₁) = 1` for a known offset.
pub fn test_period_known_s(handle: &OracleHandle, s: u64, p1: u64, m: u64) -> bool {
    test_pair(handle, s, p1, m)
}

/// `f(s₁) = f(s₁ + P₁) = f(s₁ + (M-1)P₁) = 1`. Probes beyond the label space
/// read as zero. A one-member progression has no second term, so `M = 1`
/// reduces to `f(s₁) = 1` and cannot distinguish periods.
pub fn test_pair(handle: &OracleHandle, s1: u64, p1: u64, m: u64) -> bool {
    let s1 = s1 as i128;
    if m <= 1 {
        return handle.probe(s1);
    }
    let p1 = p1 as i128;
    let last = s1 + (m as i128 - 1) * p1;
    handle.probe(s1) && handle.probe(s1 + p1) && handle.probe(last)
}

/// The first candidate offset that passes [`test_pair`] with `p1`.
pub fn exhaust_offsets(
    handle: &OracleHandle,
    candidates: impl IntoIterator<Item = u64>,
    p1: u64,
    m: u64,
) -> Option<(u64, u64)> {
    candidates
        .into_iter()
        .find(|&s1| test_pair(handle, s1, p1, m))
        .map(|s1| (s1, p1))
}

/// `g(x) = max(0, x₁ - (x+1)P)`.
pub fn g_function(x: u64, x1: u64, p: u64) -> u64 {
    x1.saturating_sub((x + 1).saturating_mul(p))
}

/// `T`: the smallest power of two with `T ≥ M`.
pub fn counting_register_size(m: u64) -> u64 {
    m.max(1).next_power_of_two()
}

/// Draws a label from the amplified distribution: `a_k²` on each marked
/// label, `b_k²` elsewhere. The caller checks membership through `f`.
pub fn amplified_measure_member(handle: &OracleHandle, seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    measure_amplified(handle, handle.marked_count(), &mut rng).0
}

/// Amplify with `k` chosen for `assumed_m` marked labels and measure.
/// Returns the label and the number of Grover iterations spent.
fn measure_amplified(handle: &OracleHandle, assumed_m: u64, rng: &mut ChaCha8Rng) -> (u64, u64) {
    let n = handle.n();
    let actual_m = handle.marked_count();
    let k = GroverSchedule::new(n, assumed_m.clamp(1, n))
        .expect("clamped into 1..=N")
        .k;
    let schedule = GroverSchedule::with_iterations(n, actual_m, k).expect("handles mark at least one label");
    let marked = handle.marked_labels();
    let label = draw_two_level(rng, schedule.good_probability(), &marked, n, |x| handle.contains(x));
    (label, k)
}

/// Uniform over `marked` with probability `good`, otherwise uniform over the
/// complement in `0..n` (by rejection).
fn draw_two_level(
    rng: &mut ChaCha8Rng,
    good: f64,
    marked: &[u64],
    n: u64,
    contains: impl Fn(u64) -> bool,
) -> u64 {
    let all_marked = marked.len() as u64 == n;
    if all_marked || rng.gen::<f64>() < good {
        marked[rng.gen_range(0..marked.len())]
    } else {
        loop {
            let x = rng.gen_range(0..n);
            if !contains(x) {
                return x;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Counting,
    Decreasing,
}

/// The counting register and the count it holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingContract {
    /// Smallest power of two `≥ M`.
    pub t: u64,
    /// `|{x < T : f(g(x)) = 1}|`.
    pub r: u64,
    pub confidence: f64,
}

impl CountingContract {
    pub fn new(m: u64, r: u64) -> Self {
        Self {
            t: counting_register_size(m),
            r,
            confidence: COUNTER_CONFIDENCE,
        }
    }

    /// `⌈√((R+1)(T-R+1))⌉` oracle applications.
    pub fn cost(&self) -> u64 {
        let t = self.t as f64;
        let r = self.r as f64;
        ((r + 1.0) * (t - r + 1.0)).sqrt().ceil() as u64
    }
}

/// The idealized exact counter.
#[derive(Debug, Clone)]
pub struct IdealCounter {
    success_probability: f64,
    rng: ChaCha8Rng,
}

impl IdealCounter {
    /// Correct with probability exactly [`COUNTER_CONFIDENCE`].
    pub fn new(seed: u64) -> Self {
        Self::with_success_probability(COUNTER_CONFIDENCE, seed)
    }

    pub fn with_success_probability(success_probability: f64, seed: u64) -> Self {
        assert!(
            (COUNTER_CONFIDENCE..=1.0).contains(&success_probability),
            "the counting contract guarantees at least 2/3"
        );
        Self {
            success_probability,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn always_correct() -> Self {
        Self::with_success_probability(1.0, 0)
    }

    /// The reported count; wrong answers are uniform over `0..=T` minus the
    /// true count.
    pub fn report(&mut self, contract: &CountingContract) -> u64 {
        if self.rng.gen::<f64>() < self.success_probability {
            return contract.r;
        }
        let wrong = self.rng.gen_range(0..contract.t);
        if wrong >= contract.r {
            wrong + 1
        } else {
            wrong
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingRecord {
    pub contract: CountingContract,
    pub reported: u64,
    pub correct: bool,
    pub cost: u64,
}

/// State of a decreasing-measurement search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetSearchState {
    pub x_current: u64,
    /// Members of the `g`-image, i.e. the multiplier `r` when the period is
    /// right. Known to the simulator, not to the searcher.
    pub r_current: u64,
    pub p_candidate: u64,
    pub history: Vec<u64>,
}

impl OffsetSearchState {
    /// `s = α + βP` with `α = s mod P`.
    pub fn decompose(s: u64, p: u64) -> (u64, u64) {
        (s % p, s / p)
    }
}

/// Everything an offset search did, for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub method: Method,
    pub putative_period: u64,
    pub marked_count: u64,
    /// Members measured, strictly decreasing.
    pub history: Vec<u64>,
    /// Amplify-and-measure rounds after the first member, retries included.
    pub iterations: u64,
    pub retries: u64,
    /// Oracle applications inside amplification and counting.
    pub quantum_queries: u64,
    /// Classical evaluations of `f`.
    pub classical_probes: u64,
    pub counting: Option<CountingRecord>,
    pub offset: Option<u64>,
    pub verified: bool,
}

impl Transcript {
    fn new(method: Method, period: u64, m: u64) -> Self {
        Self {
            method,
            putative_period: period,
            marked_count: m,
            history: Vec::new(),
            iterations: 0,
            retries: 0,
            quantum_queries: 0,
            classical_probes: 0,
            counting: None,
            offset: None,
            verified: false,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Per-search bookkeeping shared by both methods.
struct Search<'a> {
    handle: &'a OracleHandle,
    period: u64,
    m: u64,
    probes_before: u64,
    transcript: Transcript,
}

impl<'a> Search<'a> {
    fn new(handle: &'a OracleHandle, method: Method, period: u64, m: u64) -> Self {
        Self {
            handle,
            period,
            m,
            probes_before: handle.query_count(),
            transcript: Transcript::new(method, period, m),
        }
    }

    fn finish(mut self, candidate: u64) -> Result<Transcript> {
        let verified = test_pair(self.handle, candidate, self.period, self.m);
        self.transcript.classical_probes = self.handle.query_count() - self.probes_before;
        self.transcript.offset = Some(candidate);
        self.transcript.verified = verified;
        if verified {
            Ok(self.transcript)
        } else {
            self.fail()
        }
    }

    fn fail(mut self) -> Result<Transcript> {
        self.transcript.classical_probes = self.handle.query_count() - self.probes_before;
        self.transcript.verified = false;
        Err(Error::VerificationFailed {
            period: self.period,
            transcript: Box::new(self.transcript),
        })
    }

    /// `s = 0` is settled by a single probe of `f(0)`.
    fn zero_offset(&self) -> bool {
        self.handle.probe(0)
    }

    /// Amplifies over all of `L` and measures until a member turns up.
    fn first_member(&mut self, rng: &mut ChaCha8Rng) -> Result<u64> {
        for attempt in 0..=RETRY_CAP {
            let (x, k) = measure_amplified(self.handle, self.m, rng);
            self.transcript.quantum_queries += k;
            if self.handle.probe(x as i128) {
                self.transcript.history.push(x);
                return Ok(x);
            }
            if attempt < RETRY_CAP {
                self.transcript.retries += 1;
            }
        }
        Err(Error::NonTermination { limit: RETRY_CAP })
    }

    /// Labels `x < T` with `f(g(x)) = 1`, read off the marked set without
    /// charging queries.
    fn g_image_members(&self, x_current: u64) -> Vec<u64> {
        let t = counting_register_size(self.m);
        (0..t)
            .filter(|&x| self.handle.contains(g_function(x, x_current, self.period)))
            .collect()
    }

    /// Whether the member below `x` is still marked.
    fn has_predecessor(&self, x: u64) -> bool {
        self.handle.probe(x as i128 - self.period as i128)
    }
}

/// Counting search from an explicit first member `x₁` and counter.
pub fn count_offset_from(
    handle: &OracleHandle,
    x1: u64,
    period: u64,
    m: u64,
    counter: &mut IdealCounter,
) -> Result<Transcript> {
    let mut search = Search::new(handle, Method::Counting, period, m);
    if search.zero_offset() {
        return search.finish(0);
    }
    search.transcript.history.push(x1);
    if !search.has_predecessor(x1) {
        return search.finish(x1);
    }
    let contract = CountingContract::new(m, search.g_image_members(x1).len() as u64);
    let reported = counter.report(&contract);
    let cost = contract.cost();
    search.transcript.quantum_queries += cost;
    search.transcript.counting = Some(CountingRecord {
        contract,
        reported,
        correct: reported == contract.r,
        cost,
    });
    match x1.checked_sub(reported.saturating_mul(period)) {
        Some(candidate) => search.finish(candidate),
        None => search.fail(),
    }
}

/// Amplified measurement of a member, then idealized counting.
/// `seed` drives both the measurement and the counter's failures.
pub fn find_offset_counting(handle: &OracleHandle, period: u64, m: u64, seed: u64) -> Result<Transcript> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counter = IdealCounter::new(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut search = Search::new(handle, Method::Counting, period, m);
    if search.zero_offset() {
        return search.finish(0);
    }
    let x1 = search.first_member(&mut rng)?;
    let step1 = search.transcript;
    let probes_before = search.probes_before;

    let mut transcript = match count_offset_from(handle, x1, period, m, &mut counter) {
        Ok(t) => t,
        Err(Error::VerificationFailed { transcript, .. }) => {
            let mut t = *transcript;
            merge_step1(&mut t, &step1, handle.query_count() - probes_before);
            return Err(Error::VerificationFailed {
                period,
                transcript: Box::new(t),
            });
        }
        Err(e) => return Err(e),
    };
    merge_step1(&mut transcript, &step1, handle.query_count() - probes_before);
    Ok(transcript)
}

fn merge_step1(transcript: &mut Transcript, step1: &Transcript, probes: u64) {
    transcript.quantum_queries += step1.quantum_queries;
    transcript.retries += step1.retries;
    transcript.classical_probes = probes;
}

/// Decreasing sequence of amplified measurements.
pub fn find_offset_decreasing(handle: &OracleHandle, period: u64, m: u64, seed: u64) -> Result<Transcript> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut search = Search::new(handle, Method::Decreasing, period, m);
    if search.zero_offset() {
        return search.finish(0);
    }
    let x1 = search.first_member(&mut rng)?;
    let mut state = OffsetSearchState {
        x_current: x1,
        r_current: 0,
        p_candidate: period,
        history: vec![x1],
    };
    let limit = iteration_limit(m);
    let t = counting_register_size(m);

    while search.has_predecessor(state.x_current) {
        let image = search.g_image_members(state.x_current);
        state.r_current = image.len() as u64;
        let schedule = GroverSchedule::new(t, state.r_current).expect("f(x - P) = 1 marks g(0)");

        let mut next = None;
        for _ in 0..=RETRY_CAP {
            if search.transcript.iterations >= limit {
                search.transcript.history = state.history;
                return Err(Error::NonTermination { limit });
            }
            search.transcript.iterations += 1;
            search.transcript.quantum_queries += schedule.k;
            let x = draw_two_level(&mut rng, schedule.good_probability(), &image, t, |x| {
                image.binary_search(&x).is_ok()
            });
            let value = g_function(x, state.x_current, period);
            if handle.probe(value as i128) {
                next = Some(value);
                break;
            }
            search.transcript.retries += 1;
        }
        let Some(value) = next else {
            search.transcript.history = state.history;
            return Err(Error::NonTermination { limit: RETRY_CAP });
        };
        state.x_current = value;
        state.history.push(value);
    }

    search.transcript.history = state.history;
    search.finish(state.x_current)
}

/// `64·⌈log₂M + 1⌉`.
pub fn iteration_limit(m: u64) -> u64 {
    64 * ((m.max(1) as f64).log2() + 1.0).ceil() as u64
}
