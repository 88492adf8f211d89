//! Period recovery from a measured `y` by continued fractions.
//!
//! If `P² ≤ N` and `|{Py}_N| ≤ P/2`, then `|y/N - d/P| ≤ 1/2N ≤ 1/2P²` and
//! `d/P` is a convergent of `y/N` (Legendre's criterion). When additionally
//! `gcd(d, P) = 1` the denominator of that convergent is `P` itself.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::closedform::{closed_form_table, Algorithm};
use crate::error::{Error, Result};
use crate::oracle::OracleSpec;

/// `[a_0; a_1, a_2, ..]` with `a_i ≥ 1` for `i ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    quotients: Vec<u64>,
}

impl ContinuedFraction {
    pub fn from_quotients(quotients: Vec<u64>) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::DegenerateInstance("empty continued fraction"));
        }
        if let Some(index) = quotients.iter().skip(1).position(|&a| a == 0) {
            return Err(Error::InvalidQuotient { index: index + 1 });
        }
        Ok(Self { quotients })
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    /// Canonical form: the final quotient is at least 2 unless the length is 1.
    pub fn is_canonical(&self) -> bool {
        self.quotients.len() == 1 || *self.quotients.last().unwrap() >= 2
    }

    /// The represented rational in lowest terms, `(numerator, denominator)`.
    pub fn value(&self) -> (u64, u64) {
        let last = convergents(self).pop().expect("non-empty");
        (last.d, last.q)
    }
}

/// Euclid's algorithm on `num/den`.
pub fn continued_fraction(num: u64, den: u64) -> Result<ContinuedFraction> {
    if den == 0 {
        return Err(Error::ZeroDenominator);
    }
    let mut quotients = Vec::new();
    let (mut a, mut b) = (num, den);
    loop {
        quotients.push(a / b);
        let r = a % b;
        if r == 0 {
            break;
        }
        a = b;
        b = r;
    }
    Ok(ContinuedFraction { quotients })
}

/// A convergent `d/q`, always in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Convergent {
    pub d: u64,
    pub q: u64,
}

impl Convergent {
    /// Legendre's test `|y/N - d/q| ≤ 1/(2q²)`, in exact integer arithmetic.
    pub fn approximates(&self, y: u64, n: u64) -> bool {
        // |yq - dN| / (Nq) ≤ 1/(2q²)  ⇔  2q·|yq - dN| ≤ N
        let err = (y as i128 * self.q as i128 - self.d as i128 * n as i128).unsigned_abs();
        2 * self.q as u128 * err <= n as u128
    }
}

/// `p_i = a_i p_{i-1} + p_{i-2}`, `q_i = a_i q_{i-1} + q_{i-2}`.
pub fn convergents(cf: &ContinuedFraction) -> Vec<Convergent> {
    let (mut p_prev, mut p) = (1u64, cf.quotients[0]);
    let (mut q_prev, mut q) = (0u64, 1u64);
    let mut out = vec![Convergent { d: p, q }];
    for &a in &cf.quotients[1..] {
        (p_prev, p) = (p, a * p + p_prev);
        (q_prev, q) = (q, a * q + q_prev);
        out.push(Convergent { d: p, q });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryStatus {
    Recovered,
    NoCandidate,
    /// The accepted denominator is a proper divisor of the true period:
    /// `d` shared a factor with `P`.
    GcdObstruction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryResult {
    pub y: u64,
    pub n: u64,
    pub convergents: Vec<Convergent>,
    pub accepted: Option<u64>,
    pub status: RecoveryStatus,
}

impl RecoveryResult {
    /// The convergent whose denominator was accepted.
    pub fn accepted_convergent(&self) -> Option<Convergent> {
        let q = self.accepted?;
        self.convergents.iter().rev().find(|c| c.q == q).copied()
    }

    /// Reclassifies against a known true period.
    pub fn against_period(mut self, period: u64) -> Self {
        if let Some(q) = self.accepted {
            if q != period && period.is_multiple_of(q) {
                self.status = RecoveryStatus::GcdObstruction;
            }
        }
        self
    }
}

impl Serialize for RecoveryResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let ladder: Vec<[u64; 2]> = self.convergents.iter().map(|c| [c.d, c.q]).collect();
        let mut out = serializer.serialize_struct("RecoveryResult", 4)?;
        out.serialize_field("y", &self.y)?;
        out.serialize_field("convergents", &ladder)?;
        out.serialize_field("accepted", &self.accepted)?;
        out.serialize_field("status", &self.status)?;
        out.end()
    }
}

/// `⌊√n⌋`.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Candidate period from a measurement `y`.
///
/// Among the convergents `d/q` of `y/N` with `1 < q ≤ q_max` (default
/// `⌊√N⌋`) passing Legendre's test, the largest `q` is accepted. The oracle is
/// never consulted; smaller false candidates are left to verification.
pub fn recover_period(y: u64, n: u64, q_max: Option<u64>) -> RecoveryResult {
    let q_max = q_max.unwrap_or_else(|| isqrt(n));
    let convergents = continued_fraction(y % n.max(1), n.max(1))
        .map(|cf| convergents(&cf))
        .unwrap_or_default();
    let accepted = if y == 0 {
        None
    } else {
        convergents
            .iter()
            .filter(|c| c.q > 1 && c.q <= q_max && c.approximates(y, n))
            .map(|c| c.q)
            .max()
    };
    RecoveryResult {
        y,
        n,
        convergents,
        accepted,
        status: if accepted.is_some() {
            RecoveryStatus::Recovered
        } else {
            RecoveryStatus::NoCandidate
        },
    }
}

/// `{a}_N`: the residue of `a` mod `N` in `(-N/2, N/2]`.
pub fn smallest_residue(a: i128, n: u64) -> i128 {
    let n = n as i128;
    let r = a.rem_euclid(n);
    if 2 * r > n {
        r - n
    } else {
        r
    }
}

/// `d(y) = round(Py/N)`, rounding halves down so that `{Py}_N = Py - N·d(y)`.
pub fn y_to_d(y: u64, n: u64, p: u64) -> u64 {
    // smallest d with Py - Nd ≤ N/2, i.e. ⌈(2Py - N) / 2N⌉
    let num = 2 * p as i128 * y as i128 - n as i128;
    let den = 2 * n as i128;
    (-(-num).div_euclid(den)) as u64
}

/// `y(d) = round(Nd/P)`, rounding halves up.
pub fn d_to_y(d: u64, n: u64, p: u64) -> u64 {
    ((2 * n as u128 * d as u128 + p as u128) / (2 * p as u128)) as u64
}

/// `Y = {y : |{Py}_N| ≤ P/2}`.
pub fn near_resonant_set(n: u64, p: u64) -> Vec<u64> {
    (0..n)
        .filter(|&y| 2 * smallest_residue(p as i128 * y as i128, n).unsigned_abs() <= p as u128)
        .collect()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The successful measurements for period `p`: `y ≠ 0`, `|{Py}_N| ≤ P/2` and
/// `gcd(d(y), P) = 1`. The set does not depend on the algorithm.
pub fn success_set_for(n: u64, p: u64) -> Vec<u64> {
    near_resonant_set(n, p)
        .into_iter()
        .filter(|&y| y != 0 && gcd(y_to_d(y, n, p), p) == 1)
        .collect()
}

pub fn success_set(spec: &OracleSpec) -> Vec<u64> {
    success_set_for(spec.n(), spec.p())
}

/// `Pr(S)` under the closed-form table of `algorithm`.
pub fn success_probability(algorithm: Algorithm, spec: &OracleSpec) -> f64 {
    closed_form_table(algorithm, spec).mass_of(&success_set(spec))
}

/// Every `y` from which recovery returns exactly `P`. Contains
/// [`success_set`], and equals it when `N = P²`; a wider window
/// `|{Py}_N| ≤ N/2P` can still pass Legendre's test when `P² < N`.
pub fn recoverable_set(spec: &OracleSpec) -> Vec<u64> {
    (1..spec.n())
        .filter(|&y| recover_period(y, spec.n(), None).accepted == Some(spec.p()))
        .collect()
}

/// `Pr` of [`recoverable_set`]: the per-trial success probability of the
/// full pipeline.
pub fn recoverable_probability(algorithm: Algorithm, spec: &OracleSpec) -> f64 {
    closed_form_table(algorithm, spec).mass_of(&recoverable_set(spec))
}

/// Euler's totient by trial division.
pub fn totient(p: u64) -> u64 {
    let mut result = p;
    let mut rest = p;
    let mut f = 2;
    while f * f <= rest {
        if rest.is_multiple_of(f) {
            while rest.is_multiple_of(f) {
                rest /= f;
            }
            result -= result / f;
        }
        f += 1;
    }
    if rest > 1 {
        result -= result / rest;
    }
    result
}

/// `φ(P)/P`, the chance a uniform `d` is coprime to `P`.
pub fn totient_ratio(p: u64) -> f64 {
    totient(p) as f64 / p as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ladder(result: &[Convergent]) -> Vec<(u64, u64)> {
        result.iter().map(|c| (c.d, c.q)).collect()
    }

    #[test]
    fn expansion_examples() {
        let cf = continued_fraction(5, 16).unwrap();
        assert_eq!(cf.quotients(), &[0, 3, 5]);
        assert_eq!(ladder(&convergents(&cf)), vec![(0, 1), (1, 3), (5, 16)]);
        assert_eq!(continued_fraction(0, 16).unwrap().quotients(), &[0]);
        assert_eq!(ladder(&convergents(&continued_fraction(0, 16).unwrap())), vec![(0, 1)]);
        assert_eq!(continued_fraction(1, 2).unwrap().quotients(), &[0, 2]);
        assert!(matches!(continued_fraction(1, 0), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn fibonacci_denominators() {
        let cf = ContinuedFraction::from_quotients(vec![0, 1, 1, 1]).unwrap();
        let qs: Vec<u64> = convergents(&cf).iter().map(|c| c.q).collect();
        assert_eq!(qs, vec![1, 1, 2, 3]);
        let cf = ContinuedFraction::from_quotients(vec![0, 1, 1, 1, 1]).unwrap();
        let qs: Vec<u64> = convergents(&cf).iter().map(|c| c.q).collect();
        assert_eq!(qs, vec![1, 1, 2, 3, 5]);
        assert!(!cf.is_canonical());
        assert!(ContinuedFraction::from_quotients(vec![1, 0]).is_err());
    }

    #[test]
    fn recovery_examples() {
        let r = recover_period(4, 16, Some(4));
        assert_eq!(r.accepted, Some(4));
        assert_eq!(r.status, RecoveryStatus::Recovered);
        assert_eq!(r.accepted_convergent(), Some(Convergent { d: 1, q: 4 }));

        let r = recover_period(0, 16, None);
        assert_eq!(r.status, RecoveryStatus::NoCandidate);
        assert_eq!(r.accepted, None);

        // 1/3 is within 1/18 of 5/16: a false candidate
        let r = recover_period(5, 16, Some(4));
        assert_eq!(r.accepted, Some(3));
    }

    #[test]
    fn gcd_obstruction_is_reported_against_the_true_period() {
        // y = 8, N = 16, P = 4: d = 2 shares a factor with 4
        let r = recover_period(8, 16, None).against_period(4);
        assert_eq!(r.accepted, Some(2));
        assert_eq!(r.status, RecoveryStatus::GcdObstruction);
    }

    #[test]
    fn json_layout() {
        let r = recover_period(4, 16, Some(4));
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"y":4,"convergents":[[0,1],[1,4]],"accepted":4,"status":"recovered"}"#
        );
        let none = recover_period(0, 16, None);
        assert_eq!(
            serde_json::to_string(&none).unwrap(),
            r#"{"y":0,"convergents":[[0,1]],"accepted":null,"status":"no-candidate"}"#
        );
    }

    #[test]
    fn residue_examples() {
        assert_eq!(smallest_residue(7, 16), 7);
        assert_eq!(smallest_residue(9, 16), -7);
        assert_eq!(smallest_residue(8, 16), 8);
        assert_eq!(smallest_residue(-8, 16), 8);
        assert_eq!(smallest_residue(3, 7), 3);
        assert_eq!(smallest_residue(4, 7), -3);
    }

    #[test]
    fn d_and_y_examples() {
        let ys: Vec<u64> = (0..4).map(|d| d_to_y(d, 16, 4)).collect();
        assert_eq!(ys, vec![0, 4, 8, 12]);
        for (d, &y) in ys.iter().enumerate() {
            assert_eq!(y_to_d(y, 16, 4), d as u64);
        }
        for n in 1..100 {
            for p in 1..=isqrt(n) {
                assert_eq!(y_to_d(0, n, p), 0);
            }
        }
    }

    #[test]
    fn d_and_y_invert_on_the_near_resonant_set() {
        for n in 1..=512u64 {
            for p in 1..=isqrt(n) {
                let set = near_resonant_set(n, p);
                for d in 0..p {
                    let y = d_to_y(d, n, p);
                    assert!(set.contains(&y), "n={n} p={p} d={d}");
                    assert_eq!(y_to_d(y, n, p), d);
                }
                for &y in &set {
                    let d = y_to_d(y, n, p);
                    assert!(d < p);
                    assert_eq!(
                        smallest_residue(p as i128 * y as i128, n),
                        p as i128 * y as i128 - n as i128 * d as i128
                    );
                    // the round trip can only miss at an exact tie |{Py}_N| = P/2
                    if d_to_y(d, n, p) != y {
                        assert_eq!(2 * smallest_residue(p as i128 * y as i128, n).unsigned_abs(), p as u128);
                    }
                }
                let ties = set
                    .iter()
                    .filter(|&&y| 2 * smallest_residue(p as i128 * y as i128, n).unsigned_abs() == p as u128)
                    .count();
                assert!(set.len() >= p as usize && set.len() <= p as usize + ties);
            }
        }
    }

    #[test]
    fn success_set_examples() {
        let spec = OracleSpec::strict(16, 3, 4, 1).unwrap();
        assert_eq!(success_set(&spec), vec![4, 12]);
        for (n, p) in [(49u64, 7u64), (100, 5), (64, 2), (1000, 31)] {
            assert_eq!(success_set_for(n, p).len() as u64, p - 1);
        }
    }

    #[test]
    fn success_set_matches_the_legendre_form() {
        // {y : |y/N - d/P| ≤ 1/2P², gcd(d, P) = 1, d = d(y)}, y ≠ 0
        for n in 2..=300u64 {
            for p in 2..=isqrt(n) {
                let by_residue = success_set_for(n, p);
                for &y in &by_residue {
                    let d = y_to_d(y, n, p);
                    assert!(Convergent { d, q: p }.approximates(y, n));
                }
            }
        }
    }

    #[test]
    fn totient_examples() {
        assert_eq!(totient_ratio(4), 0.5);
        assert_eq!(totient_ratio(7), 6.0 / 7.0);
        assert!((totient_ratio(12) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(totient(1), 1);
        let brute = |p: u64| (1..=p).filter(|&d| gcd(d, p) == 1).count() as u64;
        for p in 1..500 {
            assert_eq!(totient(p), brute(p));
        }
    }

    #[test]
    fn completeness_at_true_periods() {
        for n in 2..=512u64 {
            for p in 2..=isqrt(n) {
                for y in success_set_for(n, p) {
                    let r = recover_period(y, n, None);
                    assert_eq!(r.accepted, Some(p), "n={n} p={p} y={y}");
                }
            }
        }
    }

    #[test]
    fn recoverable_set_sits_between_the_two_windows() {
        let mut strictly_wider = 0;
        for n in [16u64, 50, 100, 255, 256, 400] {
            for p in 2..=isqrt(n) {
                let spec = OracleSpec::strict(n, 1, p, 0).unwrap();
                let corollary = success_set(&spec);
                let recoverable = recoverable_set(&spec);
                assert!(corollary.iter().all(|y| recoverable.binary_search(y).is_ok()));
                for &y in &recoverable {
                    // |y/N - d/P| ≤ 1/(2P²) with gcd(d, P) = 1
                    let d = y_to_d(y, n, p);
                    let err = (y as i128 * p as i128 - d as i128 * n as i128).unsigned_abs();
                    assert!(2 * err * p as u128 <= n as u128, "n={n} p={p} y={y}");
                    assert_eq!(gcd(d, p), 1);
                }
                if n == p * p {
                    assert_eq!(corollary, recoverable);
                }
                strictly_wider += usize::from(recoverable.len() > corollary.len());
            }
        }
        assert!(strictly_wider > 0);
    }

    #[test]
    fn isqrt_is_exact() {
        for n in 0..100_000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
    }

    proptest! {
        #[test]
        fn expansion_reconstructs_the_rational(num in 0u64..1_000_000, den in 1u64..1_000_000) {
            let cf = continued_fraction(num, den).unwrap();
            prop_assert!(cf.is_canonical());
            let g = gcd(num, den);
            prop_assert_eq!(cf.value(), (num / g, den / g));
            let ladder = convergents(&cf);
            for c in &ladder {
                prop_assert_eq!(gcd(c.d, c.q), 1);
            }
            for w in ladder.windows(2).skip(1) {
                prop_assert!(w[1].q > w[0].q);
            }
        }

        #[test]
        fn accepted_candidates_pass_legendre(n in 2u64..5000, y_frac in 0.0f64..1.0) {
            let y = ((n as f64 * y_frac) as u64).min(n - 1);
            let r = recover_period(y, n, None);
            if let Some(c) = r.accepted_convergent() {
                prop_assert!(c.approximates(y, n));
                prop_assert!(c.q <= isqrt(n));
            }
        }

        #[test]
        fn ratio_of_sums_stays_between_bounds(
            pairs in prop::collection::vec((0.01f64..10.0, 0.01f64..10.0), 1..20),
        ) {
            let lo = pairs.iter().map(|(a, b)| a / b).fold(f64::INFINITY, f64::min);
            let hi = pairs.iter().map(|(a, b)| a / b).fold(0.0, f64::max);
            let num: f64 = pairs.iter().map(|(a, _)| a).sum();
            let den: f64 = pairs.iter().map(|(_, b)| b).sum();
            prop_assert!(num / den >= lo * (1.0 - 1e-12) && num / den <= hi * (1.0 + 1e-12));
        }
    }
}
