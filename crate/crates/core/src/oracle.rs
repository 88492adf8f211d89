//! Local period problem instances and the membership oracle.
//!
//! An instance `(N, M, P, s)` marks `A = {s + rP : r = 0..M-1}` inside the
//! labels `L = {0, .., N-1}`. Strict instances additionally satisfy `P² ≤ N`
//! and `2M ≤ N`; the latter is the weakest reading of `M ≪ N` under which
//! every ratio bound stays well defined.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything that marks a subset of `0..label_count()`.
///
/// The simulator reads marked sets through this trait without charging
/// oracle queries; classical evaluations go through [`OracleHandle`].
pub trait MarkedSet {
    fn label_count(&self) -> u64;

    fn marked_count(&self) -> u64;

    fn contains(&self, x: u64) -> bool;

    /// Marked labels in ascending order.
    fn marked_labels(&self) -> Vec<u64> {
        (0..self.label_count()).filter(|&x| self.contains(x)).collect()
    }
}

/// A validated instance of the local period problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OracleSpec {
    n: u64,
    m: u64,
    p: u64,
    s: u64,
}

impl OracleSpec {
    /// Validates `(N, M, P, s)`; `strict` adds the `P² ≤ N` and `2M ≤ N` checks.
    pub fn new(n: u64, m: u64, p: u64, s: u64, strict: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateInstance("N = 0"));
        }
        if m == 0 {
            return Err(Error::DegenerateInstance("M = 0"));
        }
        if p == 0 {
            return Err(Error::DegenerateInstance("P = 0"));
        }
        let last = (m - 1)
            .checked_mul(p)
            .and_then(|span| span.checked_add(s))
            .unwrap_or(u64::MAX);
        if last > n - 1 {
            return Err(Error::OverflowsLabelSpace { last, max: n - 1 });
        }
        if strict {
            let square = p.saturating_mul(p);
            if square > n {
                return Err(Error::PeriodTooLarge { square, n });
            }
            if 2 * m > n {
                return Err(Error::MarkedSetTooLarge { double: 2 * m, n });
            }
        }
        Ok(Self { n, m, p, s })
    }

    pub fn strict(n: u64, m: u64, p: u64, s: u64) -> Result<Self> {
        Self::new(n, m, p, s, true)
    }

    pub fn relaxed(n: u64, m: u64, p: u64, s: u64) -> Result<Self> {
        Self::new(n, m, p, s, false)
    }

    /// Re-runs validation, e.g. after deserializing untrusted input.
    pub fn validated(self, strict: bool) -> Result<Self> {
        Self::new(self.n, self.m, self.p, self.s, strict)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn is_strict(&self) -> bool {
        self.p * self.p <= self.n && 2 * self.m <= self.n
    }

    /// `[s, s + P, .., s + (M-1)P]`.
    pub fn members(&self) -> Vec<u64> {
        (0..self.m).map(|r| self.s + r * self.p).collect()
    }

    /// Largest marked label, `s + (M-1)P`.
    pub fn last_member(&self) -> u64 {
        self.s + (self.m - 1) * self.p
    }
}

impl MarkedSet for OracleSpec {
    fn label_count(&self) -> u64 {
        self.n
    }

    fn marked_count(&self) -> u64 {
        self.m
    }

    fn contains(&self, x: u64) -> bool {
        x >= self.s && (x - self.s).is_multiple_of(self.p) && (x - self.s) / self.p < self.m
    }

    fn marked_labels(&self) -> Vec<u64> {
        self.members()
    }
}

/// An arbitrary marked subset. Only meant for negative tests: nothing
/// guarantees it has a period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subset {
    n: u64,
    labels: BTreeSet<u64>,
}

impl Subset {
    pub fn new(n: u64, labels: impl IntoIterator<Item = u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateInstance("N = 0"));
        }
        let labels: BTreeSet<u64> = labels.into_iter().collect();
        if let Some(&label) = labels.iter().find(|&&x| x >= n) {
            return Err(Error::LabelOutOfRange { label, n });
        }
        if labels.is_empty() {
            return Err(Error::DegenerateInstance("empty marked set"));
        }
        Ok(Self { n, labels })
    }
}

impl MarkedSet for Subset {
    fn label_count(&self) -> u64 {
        self.n
    }

    fn marked_count(&self) -> u64 {
        self.labels.len() as u64
    }

    fn contains(&self, x: u64) -> bool {
        self.labels.contains(&x)
    }

    fn marked_labels(&self) -> Vec<u64> {
        self.labels.iter().copied().collect()
    }
}

#[derive(Debug, Clone)]
enum Marking {
    Progression(OracleSpec),
    Subset(Subset),
}

/// The oracle `f` with a tally of classical evaluations.
///
/// Evaluation is pure in its result; the tally is an atomic counter so a
/// handle can be shared across threads.
#[derive(Debug)]
pub struct OracleHandle {
    marking: Marking,
    queries: AtomicU64,
}

impl OracleHandle {
    pub fn new(spec: OracleSpec) -> Self {
        Self {
            marking: Marking::Progression(spec),
            queries: AtomicU64::new(0),
        }
    }

    pub fn from_subset(subset: Subset) -> Self {
        Self {
            marking: Marking::Subset(subset),
            queries: AtomicU64::new(0),
        }
    }

    /// The generating instance, if this handle wraps a progression.
    pub fn spec(&self) -> Option<&OracleSpec> {
        match &self.marking {
            Marking::Progression(spec) => Some(spec),
            Marking::Subset(_) => None,
        }
    }

    pub fn n(&self) -> u64 {
        self.label_count()
    }

    /// `f(x)`; counts one query.
    pub fn evaluate(&self, x: u64) -> Result<bool> {
        let n = self.n();
        if x >= n {
            return Err(Error::LabelOutOfRange { label: x, n });
        }
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.contains(x))
    }

    /// `f` extended by zero outside `0..N`; counts one query.
    ///
    /// Labels outside the domain cannot be marked, so verification probes such
    /// as `s + (M-1)P₁` never need to fail with an error.
    pub fn probe(&self, x: i128) -> bool {
        self.queries.fetch_add(1, Ordering::Relaxed);
        match u64::try_from(x) {
            Ok(x) if x < self.n() => self.contains(x),
            _ => false,
        }
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

impl Clone for OracleHandle {
    fn clone(&self) -> Self {
        Self {
            marking: self.marking.clone(),
            queries: AtomicU64::new(self.query_count()),
        }
    }
}

impl MarkedSet for OracleHandle {
    fn label_count(&self) -> u64 {
        match &self.marking {
            Marking::Progression(spec) => spec.label_count(),
            Marking::Subset(subset) => subset.label_count(),
        }
    }

    fn marked_count(&self) -> u64 {
        match &self.marking {
            Marking::Progression(spec) => spec.marked_count(),
            Marking::Subset(subset) => subset.marked_count(),
        }
    }

    fn contains(&self, x: u64) -> bool {
        match &self.marking {
            Marking::Progression(spec) => spec.contains(x),
            Marking::Subset(subset) => subset.contains(x),
        }
    }

    fn marked_labels(&self) -> Vec<u64> {
        match &self.marking {
            Marking::Progression(spec) => spec.marked_labels(),
            Marking::Subset(subset) => subset.marked_labels(),
        }
    }
}

/// Every valid strict instance with the given label-space size, in
/// `(P, M, s)` lexicographic order.
pub fn strict_instances(n: u64) -> impl Iterator<Item = OracleSpec> {
    (1..=n)
        .take_while(move |p| p * p <= n)
        .flat_map(move |p| {
            (1..=n / 2)
                .take_while(move |m| (m - 1) * p < n)
                .flat_map(move |m| {
                    (0..n - (m - 1) * p).map(move |s| OracleSpec { n, m, p, s })
                })
        })
}
