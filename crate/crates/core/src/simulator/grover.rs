use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::state::StateVector;
use crate::error::{Error, Result};
use crate::oracle::MarkedSet;

/// Amplification geometry for `M` marked labels out of `N`.
///
/// After `k` iterations the state is `a_k` on every marked label and `b_k`
/// everywhere else, with
/// `a_k = sin((2k+1)θ)/√M`, `b_k = cos((2k+1)θ)/√(N-M)` and `sin θ = √(M/N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroverSchedule {
    pub n: u64,
    pub m: u64,
    pub theta: f64,
    pub k: u64,
    pub a_k: f64,
    pub b_k: f64,
}

impl GroverSchedule {
    /// Schedule with the standard `k = ⌊π/4θ⌋`.
    pub fn new(n: u64, m: u64) -> Result<Self> {
        let theta = Self::angle(n, m)?;
        Ok(Self::build(n, m, theta, optimal_iterations(theta)))
    }

    /// Schedule with an explicit iteration count.
    pub fn with_iterations(n: u64, m: u64, k: u64) -> Result<Self> {
        let theta = Self::angle(n, m)?;
        Ok(Self::build(n, m, theta, k))
    }

    fn angle(n: u64, m: u64) -> Result<f64> {
        if m == 0 {
            return Err(Error::DegenerateInstance("M = 0"));
        }
        if m > n {
            return Err(Error::DegenerateInstance("M > N"));
        }
        Ok((m as f64 / n as f64).sqrt().asin())
    }

    fn build(n: u64, m: u64, theta: f64, k: u64) -> Self {
        let phase = (2 * k + 1) as f64 * theta;
        let a_k = phase.sin() / (m as f64).sqrt();
        let b_k = if m == n {
            0.0
        } else {
            phase.cos() / ((n - m) as f64).sqrt()
        };
        Self {
            n,
            m,
            theta,
            k,
            a_k,
            b_k,
        }
    }

    /// Total probability on the marked set, `sin²((2k+1)θ)`.
    pub fn good_probability(&self) -> f64 {
        ((2 * self.k + 1) as f64 * self.theta).sin().powi(2)
    }

    /// `M a_k² + (N-M) b_k²`; one up to rounding.
    pub fn total_probability(&self) -> f64 {
        self.m as f64 * self.a_k * self.a_k + (self.n - self.m) as f64 * self.b_k * self.b_k
    }

    /// `tan²θ · sin²(2kθ)`, written as `M/(N-M) · sin²(2kθ)` so `M = N` stays
    /// finite whenever `k = 0`.
    pub fn resonant_gain(&self) -> f64 {
        let s = (2.0 * self.k as f64 * self.theta).sin();
        if s == 0.0 {
            return 0.0;
        }
        self.m as f64 / (self.n - self.m) as f64 * s * s
    }
}

/// `⌊π/4θ⌋`, snapping values within rounding of an integer.
///
/// `π/4θ` is an integer only at `M/N = 1/2`, where floating point can land a
/// hair below 1.
fn optimal_iterations(theta: f64) -> u64 {
    let x = PI / (4.0 * theta);
    let nearest = x.round();
    if (x - nearest).abs() < 1e-9 {
        nearest as u64
    } else {
        x.floor() as u64
    }
}

/// One Grover iteration: sign flip on the marked set, inversion about the mean.
pub fn grover_iterate(state: &StateVector, marked: &(impl MarkedSet + ?Sized)) -> StateVector {
    let mut next = state.clone();
    next.grover_step(marked);
    next
}
