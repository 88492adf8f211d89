use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::oracle::MarkedSet;

/// Length-`N` complex amplitudes of a single-register state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// Basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Measurement probabilities `|amp(z)|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// One Grover iteration in place: phase flip on the marked set, then
    /// inversion about the mean of all amplitudes.
    pub fn grover_step(&mut self, marked: &(impl MarkedSet + ?Sized)) {
        for (z, amp) in self.amplitudes.iter_mut().enumerate() {
            if marked.contains(z as u64) {
                *amp = -*amp;
            }
        }
        let n = self.amplitudes.len() as f64;
        let mean: Complex64 = self.amplitudes.iter().sum::<Complex64>() / n;
        let twice_mean = mean * 2.0;
        for amp in &mut self.amplitudes {
            *amp = twice_mean - *amp;
        }
    }

    /// Largest elementwise distance to another state of the same length.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        assert_eq!(self.len(), other.len());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `H|0⟩`: every amplitude `1/√N`.
pub fn uniform_state(n: usize) -> StateVector {
    assert!(n >= 1, "uniform state needs at least one label");
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    StateVector {
        amplitudes: vec![amp; n],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_amplitudes() {
        let four = uniform_state(4);
        assert!(four.amplitudes().iter().all(|a| *a == Complex64::new(0.5, 0.0)));
        assert_eq!(uniform_state(1).amplitudes(), &[Complex64::new(1.0, 0.0)]);
        let sixteen = uniform_state(16);
        assert!(sixteen.amplitudes().iter().all(|a| *a == Complex64::new(0.25, 0.0)));
        assert!((sixteen.norm() - 1.0).abs() < 1e-15);
    }
}
