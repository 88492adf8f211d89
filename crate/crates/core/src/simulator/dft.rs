use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::state::StateVector;

/// Sign of the transform exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `ω = e^{-2πi/N}`.
    #[default]
    Forward,
    /// `ω = e^{+2πi/N}`; conjugates the spectrum.
    Inverse,
}

thread_local! {
    // rustfft memoizes plans per length
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// A reusable unitary DFT of fixed order, backed by an FFT.
#[derive(Clone)]
pub struct DftPlan {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for DftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftPlan").field("n", &self.n).finish()
    }
}

impl DftPlan {
    pub fn new(n: usize, convention: Convention) -> Self {
        assert!(n >= 1, "transform order must be positive");
        let fft = PLANNER.with_borrow_mut(|planner| match convention {
            Convention::Forward => planner.plan_fft_forward(n),
            Convention::Inverse => planner.plan_fft_inverse(n),
        });
        Self {
            n,
            fft,
            scale: 1.0 / (n as f64).sqrt(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `out(y) = N^{-1/2} Σ_z ω^{zy} in(z)`, in place.
    pub fn apply(&self, buffer: &mut [Complex64]) {
        assert_eq!(buffer.len(), self.n, "buffer length differs from plan order");
        self.fft.process(buffer);
        for x in buffer.iter_mut() {
            *x *= self.scale;
        }
    }
}

/// Unitary DFT of a state (fast path).
pub fn dft(state: &StateVector, convention: Convention) -> StateVector {
    let mut amplitudes = state.amplitudes().to_vec();
    DftPlan::new(amplitudes.len(), convention).apply(&mut amplitudes);
    StateVector::from_amplitudes(amplitudes)
}

/// Unitary DFT by direct `O(N²)` summation: the reference path.
///
/// Twiddles are indexed by `zy mod N` from a table of exact roots so the error
/// does not grow with `y`.
pub fn dft_direct(state: &StateVector, convention: Convention) -> StateVector {
    let n = state.len();
    let sign = match convention {
        Convention::Forward => -1.0,
        Convention::Inverse => 1.0,
    };
    let roots: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, sign * 2.0 * PI * j as f64 / n as f64))
        .collect();
    let scale = 1.0 / (n as f64).sqrt();
    let input = state.amplitudes();
    let out = (0..n)
        .map(|y| {
            let sum: Complex64 = input
                .iter()
                .enumerate()
                .map(|(z, a)| roots[(z * y) % n] * a)
                .sum();
            sum * scale
        })
        .collect();
    StateVector::from_amplitudes(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::state::uniform_state;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
        let raw: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        StateVector::from_amplitudes(raw.into_iter().map(|a| a / norm).collect())
    }

    #[test]
    fn constant_and_delta() {
        for n in [1usize, 2, 7, 16, 60] {
            let spike = dft(&uniform_state(n), Convention::Forward);
            assert!((spike.amplitudes()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(spike.amplitudes()[1..].iter().all(|a| a.norm() < 1e-12));

            let flat = dft(&StateVector::basis(n, 0), Convention::Forward);
            assert!(flat.max_abs_diff(&uniform_state(n)) < 1e-12);
        }
    }

    #[test]
    fn sign_convention() {
        // |1⟩ → N^{-1/2} Σ_y e^{-2πiy/N} |y⟩
        let n = 8;
        let out = dft(&StateVector::basis(n, 1), Convention::Forward);
        let expected = Complex64::from_polar(1.0 / (n as f64).sqrt(), -2.0 * PI / n as f64);
        assert!((out.amplitudes()[1] - expected).norm() < 1e-15);
        let inv = dft(&StateVector::basis(n, 1), Convention::Inverse);
        assert!((inv.amplitudes()[1] - expected.conj()).norm() < 1e-15);
    }

    #[test]
    fn fast_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=130usize {
            let state = random_state(n, &mut rng);
            for convention in [Convention::Forward, Convention::Inverse] {
                let fast = dft(&state, convention);
                let slow = dft_direct(&state, convention);
                assert!(fast.max_abs_diff(&slow) < 1e-9, "n = {n}");
            }
        }
    }

    #[test]
    fn unitarity_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [8usize, 16, 60, 128, 255] {
            let plan = DftPlan::new(n, Convention::Forward);
            for _ in 0..100 {
                let state = random_state(n, &mut rng);
                let mut buffer = state.amplitudes().to_vec();
                plan.apply(&mut buffer);
                let norm: f64 = buffer.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-9);
            }
        }
    }
}
