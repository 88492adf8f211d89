//! Brute-force statevector simulation over `Z_N`.
//!
//! `N` is any integer `≥ 1`; the quantum Fourier transform is realized as the
//! order-`N` DFT with `ω = e^{-2πi/N}`. Nothing here is decomposed into qubit
//! gates. Full-spectrum work is sized for `N ≤ 2^16` ([`SOFT_N_LIMIT`]).

mod dft;
mod grover;
mod qhs;
mod state;
mod table;
mod unitary;

pub use dft::{dft, dft_direct, Convention, DftPlan};
pub use grover::{grover_iterate, GroverSchedule};
pub use qhs::{qhs_distribution, qhs_probabilities, QhsState};
pub use state::{uniform_state, StateVector};
pub use table::{format_probability, sample, ProbabilityTable, Source, TableEntry, CLAMP_TOLERANCE, CSV_SCHEMA_LINE};
pub use unitary::{check_unitary, general_unitary_state, DenseUnitary, Unitary, UNITARITY_TOLERANCE};

use num_complex::Complex64;

use crate::oracle::MarkedSet;

/// Default ceiling on `N` for full-spectrum operations. Exceeding it is
/// allowed; front ends should warn.
pub const SOFT_N_LIMIT: u64 = 1 << 16;

/// `|ψ_k⟩`: the uniform state after `iterations` Grover steps.
pub fn amplified_state(marked: &(impl MarkedSet + ?Sized), iterations: u64) -> StateVector {
    let mut state = uniform_state(marked.label_count() as usize);
    for _ in 0..iterations {
        state.grover_step(marked);
    }
    state
}

/// The state after a single phase-oracle call on the uniform superposition,
/// `N^{-1/2} [(-2) Σ_{z∈A} |z⟩ + Σ_z |z⟩]`, with the ancilla dropped.
pub fn phase_marked_state(marked: &(impl MarkedSet + ?Sized)) -> StateVector {
    let n = marked.label_count() as usize;
    let amp = 1.0 / (n as f64).sqrt();
    StateVector::from_amplitudes(
        (0..n as u64)
            .map(|z| {
                if marked.contains(z) {
                    Complex64::new(-amp, 0.0)
                } else {
                    Complex64::new(amp, 0.0)
                }
            })
            .collect(),
    )
}

/// Amplified-QFT final state using the schedule's `k = ⌊π/4θ⌋`.
pub fn amplified_qft_state(marked: &(impl MarkedSet + ?Sized)) -> StateVector {
    let schedule = GroverSchedule::new(marked.label_count(), marked.marked_count())
        .expect("marked sets are non-empty");
    amplified_qft_state_with(marked, schedule.k)
}

/// Amplified-QFT final state with an explicit iteration count.
pub fn amplified_qft_state_with(marked: &(impl MarkedSet + ?Sized), iterations: u64) -> StateVector {
    dft(&amplified_state(marked, iterations), Convention::Forward)
}

/// QFT-algorithm final state.
pub fn qft_state(marked: &(impl MarkedSet + ?Sized)) -> StateVector {
    dft(&phase_marked_state(marked), Convention::Forward)
}
