use num_complex::Complex64;

use super::dft::{Convention, DftPlan};
use super::table::{ProbabilityTable, Source};
use crate::oracle::{MarkedSet, OracleSpec};

/// Two-register state: first register `0..N`, second register the oracle bit.
#[derive(Debug, Clone, PartialEq)]
pub struct QhsState {
    amplitudes: Vec<[Complex64; 2]>,
}

impl QhsState {
    /// `N^{-1/2} Σ_x |x⟩|f(x)⟩`.
    pub fn prepare(marked: &(impl MarkedSet + ?Sized)) -> Self {
        let n = marked.label_count() as usize;
        let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let amplitudes = (0..n as u64)
            .map(|x| if marked.contains(x) { [zero, amp] } else { [amp, zero] })
            .collect();
        Self { amplitudes }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[[Complex64; 2]] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|pair| pair[0].norm_sqr() + pair[1].norm_sqr())
            .sum()
    }

    /// Applies the DFT to the first register.
    pub fn transform_first_register(&mut self, plan: &DftPlan) {
        for bit in 0..2 {
            let mut column: Vec<Complex64> = self.amplitudes.iter().map(|pair| pair[bit]).collect();
            plan.apply(&mut column);
            for (pair, value) in self.amplitudes.iter_mut().zip(column) {
                pair[bit] = value;
            }
        }
    }

    /// Probability of each first-register outcome, second register traced out.
    pub fn first_register_probabilities(&self) -> Vec<f64> {
        self.amplitudes
            .iter()
            .map(|pair| pair[0].norm_sqr() + pair[1].norm_sqr())
            .collect()
    }
}

/// QHS measurement probabilities by simulating the two-register state.
pub fn qhs_probabilities(marked: &(impl MarkedSet + ?Sized)) -> Vec<f64> {
    let mut state = QhsState::prepare(marked);
    let plan = DftPlan::new(state.len(), Convention::Forward);
    state.transform_first_register(&plan);
    state.first_register_probabilities()
}

/// `Pr(y) = (|Σ_{x∈A} ω^{xy}|² + |Σ_{x∉A} ω^{xy}|²) / N²`, simulated.
pub fn qhs_distribution(spec: &OracleSpec) -> ProbabilityTable {
    ProbabilityTable::from_probabilities(spec, &qhs_probabilities(spec), Source::Simulated)
}
