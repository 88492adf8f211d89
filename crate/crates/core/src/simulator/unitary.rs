use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dft::DftPlan;
use super::grover::GroverSchedule;
use super::state::StateVector;
use super::{amplified_state, phase_marked_state};
use crate::error::{Error, Result};
use crate::oracle::MarkedSet;

/// Tolerance of the unitarity spot check.
pub const UNITARITY_TOLERANCE: f64 = 1e-8;

/// A final transform `|z⟩ → N^{-1/2} Σ_y α(y, z) |y⟩` that may replace the DFT.
pub trait Unitary {
    fn dim(&self) -> usize;

    fn apply(&self, input: &[Complex64]) -> Vec<Complex64>;
}

impl Unitary for DftPlan {
    fn dim(&self) -> usize {
        self.len()
    }

    fn apply(&self, input: &[Complex64]) -> Vec<Complex64> {
        let mut buffer = input.to_vec();
        DftPlan::apply(self, &mut buffer);
        buffer
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    n: usize,
    entries: Vec<Complex64>,
}

impl DenseUnitary {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Self { n, entries }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    /// A random unitary whose row `probe` sums to zero.
    ///
    /// Gram–Schmidt starts from the normalized all-ones vector, so every other
    /// basis vector is orthogonal to it; the all-ones row is parked at
    /// `probe + 1` and row `probe` gets the first random direction.
    pub fn random_deflated(n: usize, probe: usize, seed: u64) -> Self {
        assert!(n >= 2 && probe < n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        basis.push(vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]);
        while basis.len() < n {
            let mut v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            // two passes of modified Gram–Schmidt
            for _ in 0..2 {
                for b in &basis {
                    let overlap: Complex64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= overlap * bi;
                    }
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue;
            }
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }

        let ones_row = (probe + 1) % n;
        let mut order = Vec::with_capacity(n);
        let mut next = 2;
        for row in 0..n {
            if row == probe {
                order.push(1);
            } else if row == ones_row {
                order.push(0);
            } else {
                order.push(next);
                next += 1;
            }
        }
        let entries = order
            .into_iter()
            .flat_map(|j| basis[j].iter().map(|x| x.conj()).collect::<Vec<_>>())
            .collect();
        Self { n, entries }
    }
}

impl Unitary for DenseUnitary {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, input: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|row| self.row(row).iter().zip(input).map(|(u, x)| u * x).sum())
            .collect()
    }
}

/// Spot-checks that `u` preserves norms and inner products on random vectors.
pub fn check_unitary(u: &dyn Unitary) -> Result<()> {
    let n = u.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut random = || -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    };
    let v1 = random();
    let v2 = random();
    let i = Complex64::new(0.0, 1.0);
    // norms of v1, v2, v1 + v2, v1 + i v2 fix the inner product by polarization
    let probes = [
        v1.clone(),
        v2.clone(),
        v1.iter().zip(&v2).map(|(a, b)| a + b).collect(),
        v1.iter().zip(&v2).map(|(a, b)| a + i * b).collect::<Vec<_>>(),
    ];
    let mut defect: f64 = 0.0;
    for v in &probes {
        let before: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        let image = u.apply(v);
        if image.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: image.len(),
            });
        }
        let after: f64 = image.iter().map(|x| x.norm_sqr()).sum();
        defect = defect.max((after - before).abs() / before);
    }
    if defect > UNITARITY_TOLERANCE {
        return Err(Error::NotUnitary { defect });
    }
    Ok(())
}

/// Runs the QFT (or, with `amplified`, the Amplified-QFT) pipeline with the
/// final DFT replaced by `u`.
pub fn general_unitary_state(
    marked: &(impl MarkedSet + ?Sized),
    u: &dyn Unitary,
    amplified: bool,
) -> Result<StateVector> {
    let n = marked.label_count() as usize;
    if u.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: u.dim(),
        });
    }
    check_unitary(u)?;
    let prepared = if amplified {
        let schedule = GroverSchedule::new(marked.label_count(), marked.marked_count())?;
        amplified_state(marked, schedule.k)
    } else {
        phase_marked_state(marked)
    };
    Ok(StateVector::from_amplitudes(u.apply(prepared.amplitudes())))
}
