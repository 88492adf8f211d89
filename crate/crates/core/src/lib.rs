//! Exact classical simulation of the Amplified Quantum Fourier Transform on the
//! local period problem.
//!
//! An instance marks the arithmetic progression `A = {s + rP : r < M}` inside
//! the label space `0..N`. Three measurement procedures are compared:
//!
//! * **Amplified-QFT**: `k = ⌊π/4θ⌋` Grover iterations (`sin θ = √(M/N)`)
//!   followed by the order-`N` discrete Fourier transform.
//! * **QFT**: one phase-oracle call followed by the transform.
//! * **QHS**: the oracle value written into a second register, transform on the
//!   first.
//!
//! Every closed-form probability in [`closedform`] is cross-checked against the
//! brute-force statevectors of [`simulator`]. [`recovery`] turns a measured `y`
//! into a period candidate with continued fractions, [`offset`] verifies
//! candidates and recovers the offset `s`, and [`analysis`] compares work
//! factors.
//!
//! ```
//! use lpq::{closedform, oracle::OracleSpec, simulator};
//!
//! let spec = OracleSpec::strict(16, 3, 4, 1).unwrap();
//! let simulated = simulator::qft_state(&spec).probabilities();
//! let exact = closedform::qft_pr(0, &spec);
//! assert!((simulated[0] - exact).abs() < 1e-12);
//! assert_eq!(exact, 0.390625);
//! ```

pub mod analysis;
pub mod closedform;
pub mod error;
pub mod offset;
pub mod oracle;
pub mod recovery;
pub mod simulator;

pub use closedform::{Algorithm, SpectrumCase};
pub use error::{Error, Result};
pub use oracle::{OracleHandle, OracleSpec};
