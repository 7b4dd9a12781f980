//! Statevector simulation and spectral analysis of post-selected
//! non-Hermitian qubit dynamics.
//!
//! A single system qubit is rotated, entangled with an ancilla by a
//! controlled rotation, and kept only when the ancilla reads `0`. The kept
//! branch follows an effective non-Hermitian Hamiltonian with an exceptional
//! point at `Gamma = theta`; the modules here run the circuit (exactly or by
//! sampling), build and exponentiate the effective Hamiltonians, and compute
//! their spectra and `<sigma_z>` predictions.

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod pauli;
pub mod rng;
pub mod spectral;
pub mod statevector;

pub use engine::{
    effective_hamiltonian, estimate_p0, evolve_effective, multiqubit_effective_hamiltonian,
    run_cycle_deterministic, run_deterministic, run_sampled, EffectiveHamiltonian, P0Estimate,
    TrajectoryRecord, UnitSpec,
};
pub use error::{Error, Result};
pub use experiments::{
    execute, run_experiment, ExperimentConfig, ExperimentKind, ExperimentResult, Mode,
};
pub use linalg::{eigenvalues_dense, expm, CMatrix};
pub use num_complex::Complex64;
pub use rng::RngStream;
pub use spectral::{
    eigensystem_2level, find_ep, mz_oscillation, stationary_mz, two_qubit_eigenenergies,
    InitialState, MixedEstimator, Regime, SpectrumResult, TwoQubitModelSpec,
};
pub use statevector::{GateSpec, StateVector};
