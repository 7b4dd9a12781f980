//! The post-selected non-Hermitian cycle and its effective Hamiltonian.
//!
//! One cycle acts on a single system qubit (qubit 0) and one ancilla
//! (qubit 1): `R_x(theta)` on the system, `CR_x(phi)` from system to
//! ancilla, then a Z measurement of the ancilla that is kept only when it
//! reads `0`. The ancilla is left in `|0>` by a successful post-selection and
//! is reused for the next cycle.
//!
//! For small `phi` the kept branch evolves under
//! `H_eff = theta/2 sigma_x + i Gamma/2 (sigma_z - 1)` with
//! `Gamma = phi^2 / 8`, one cycle per unit of time.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, expm, CMatrix};
use crate::rng::RngStream;
use crate::statevector::{GateSpec, StateVector};

/// `phi` above this makes the small-angle expansion unreliable.
pub const SMALL_ANGLE_LIMIT: f64 = 0.5;

pub const DEFAULT_MAX_ATTEMPTS: u64 = 1_000_000;

pub const SYSTEM: usize = 0;
pub const ANCILLA: usize = 1;

/// Parameters of one non-Hermitian cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitSpec {
    theta: f64,
    phi: f64,
}

impl UnitSpec {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Argument("theta and phi must be finite".into()));
        }
        if phi < 0.0 {
            return Err(Error::Argument(format!("phi must be >= 0, got {phi}")));
        }
        if phi > SMALL_ANGLE_LIMIT {
            log::warn!("phi = {phi} exceeds {SMALL_ANGLE_LIMIT}; H_eff approximation degrades");
        }
        Ok(Self { theta, phi })
    }

    /// Unit whose controlled angle gives decay rate `gamma` (`phi = sqrt(8 gamma)`).
    pub fn from_gamma(theta: f64, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(Error::Argument(format!("gamma must be >= 0, got {gamma}")));
        }
        Self::new(theta, (8.0 * gamma).sqrt())
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn gamma(&self) -> f64 {
        self.phi * self.phi / 8.0
    }

    pub fn is_small_angle(&self) -> bool {
        self.phi <= SMALL_ANGLE_LIMIT
    }

    /// Splits the cycle into `n` finer cycles: `theta / n` and `Gamma / n`
    /// (so `phi / sqrt(n)`), keeping `Gamma / theta` fixed.
    pub fn zeno_rescaled(&self, n: u32) -> Self {
        let n = f64::from(n.max(1));
        Self {
            theta: self.theta / n,
            phi: self.phi / n.sqrt(),
        }
    }

    fn gates(&self) -> [GateSpec; 2] {
        [
            GateSpec::rx(SYSTEM, self.theta),
            GateSpec::crx(SYSTEM, ANCILLA, self.phi),
        ]
    }
}

/// Dense effective Hamiltonian on `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveHamiltonian {
    num_qubits: usize,
    matrix: CMatrix,
}

impl EffectiveHamiltonian {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if dim < 2 || !dim.is_power_of_two() || matrix.ncols() != dim {
            return Err(Error::Argument(format!(
                "Hamiltonian must be square with power-of-two dimension, got {}x{}",
                dim,
                matrix.ncols()
            )));
        }
        Ok(Self {
            num_qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        expm(&(&self.matrix * Complex64::new(0.0, -t)))
    }

    /// Largest eigenvalue of the Hermitian matrix `(H - H^dagger) / 2i`.
    /// Decay-only dynamics keep this `<= 0`.
    pub fn max_growth_rate(&self) -> Result<f64> {
        let anti = (&self.matrix - self.matrix.adjoint()) * Complex64::new(0.0, -0.5);
        let ev = linalg::eigenvalues_dense(&anti)?;
        Ok(ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Outcome of running cycles from one initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub cycles_completed: usize,
    /// Attempts used, counting the successful one (always 1 in deterministic mode).
    pub attempts: u64,
    pub cumulative_success_probability: f64,
    pub per_cycle_p0: Vec<f64>,
    pub final_state: StateVector,
}

fn check_system(state: &StateVector) -> Result<()> {
    if state.num_qubits() != 1 {
        return Err(Error::Argument(format!(
            "the cycle acts on a single system qubit, got {}",
            state.num_qubits()
        )));
    }
    Ok(())
}

/// System qubit plus a reusable ancilla, stepped one cycle at a time.
pub struct CircuitRunner {
    state: StateVector,
    gates: [GateSpec; 2],
    cycles: usize,
    cumulative: f64,
}

impl CircuitRunner {
    pub fn new(system: &StateVector, unit: &UnitSpec) -> Result<Self> {
        check_system(system)?;
        let mut state = system.with_ancilla();
        state.renormalize()?;
        Ok(Self {
            state,
            gates: unit.gates(),
            cycles: 0,
            cumulative: 1.0,
        })
    }

    fn entangle(&mut self) -> Result<()> {
        for g in &self.gates {
            self.state.apply(g)?;
        }
        Ok(())
    }

    /// One cycle post-selected on ancilla `0`; returns that outcome's probability.
    pub fn step_postselected(&mut self) -> Result<f64> {
        self.entangle()?;
        let p0 = self.state.collapse(ANCILLA, 0)?;
        self.cycles += 1;
        self.cumulative *= p0;
        Ok(p0)
    }

    /// One cycle with a sampled ancilla readout. Returns `Some(p0)` when the
    /// ancilla reads 0; on `None` the register holds the rejected branch and
    /// must be discarded.
    pub fn step_sampled(&mut self, rng: &mut RngStream) -> Result<Option<f64>> {
        self.entangle()?;
        let p0 = self.state.probability(ANCILLA, 0)?;
        match self.state.measure_in_place(ANCILLA, rng)? {
            0 => {
                self.cycles += 1;
                self.cumulative *= p0;
                Ok(Some(p0))
            }
            _ => Ok(None),
        }
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    /// Product of the per-cycle success probabilities so far.
    pub fn cumulative_success_probability(&self) -> f64 {
        self.cumulative
    }

    /// `<sigma_z>` of the (normalized) system qubit.
    pub fn sigma_z(&self) -> Result<f64> {
        self.state.expectation_sigma_z(SYSTEM)
    }

    pub fn system(&self) -> Result<StateVector> {
        self.state.without_ancilla()
    }
}

/// One cycle with the ancilla post-selected on `|0>`. Returns the
/// renormalized system state and the success probability
/// `p0 = 1 - |beta|^2 sin^2(phi/2)`.
pub fn run_cycle_deterministic(state: &StateVector, unit: &UnitSpec) -> Result<(StateVector, f64)> {
    let mut reg = CircuitRunner::new(state, unit)?;
    let p0 = reg.step_postselected()?;
    Ok((reg.system()?, p0))
}

/// `n_cycles` post-selected cycles.
pub fn run_deterministic(
    initial: &StateVector,
    unit: &UnitSpec,
    n_cycles: usize,
) -> Result<TrajectoryRecord> {
    let mut reg = CircuitRunner::new(initial, unit)?;
    let mut per_cycle_p0 = Vec::with_capacity(n_cycles);
    let mut cumulative = 1.0;
    for _ in 0..n_cycles {
        let p0 = reg.step_postselected()?;
        cumulative *= p0;
        per_cycle_p0.push(p0);
    }
    Ok(TrajectoryRecord {
        cycles_completed: n_cycles,
        attempts: 1,
        cumulative_success_probability: cumulative,
        per_cycle_p0,
        final_state: reg.system()?,
    })
}

/// Result of a single sampled attempt.
#[derive(Clone, Debug, PartialEq)]
pub enum Attempt {
    Success(TrajectoryRecord),
    /// The ancilla read `1` on this (zero-based) cycle.
    FailedAt(usize),
}

/// One stochastic attempt at `n_cycles` successes in a row.
pub fn attempt_sampled(
    initial: &StateVector,
    unit: &UnitSpec,
    n_cycles: usize,
    rng: &mut RngStream,
) -> Result<Attempt> {
    let mut reg = CircuitRunner::new(initial, unit)?;
    let mut per_cycle_p0 = Vec::with_capacity(n_cycles);
    let mut cumulative = 1.0;
    for k in 0..n_cycles {
        match reg.step_sampled(rng)? {
            Some(p0) => {
                cumulative *= p0;
                per_cycle_p0.push(p0);
            }
            None => return Ok(Attempt::FailedAt(k)),
        }
    }
    Ok(Attempt::Success(TrajectoryRecord {
        cycles_completed: n_cycles,
        attempts: 1,
        cumulative_success_probability: cumulative,
        per_cycle_p0,
        final_state: reg.system()?,
    }))
}

/// Repeat-until-success: restarts from `initial` after every failed
/// attempt until `n_cycles` successes in a row, or fails after
/// `max_attempts` attempts.
pub fn run_sampled(
    initial: &StateVector,
    unit: &UnitSpec,
    n_cycles: usize,
    rng: &mut RngStream,
    max_attempts: u64,
) -> Result<TrajectoryRecord> {
    for attempt in 1..=max_attempts {
        if let Attempt::Success(mut record) = attempt_sampled(initial, unit, n_cycles, rng)? {
            record.attempts = attempt;
            return Ok(record);
        }
    }
    Err(Error::Exhausted {
        n: n_cycles,
        attempts: max_attempts,
    })
}

/// Across-trial statistics of a sampled `P0` estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct P0Estimate {
    pub mean: f64,
    pub std: f64,
    pub attempts: u64,
}

/// Sampled estimate of `|<0|psi(n)>|^2`: each of `trials` trials runs
/// `shots` successful trajectories, measures the system qubit, and records
/// the fraction of zeros. Trial `k` draws from `rng.derive(k)`.
pub fn estimate_p0(
    initial: &StateVector,
    unit: &UnitSpec,
    n_cycles: usize,
    shots: usize,
    trials: usize,
    rng: &RngStream,
) -> Result<P0Estimate> {
    if shots < 1 || trials < 2 {
        return Err(Error::Argument(format!(
            "need shots >= 1 and trials >= 2, got shots={shots}, trials={trials}"
        )));
    }
    let mut estimates = Vec::with_capacity(trials);
    let mut attempts = 0;
    for trial in 0..trials {
        let mut trial_rng = rng.derive(trial as u64);
        let mut zeros = 0usize;
        for _ in 0..shots {
            let record = run_sampled(
                initial,
                unit,
                n_cycles,
                &mut trial_rng,
                DEFAULT_MAX_ATTEMPTS,
            )?;
            attempts += record.attempts;
            let (outcome, _) = record.final_state.measure(SYSTEM, &mut trial_rng)?;
            if outcome == 0 {
                zeros += 1;
            }
        }
        estimates.push(zeros as f64 / shots as f64);
    }
    let (mean, std) = mean_std(&estimates);
    Ok(P0Estimate {
        mean,
        std,
        attempts,
    })
}

/// Mean and sample standard deviation (`n - 1` denominator).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `[[0, theta/2], [theta/2, -i Gamma]]`.
pub fn effective_hamiltonian(unit: &UnitSpec) -> EffectiveHamiltonian {
    two_level_hamiltonian(unit.theta(), unit.gamma())
}

pub fn two_level_hamiltonian(theta: f64, gamma: f64) -> EffectiveHamiltonian {
    let half = Complex64::new(theta / 2.0, 0.0);
    let matrix = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            half,
            half,
            Complex64::new(0.0, -gamma),
        ],
    );
    EffectiveHamiltonian {
        num_qubits: 1,
        matrix,
    }
}

/// `H + i Gamma/2 sum_i (sigma_z^i - 1)`: adds `-i Gamma * popcount(k)` to
/// each diagonal entry `k`.
pub fn multiqubit_effective_hamiltonian(
    h_hermitian: &CMatrix,
    gamma: f64,
    num_qubits: usize,
) -> Result<EffectiveHamiltonian> {
    let dim = 1usize << num_qubits;
    if h_hermitian.nrows() != dim || h_hermitian.ncols() != dim {
        return Err(Error::Validation(format!(
            "expected a {dim}x{dim} matrix for {num_qubits} qubit(s), got {}x{}",
            h_hermitian.nrows(),
            h_hermitian.ncols()
        )));
    }
    let herr = linalg::hermiticity_error(h_hermitian);
    if herr > 1e-10 {
        return Err(Error::Validation(format!(
            "input is not Hermitian (max |H - H^dagger| = {herr:e})"
        )));
    }
    let mut matrix = h_hermitian.clone();
    for k in 0..dim {
        matrix[(k, k)] -= Complex64::new(0.0, gamma * k.count_ones() as f64);
    }
    EffectiveHamiltonian::from_matrix(matrix)
}

/// `exp(-i H t) |initial>` and its squared norm (the survival probability).
/// The evolved state is left unnormalized.
pub fn evolve_effective(
    h: &EffectiveHamiltonian,
    initial: &StateVector,
    t: f64,
) -> Result<(StateVector, f64)> {
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("t must be >= 0, got {t}")));
    }
    if initial.dim() != h.dim() {
        return Err(Error::Argument(format!(
            "state dimension {} does not match Hamiltonian dimension {}",
            initial.dim(),
            h.dim()
        )));
    }
    let u = h.propagator(t);
    let evolved = StateVector::from_amplitudes(linalg::mat_vec(&u, initial.amplitudes()))?;
    let survival = evolved.norm_sqr();
    Ok((evolved, survival))
}

/// Distance between one circuit cycle's kept (unnormalized) branch and one
/// step of `exp(-i H_eff)`, both applied to the normalized `state`.
pub fn cycle_deviation(state: &StateVector, unit: &UnitSpec) -> Result<f64> {
    let psi = state.renormalized()?;
    let (mut kept, p0) = run_cycle_deterministic(&psi, unit)?;
    kept.scale(p0.sqrt());
    let (reference, _) = evolve_effective(&effective_hamiltonian(unit), &psi, 1.0)?;
    Ok(kept.distance(&reference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn zero() -> StateVector {
        StateVector::new_basis_state(1, 0).unwrap()
    }

    fn one() -> StateVector {
        StateVector::new_basis_state(1, 1).unwrap()
    }

    #[test]
    fn gamma_is_phi_squared_over_eight() {
        let u = UnitSpec::new(0.1, 0.1).unwrap();
        assert_abs_diff_eq!(u.gamma(), 0.00125, epsilon = 1e-18);
        assert!(u.is_small_angle());
        assert!(!UnitSpec::new(0.1, 0.6).unwrap().is_small_angle());
        assert!(UnitSpec::new(0.1, -0.1).is_err());
        let g = UnitSpec::from_gamma(0.3, 0.02).unwrap();
        assert_abs_diff_eq!(g.gamma(), 0.02, epsilon = 1e-15);
    }

    #[test]
    fn zero_state_is_invariant_without_rotation() {
        let u = UnitSpec::new(0.0, 0.3).unwrap();
        let (s, p0) = run_cycle_deterministic(&zero(), &u).unwrap();
        assert_eq!(p0, 1.0);
        assert_eq!(s, zero());
    }

    #[test]
    fn one_state_success_probability() {
        // 1 - sin^2(0.05) = 0.99750208...
        let u = UnitSpec::new(0.0, 0.1).unwrap();
        let (s, p0) = run_cycle_deterministic(&one(), &u).unwrap();
        assert_abs_diff_eq!(p0, 1.0 - 0.05f64.sin().powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(p0, 0.997_502_1, epsilon = 1e-7);
        assert_abs_diff_eq!(s.amplitude(1).norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn balanced_state_success_probability() {
        let u = UnitSpec::new(0.0, 0.1).unwrap();
        let (_, p0) = run_cycle_deterministic(&StateVector::plus(), &u).unwrap();
        assert!((p0 - 0.999).abs() < 5e-4);
    }

    #[test]
    fn only_single_system_qubit() {
        let u = UnitSpec::new(0.1, 0.1).unwrap();
        let two = StateVector::new_basis_state(2, 0).unwrap();
        assert!(run_cycle_deterministic(&two, &u).is_err());
    }

    #[test]
    fn zero_cycles() {
        let u = UnitSpec::new(0.1, 0.1).unwrap();
        let r = run_deterministic(&StateVector::plus(), &u, 0).unwrap();
        assert_eq!(r.cumulative_success_probability, 1.0);
        assert_eq!(r.final_state, StateVector::plus());
        assert!(r.per_cycle_p0.is_empty());
    }

    #[test]
    fn cumulative_is_product_and_nonincreasing() {
        let u = UnitSpec::new(0.1, 0.1).unwrap();
        let r = run_deterministic(&zero(), &u, 200).unwrap();
        let prod: f64 = r.per_cycle_p0.iter().product();
        assert_abs_diff_eq!(r.cumulative_success_probability, prod, epsilon = 1e-12);
        let mut running = 1.0;
        for p in &r.per_cycle_p0 {
            assert!(*p <= 1.0);
            let next = running * p;
            assert!(next <= running);
            running = next;
        }
        assert_abs_diff_eq!(r.final_state.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cumulative_matches_heff_survival_without_rotation() {
        // theta = 0: the |1> amplitude shrinks by cos(phi/2) each cycle
        let u = UnitSpec::new(0.0, 0.1).unwrap();
        let n = 5000;
        let r = run_deterministic(&StateVector::plus(), &u, n).unwrap();
        let exact = 0.5 + 0.5 * (0.05f64).cos().powi(2 * n as i32);
        assert_abs_diff_eq!(r.cumulative_success_probability, exact, epsilon = 1e-12);
        assert!(r.cumulative_success_probability > 0.0067);
    }

    #[test]
    fn sampled_trivial_unit() {
        let u = UnitSpec::new(0.0, 0.0).unwrap();
        let mut rng = RngStream::from_seed(1);
        let r = run_sampled(&StateVector::plus(), &u, 50, &mut rng, 10).unwrap();
        assert_eq!(r.attempts, 1);
        assert_eq!(r.final_state, StateVector::plus());
    }

    #[test]
    fn sampled_is_reproducible() {
        let u = UnitSpec::new(0.1, 0.3).unwrap();
        let run = |seed| {
            let mut rng = RngStream::from_seed(seed);
            run_sampled(&StateVector::plus(), &u, 40, &mut rng, 1000).unwrap()
        };
        assert_eq!(run(5), run(5));
    }

    #[test]
    fn sampled_exhaustion() {
        // phi = pi: ancilla flips with certainty from |1>
        let u = UnitSpec::new(0.0, std::f64::consts::PI).unwrap();
        let mut rng = RngStream::from_seed(3);
        let err = run_sampled(&one(), &u, 3, &mut rng, 7).unwrap_err();
        assert!(matches!(err, Error::Exhausted { n: 3, attempts: 7 }));
    }

    #[test]
    fn failed_attempt_reports_cycle() {
        let u = UnitSpec::new(0.0, std::f64::consts::PI).unwrap();
        let mut rng = RngStream::from_seed(3);
        let a = attempt_sampled(&one(), &u, 3, &mut rng).unwrap();
        assert_eq!(a, Attempt::FailedAt(0));
    }

    #[test]
    fn estimate_p0_trivial() {
        let u = UnitSpec::new(0.0, 0.1).unwrap();
        let e = estimate_p0(&zero(), &u, 30, 20, 3, &RngStream::from_seed(0)).unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std, 0.0);
        assert!(estimate_p0(&zero(), &u, 30, 20, 1, &RngStream::from_seed(0)).is_err());
    }

    #[test]
    fn effective_hamiltonian_entries() {
        let h = effective_hamiltonian(&UnitSpec::new(0.0, 0.0).unwrap());
        assert!(h.matrix().iter().all(|z| *z == Complex64::new(0.0, 0.0)));

        let h = two_level_hamiltonian(1.0, 0.0);
        assert_eq!(h.matrix()[(0, 1)], Complex64::new(0.5, 0.0));
        assert_eq!(h.matrix()[(1, 0)], Complex64::new(0.5, 0.0));
        assert_eq!(h.matrix()[(1, 1)], Complex64::new(0.0, 0.0));

        let h = effective_hamiltonian(&UnitSpec::new(0.1, 0.1).unwrap());
        assert_eq!(h.matrix()[(0, 0)], Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(h.matrix()[(0, 1)].re, 0.05, epsilon = 1e-18);
        assert_abs_diff_eq!(h.matrix()[(1, 1)].im, -0.00125, epsilon = 1e-18);
        assert!(h.max_growth_rate().unwrap() <= 1e-12);
    }

    #[test]
    fn multiqubit_decay_diagonal() {
        let h = multiqubit_effective_hamiltonian(&CMatrix::zeros(4, 4), 1.0, 2).unwrap();
        let diag: Vec<Complex64> = (0..4).map(|k| h.matrix()[(k, k)]).collect();
        assert_eq!(
            diag,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, -2.0)
            ]
        );
        assert!(h.max_growth_rate().unwrap() <= 1e-12);
    }

    #[test]
    fn multiqubit_reduces_to_single_qubit() {
        let theta = 0.37;
        let gamma = 0.11;
        let sx = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(theta / 2.0, 0.0),
                Complex64::new(theta / 2.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let h = multiqubit_effective_hamiltonian(&sx, gamma, 1).unwrap();
        assert_eq!(h, two_level_hamiltonian(theta, gamma));
    }

    #[test]
    fn multiqubit_rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            multiqubit_effective_hamiltonian(&m, 1.0, 1),
            Err(Error::Validation(_))
        ));
        assert!(multiqubit_effective_hamiltonian(&CMatrix::zeros(2, 2), 1.0, 2).is_err());
    }

    #[test]
    fn evolve_identity_at_zero_time() {
        let h = two_level_hamiltonian(0.4, 0.2);
        let (s, surv) = evolve_effective(&h, &StateVector::plus(), 0.0).unwrap();
        assert_abs_diff_eq!(surv, 1.0, epsilon = 1e-15);
        assert!(s.distance(&StateVector::plus()) < 1e-15);
        assert!(evolve_effective(&h, &StateVector::plus(), -1.0).is_err());
    }

    #[test]
    fn evolve_pure_decay() {
        let gamma = 0.3;
        let h = two_level_hamiltonian(0.0, gamma);
        for t in [0.5, 3.0, 40.0] {
            let (s, surv) = evolve_effective(&h, &one(), t).unwrap();
            let expected = (-gamma * t).exp();
            assert!((s.amplitude(1).re - expected).abs() < 1e-13 * expected.max(1e-3));
            assert!((surv - (-2.0 * gamma * t).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn evolve_unitary_when_gamma_zero() {
        let h = two_level_hamiltonian(0.9, 0.0);
        for t in [1.0, 17.0, 250.0] {
            let (_, surv) = evolve_effective(&h, &StateVector::plus(), t).unwrap();
            assert_abs_diff_eq!(surv, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zeno_rescale_keeps_ratio() {
        let u = UnitSpec::new(0.1, 0.1).unwrap();
        for n in [1, 2, 4, 8, 64] {
            let z = u.zeno_rescaled(n);
            assert_abs_diff_eq!(
                z.gamma() / z.theta(),
                u.gamma() / u.theta(),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(z.gamma(), u.gamma() / n as f64, epsilon = 1e-15);
        }
    }
}
