//! Dense statevector register and the small gate set used by the
//! non-Hermitian cycle.
//!
//! Basis indices are little-endian: qubit 0 is the least-significant bit of
//! the amplitude index, so `|q1 q0> = |10>` lives at index 2.
//!
//! Rotations follow `R_x(theta) = exp(-i theta sigma_x / 2)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::RngStream;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Probabilities at or below this are treated as impossible outcomes.
pub const IMPOSSIBLE_PROBABILITY: f64 = 1e-15;

/// Tolerance for the `U^dagger U = I` check on generic gates.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

const MAX_QUBITS: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|basis_index>` on `num_qubits` qubits.
    pub fn new_basis_state(num_qubits: usize, basis_index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Argument(format!(
                "num_qubits must be in 1..={MAX_QUBITS}, got {num_qubits}"
            )));
        }
        let dim = 1usize << num_qubits;
        if basis_index >= dim {
            return Err(Error::Argument(format!(
                "basis index {basis_index} out of range for {num_qubits} qubit(s)"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[basis_index] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes. The length must be a power of two (at least 2).
    /// The amplitudes are taken as-is; call [`renormalize`](Self::renormalize)
    /// if a unit-norm state is needed.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Argument(format!(
                "amplitude count must be a power of two >= 2, got {len}"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::Argument(format!("too many qubits: {num_qubits}")));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// `(|0> + |1>)/sqrt(2)` on a single qubit.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            num_qubits: 1,
            amplitudes: vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Scales to unit norm and returns the squared norm before scaling.
    pub fn renormalize(&mut self) -> Result<f64> {
        let n2 = self.norm_sqr();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / n2.sqrt();
        for a in &mut self.amplitudes {
            *a *= inv;
        }
        Ok(n2)
    }

    pub fn renormalized(&self) -> Result<Self> {
        let mut out = self.clone();
        out.renormalize()?;
        Ok(out)
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            Err(Error::Argument(format!(
                "qubit {qubit} out of range for {} qubit(s)",
                self.num_qubits
            )))
        } else {
            Ok(())
        }
    }

    /// Appends one qubit in `|0>` as the new most-significant qubit.
    pub fn with_ancilla(&self) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(self.amplitudes.len() * 2, ZERO);
        Self {
            num_qubits: self.num_qubits + 1,
            amplitudes,
        }
    }

    /// Removes the most-significant qubit, which must be in `|0>`.
    pub fn without_ancilla(&self) -> Result<Self> {
        if self.num_qubits < 2 {
            return Err(Error::Argument("cannot drop the only qubit".into()));
        }
        let half = self.amplitudes.len() / 2;
        let leaked: f64 = self.amplitudes[half..].iter().map(|a| a.norm_sqr()).sum();
        if leaked > 1e-24 {
            return Err(Error::Argument(format!(
                "top qubit is not in |0> (weight {leaked:e} on |1>)"
            )));
        }
        Ok(Self {
            num_qubits: self.num_qubits - 1,
            amplitudes: self.amplitudes[..half].to_vec(),
        })
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &GateSpec) -> Result<()> {
        gate.validate_for(self.num_qubits)?;
        match &gate.kind {
            GateKind::Rx(angle) => {
                let m = rx_matrix(*angle);
                apply_1q(&mut self.amplitudes, gate.targets[0], &m);
            }
            GateKind::H => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let m = [
                    [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
                    [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
                ];
                apply_1q(&mut self.amplitudes, gate.targets[0], &m);
            }
            GateKind::Crx(angle) => {
                let m = rx_matrix(*angle);
                apply_controlled_1q(&mut self.amplitudes, gate.targets[0], gate.targets[1], &m);
            }
            GateKind::Generic(u) => apply_generic(&mut self.amplitudes, &gate.targets, u),
        }
        Ok(())
    }

    /// Born probability of `outcome` on `qubit`: the summed squared magnitude
    /// of matching amplitudes.
    pub fn probability(&self, qubit: usize, outcome: u8) -> Result<f64> {
        self.check_qubit(qubit)?;
        check_outcome(outcome)?;
        let mask = 1usize << qubit;
        let want = if outcome == 0 { 0 } else { mask };
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// In-place post-selection: zeroes non-matching amplitudes, renormalizes,
    /// and returns the pre-collapse probability of `outcome`.
    pub fn collapse(&mut self, qubit: usize, outcome: u8) -> Result<f64> {
        let probability = self.probability(qubit, outcome)?;
        if probability <= IMPOSSIBLE_PROBABILITY {
            return Err(Error::ImpossibleOutcome {
                qubit,
                outcome,
                probability,
            });
        }
        self.project_and_scale(qubit, outcome, 1.0 / probability.sqrt());
        Ok(probability)
    }

    fn project_and_scale(&mut self, qubit: usize, outcome: u8, factor: f64) {
        let mask = 1usize << qubit;
        let want = if outcome == 0 { 0 } else { mask };
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == want {
                *a *= factor;
            } else {
                *a = ZERO;
            }
        }
    }

    /// Post-selects `outcome` on `qubit`, returning the outcome probability
    /// and the renormalized collapsed state.
    pub fn postselect(&self, qubit: usize, outcome: u8) -> Result<(f64, Self)> {
        let mut collapsed = self.clone();
        let p = collapsed.collapse(qubit, outcome)?;
        Ok((p, collapsed))
    }

    /// Projective Z measurement of `qubit`, collapsing in place.
    pub fn measure_in_place(&mut self, qubit: usize, rng: &mut RngStream) -> Result<u8> {
        let p0 = self.probability(qubit, 0)?;
        let p1 = self.norm_sqr() - p0;
        let mut outcome = if rng.uniform() < p0 { 0 } else { 1 };
        // rounding can leave a sliver of probability on a zero-weight branch
        if outcome == 1 && p1 <= IMPOSSIBLE_PROBABILITY {
            outcome = 0;
        }
        self.collapse(qubit, outcome)?;
        Ok(outcome)
    }

    pub fn measure(&self, qubit: usize, rng: &mut RngStream) -> Result<(u8, Self)> {
        let mut collapsed = self.clone();
        let outcome = collapsed.measure_in_place(qubit, rng)?;
        Ok((outcome, collapsed))
    }

    /// `<sigma_z>` on `qubit` of the normalized state (`<0|sigma_z|0> = +1`).
    /// Unnormalized states are normalized implicitly.
    pub fn expectation_sigma_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        let mut total = 0.0;
        let mut signed = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let w = a.norm_sqr();
            total += w;
            if i & mask == 0 {
                signed += w;
            } else {
                signed -= w;
            }
        }
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(signed / total)
    }
}

fn check_outcome(outcome: u8) -> Result<()> {
    if outcome > 1 {
        Err(Error::Argument(format!(
            "outcome must be 0 or 1, got {outcome}"
        )))
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    Rx(f64),
    /// Controlled `R_x`; targets are `[control, target]`.
    Crx(f64),
    H,
    /// Arbitrary unitary on `targets`; local index bit `j` is `targets[j]`.
    Generic(DMatrix<Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    kind: GateKind,
    targets: Vec<usize>,
}

impl GateSpec {
    pub fn rx(qubit: usize, angle: f64) -> Self {
        Self {
            kind: GateKind::Rx(angle),
            targets: vec![qubit],
        }
    }

    pub fn crx(control: usize, target: usize, angle: f64) -> Self {
        Self {
            kind: GateKind::Crx(angle),
            targets: vec![control, target],
        }
    }

    pub fn h(qubit: usize) -> Self {
        Self {
            kind: GateKind::H,
            targets: vec![qubit],
        }
    }

    /// Arbitrary unitary. Fails unless `matrix` is `2^k x 2^k` for
    /// `k = targets.len()` and unitary within [`UNITARY_TOLERANCE`].
    pub fn generic(matrix: DMatrix<Complex64>, targets: Vec<usize>) -> Result<Self> {
        let dim = 1usize << targets.len();
        if targets.is_empty() || matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Validation(format!(
                "generic gate on {} qubit(s) needs a {dim}x{dim} matrix, got {}x{}",
                targets.len(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let err = unitarity_error(&matrix);
        if err > UNITARY_TOLERANCE {
            return Err(Error::Validation(format!(
                "matrix is not unitary (max |U^dagger U - I| = {err:e})"
            )));
        }
        let gate = Self {
            kind: GateKind::Generic(matrix),
            targets,
        };
        gate.check_distinct()?;
        Ok(gate)
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// The inverse gate.
    pub fn dagger(&self) -> Self {
        let kind = match &self.kind {
            GateKind::Rx(a) => GateKind::Rx(-a),
            GateKind::Crx(a) => GateKind::Crx(-a),
            GateKind::H => GateKind::H,
            GateKind::Generic(u) => GateKind::Generic(u.adjoint()),
        };
        Self {
            kind,
            targets: self.targets.clone(),
        }
    }

    fn check_distinct(&self) -> Result<()> {
        for (i, a) in self.targets.iter().enumerate() {
            if self.targets[i + 1..].contains(a) {
                return Err(Error::Validation(format!(
                    "repeated qubit index {a} in gate targets"
                )));
            }
        }
        Ok(())
    }

    fn validate_for(&self, num_qubits: usize) -> Result<()> {
        self.check_distinct()?;
        if let Some(q) = self.targets.iter().find(|&&q| q >= num_qubits) {
            return Err(Error::Argument(format!(
                "gate qubit {q} out of range for {num_qubits} qubit(s)"
            )));
        }
        Ok(())
    }
}

/// Largest element of `|U^dagger U - I|`.
pub fn unitarity_error(u: &DMatrix<Complex64>) -> f64 {
    let prod = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

pub(crate) fn rx_matrix(angle: f64) -> [[Complex64; 2]; 2] {
    let c = Complex64::new((angle / 2.0).cos(), 0.0);
    let s = Complex64::new(0.0, -(angle / 2.0).sin());
    [[c, s], [s, c]]
}

fn apply_1q(amps: &mut [Complex64], qubit: usize, m: &[[Complex64; 2]; 2]) {
    let stride = 1usize << qubit;
    for base in (0..amps.len()).step_by(2 * stride) {
        for i in base..base + stride {
            let j = i + stride;
            let (a, b) = (amps[i], amps[j]);
            amps[i] = m[0][0] * a + m[0][1] * b;
            amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }
}

fn apply_controlled_1q(
    amps: &mut [Complex64],
    control: usize,
    target: usize,
    m: &[[Complex64; 2]; 2],
) {
    let cmask = 1usize << control;
    let stride = 1usize << target;
    for base in (0..amps.len()).step_by(2 * stride) {
        for i in base..base + stride {
            if i & cmask == 0 {
                continue;
            }
            let j = i + stride;
            let (a, b) = (amps[i], amps[j]);
            amps[i] = m[0][0] * a + m[0][1] * b;
            amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }
}

fn apply_generic(amps: &mut [Complex64], targets: &[usize], u: &DMatrix<Complex64>) {
    let k = targets.len();
    let local_dim = 1usize << k;
    let target_mask: usize = targets.iter().map(|q| 1usize << q).sum();
    // global offset of each local basis index
    let offsets: Vec<usize> = (0..local_dim)
        .map(|l| {
            targets
                .iter()
                .enumerate()
                .filter(|(bit, _)| l >> bit & 1 == 1)
                .map(|(_, q)| 1usize << q)
                .sum()
        })
        .collect();
    let mut buf = vec![ZERO; local_dim];
    for base in 0..amps.len() {
        if base & target_mask != 0 {
            continue;
        }
        for (l, off) in offsets.iter().enumerate() {
            buf[l] = amps[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, v) in buf.iter().enumerate() {
                acc += u[(r, c)] * v;
            }
            amps[base + off] = acc;
        }
    }
}
