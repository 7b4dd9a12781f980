//! Closed-form spectra of the effective Hamiltonians, exceptional-point
//! search, and `M_z` predictions on both sides of the EP.
//!
//! Two-level branch convention: `lambda_+ = -i Gamma/2 + s/2` with
//! `s = sqrt(theta^2 - Gamma^2)` on the principal branch, so `s >= 0` for
//! `Gamma < theta` and `s = +i |.|` for `Gamma > theta`. Eigenvectors are
//! `[(i Gamma +- s)/theta, 1]^T` normalized, second component real before
//! normalization.

use num_complex::Complex64;

use crate::engine::{multiqubit_effective_hamiltonian, EffectiveHamiltonian};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::pauli::two_qubit_coupling;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const I1: Complex64 = Complex64::new(0.0, 1.0);

/// Relative distance `|Gamma - theta| / theta` treated as sitting on the EP.
pub const EP_RELATIVE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `Gamma > theta`: distinct decay rates, one stationary eigenvector.
    Overdamped,
    /// `Gamma == theta`: eigenvalues and eigenvectors coalesce.
    ExceptionalPoint,
    /// `Gamma < theta`: equal decay rates, oscillating observables.
    Oscillatory,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Overdamped => "PT_BROKEN_OVERDAMPED",
            Regime::ExceptionalPoint => "EP",
            Regime::Oscillatory => "OSCILLATORY",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    /// `[lambda_+, lambda_-]`.
    pub eigenvalues: Vec<Complex64>,
    /// Normalized eigenvectors as columns, in eigenvalue order.
    pub eigenvectors: CMatrix,
    pub regime: Regime,
    /// `acosh(Gamma/theta)` when overdamped, `asin(Gamma/theta)` when
    /// oscillatory, 0 at the EP.
    pub alpha: f64,
    /// Set at the EP, where both columns hold the same coalesced vector.
    pub defective: bool,
}

impl SpectrumResult {
    pub fn lambda_plus(&self) -> Complex64 {
        self.eigenvalues[0]
    }

    pub fn lambda_minus(&self) -> Complex64 {
        self.eigenvalues[1]
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k).iter().copied().collect()
    }

    /// `|<v_+|v_->|`; 1 when the eigenvectors coalesce.
    pub fn eigenvector_overlap(&self) -> f64 {
        let a = self.eigenvectors.column(0);
        let b = self.eigenvectors.column(1);
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.conj() * y)
            .sum::<Complex64>()
            .norm()
    }

    /// `max_k |H v_k - lambda_k v_k|`.
    pub fn residual(&self, h: &CMatrix) -> f64 {
        (0..self.eigenvalues.len())
            .map(|k| {
                let v = self.eigenvector(k);
                let hv = linalg::mat_vec(h, &v);
                hv.iter()
                    .zip(&v)
                    .map(|(a, b)| (a - self.eigenvalues[k] * b).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

fn normalized(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Closed-form eigensystem of `theta/2 sigma_x + i Gamma/2 (sigma_z - 1)`.
pub fn eigensystem_2level(theta: f64, gamma: f64) -> Result<SpectrumResult> {
    if !(theta >= 0.0) || !(gamma >= 0.0) || !theta.is_finite() || !gamma.is_finite() {
        return Err(Error::Argument(format!(
            "theta and gamma must be finite and >= 0, got theta={theta}, gamma={gamma}"
        )));
    }
    if theta == 0.0 {
        if gamma == 0.0 {
            return Err(Error::ZeroHamiltonian);
        }
        // diagonal: |0> is stationary, |1> decays at rate Gamma
        return Ok(SpectrumResult {
            eigenvalues: vec![C0, Complex64::new(0.0, -gamma)],
            eigenvectors: CMatrix::from_row_slice(2, 2, &[C1, C0, C0, C1]),
            regime: Regime::Overdamped,
            alpha: f64::INFINITY,
            defective: false,
        });
    }

    let center = Complex64::new(0.0, -gamma / 2.0);
    let on_ep = (gamma - theta).abs() <= EP_RELATIVE_TOLERANCE * theta;
    let (s, regime, alpha) = if on_ep {
        (C0, Regime::ExceptionalPoint, 0.0)
    } else if gamma < theta {
        let s = ((theta - gamma) * (theta + gamma)).sqrt();
        (
            Complex64::new(s, 0.0),
            Regime::Oscillatory,
            (gamma / theta).asin(),
        )
    } else {
        let s = ((gamma - theta) * (gamma + theta)).sqrt();
        (
            Complex64::new(0.0, s),
            Regime::Overdamped,
            (gamma / theta).acosh(),
        )
    };

    let lp = center + s / 2.0;
    let lm = center - s / 2.0;
    let vp = normalized([(I1 * gamma + s) / theta, C1]);
    let vm = normalized([(I1 * gamma - s) / theta, C1]);
    Ok(SpectrumResult {
        eigenvalues: vec![lp, lm],
        eigenvectors: CMatrix::from_row_slice(2, 2, &[vp[0], vm[0], vp[1], vm[1]]),
        regime,
        alpha,
        defective: on_ep,
    })
}

/// Couplings of the two-qubit model with per-qubit decay `gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitModelSpec {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
}

impl TwoQubitModelSpec {
    pub fn new(a: f64, b: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !a.is_finite() || !b.is_finite() || !gamma.is_finite() {
            return Err(Error::Argument(format!(
                "need finite a, b and gamma > 0, got a={a}, b={b}, gamma={gamma}"
            )));
        }
        Ok(Self { a, b, gamma })
    }

    /// The `(a, b)` where all four levels coalesce at this `gamma`.
    pub fn fourth_order_ep(gamma: f64) -> (f64, f64) {
        let s = gamma / (2.0 * std::f64::consts::SQRT_2);
        (s, s)
    }

    pub fn hamiltonian(&self) -> EffectiveHamiltonian {
        multiqubit_effective_hamiltonian(&two_qubit_coupling(self.a, self.b), self.gamma, 2)
            .expect("coupling matrix is Hermitian")
    }
}

/// `8 x^2 - 1` values this small are within rounding of representing
/// `x = 1/(2 sqrt 2)` itself and are taken as exactly zero.
pub const RADICAND_SNAP: f64 = 4.0 * f64::EPSILON;

/// `8 x^2 - 1`, factored so the zero at `x = 1/(2 sqrt 2)` is resolved to
/// the rounding of `x`.
fn ep_radicand(x: f64) -> f64 {
    let sqrt8 = 2.0 * std::f64::consts::SQRT_2;
    let r = sqrt8.mul_add(x.abs(), -1.0) * sqrt8.mul_add(x.abs(), 1.0);
    if r.abs() <= RADICAND_SNAP {
        0.0
    } else {
        r
    }
}

/// Closed-form levels `E_{u,v}` in the order `(u, v) = (+,+), (+,-), (-,+), (-,-)`,
/// principal square roots throughout. Computed at unit decay and rescaled:
/// `E(a, b, Gamma) = Gamma E(a/Gamma, b/Gamma, 1)`.
pub fn two_qubit_eigenenergies(spec: &TwoQubitModelSpec) -> [Complex64; 4] {
    let g = spec.gamma;
    let (da, db) = (ep_radicand(spec.a / g), ep_radicand(spec.b / g));
    let ra = Complex64::new(da, 0.0).sqrt();
    let rb = Complex64::new(db, 0.0).sqrt();
    // 4(a^2 + b^2) - 1
    let base = Complex64::new(0.5 * (da + db), 0.0);
    let mut out = [C0; 4];
    let mut k = 0;
    for u in [1.0, -1.0] {
        for v in [1.0, -1.0] {
            let inner = (base + ra * rb * v).sqrt();
            let e = (Complex64::new(0.0, -2.0) + inner * (std::f64::consts::SQRT_2 * u)) / 2.0;
            out[k] = e * g;
            k += 1;
        }
    }
    out
}

/// Located exceptional point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpLocation {
    pub param: f64,
    /// Cluster diameter of the spectrum at `param`.
    pub gap: f64,
}

const SCAN_POINTS: usize = 401;
const GOLDEN_ITERATIONS: usize = 200;

/// Finds the parameter in `[lo, hi]` where `order` eigenvalues of
/// `family(param)` come closest together.
///
/// The objective is the smallest diameter over all `order`-subsets of the
/// numerical spectrum (for `order == 2`, the minimal pairwise gap). A grid
/// scan brackets the minimum, then golden-section search refines it. Fails
/// with [`Error::EpNotFound`] unless the minimum is below `tolerance`.
pub fn find_ep<F>(family: F, range: (f64, f64), order: usize, tolerance: f64) -> Result<EpLocation>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    let (lo, hi) = range;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Argument(format!("invalid range [{lo}, {hi}]")));
    }
    let objective = |x: f64| -> Result<f64> {
        let m = family(x)?;
        if order < 2 || order > m.nrows() {
            return Err(Error::Argument(format!(
                "EP order {order} invalid for dimension {}",
                m.nrows()
            )));
        }
        let ev = linalg::eigenvalues_dense(&m)?;
        Ok(linalg::min_cluster_diameter(&ev, order))
    };

    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..SCAN_POINTS {
        let g = objective(lo + step * i as f64)?;
        if g < best {
            best = g;
            best_i = i;
        }
    }

    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_i + 1) as f64).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    for _ in 0..GOLDEN_ITERATIONS {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d)?;
        }
    }
    let (param, gap) = [(c, fc), (d, fd), (lo + step * best_i as f64, best)]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("non-empty");

    if gap < tolerance {
        Ok(EpLocation { param, gap })
    } else {
        Err(Error::EpNotFound {
            best_param: param,
            best_gap: gap,
            tolerance,
        })
    }
}

/// Long-time `<sigma_z>` in the overdamped regime: `sqrt(1 - (theta/Gamma)^2)`,
/// i.e. `tanh(acosh(Gamma/theta))`.
pub fn stationary_mz(theta: f64, gamma: f64) -> Result<f64> {
    if !(gamma > theta) || theta < 0.0 {
        return Err(Error::Regime(format!(
            "stationary M_z needs gamma > theta >= 0, got theta={theta}, gamma={gamma}"
        )));
    }
    let r = theta / gamma;
    Ok(((1.0 - r) * (1.0 + r)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InitialState {
    Zero,
    One,
    /// `I/2`, as two pure runs combined by a [`MixedEstimator`].
    Mixed,
}

impl std::str::FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" | "0" => Ok(Self::Zero),
            "one" | "1" => Ok(Self::One),
            "mixed" => Ok(Self::Mixed),
            other => Err(Error::Argument(format!(
                "initial state must be zero, one or mixed, got '{other}'"
            ))),
        }
    }
}

/// How the two pure-state runs are combined for the `I/2` initial state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MixedEstimator {
    /// Plain average of the two normalized expectations.
    #[default]
    EqualWeight,
    /// Average weighted by each run's survival probability, i.e. the
    /// post-selected ensemble average.
    SurvivalWeighted,
}

pub fn mixed_mz(
    mz0: f64,
    survival0: f64,
    mz1: f64,
    survival1: f64,
    estimator: MixedEstimator,
) -> f64 {
    match estimator {
        MixedEstimator::EqualWeight => 0.5 * (mz0 + mz1),
        MixedEstimator::SurvivalWeighted => {
            (survival0 * mz0 + survival1 * mz1) / (survival0 + survival1)
        }
    }
}

/// Closed-form `M_z(t)` for `Gamma < theta` under `H_eff`, with
/// `alpha = asin(Gamma/theta)`. `Mixed` uses the equal-weight average.
pub fn mz_oscillation(theta: f64, gamma: f64, t: f64, initial: InitialState) -> Result<f64> {
    if !(gamma < theta) || gamma < 0.0 {
        return Err(Error::Regime(format!(
            "oscillating M_z needs 0 <= gamma < theta, got theta={theta}, gamma={gamma}"
        )));
    }
    let alpha = (gamma / theta).asin();
    let x = theta * t / 2.0 * alpha.cos();
    let from_zero = || {
        let c = (x - alpha).cos().powi(2);
        let s = x.sin().powi(2);
        (c - s) / (c + s)
    };
    let from_one = || {
        let s = x.sin().powi(2);
        let c = (x + alpha).cos().powi(2);
        (s - c) / (s + c)
    };
    Ok(match initial {
        InitialState::Zero => from_zero(),
        InitialState::One => from_one(),
        InitialState::Mixed => 0.5 * (from_zero() + from_one()),
    })
}
