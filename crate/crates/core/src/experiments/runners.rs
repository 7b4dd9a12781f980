use rayon::prelude::*;

use crate::engine::{
    effective_hamiltonian, evolve_effective, mean_std, UnitSpec, DEFAULT_MAX_ATTEMPTS, SYSTEM,
};
use crate::error::{Error, Result};
use crate::linalg::min_cluster_diameter;
use crate::rng::RngStream;
use crate::spectral::{
    eigensystem_2level, mz_oscillation, stationary_mz, two_qubit_eigenenergies, InitialState,
    MixedEstimator, TwoQubitModelSpec,
};
use crate::statevector::StateVector;

use super::config::{ExperimentConfig, ExperimentKind, Mode};
use super::sampling::{Ensemble, ShotSampler};

/// Automatic cycle count where the imaginary gap vanishes.
pub const EP_FALLBACK_CYCLES: usize = 5000;
/// Upper bound on automatically chosen cycle counts.
pub const MAX_AUTO_CYCLES: usize = 1_000_000;
/// A windowed average spans at least this many periods' worth of `1/(theta cos alpha)`.
const WINDOW_SPAN: f64 = 50.0;
const DEFAULT_WINDOW_POINTS: usize = 200;

pub(crate) struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
    pub attempts: u64,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            metadata: Vec::new(),
            attempts: 0,
        }
    }
}

/// Cycles needed for the slower mode to fade by `e^-10` relative to the
/// faster one: `ceil(10 / sqrt(Gamma^2 - theta^2))`, capped at
/// [`MAX_AUTO_CYCLES`]. Without a gap (at or below the EP) this is
/// [`EP_FALLBACK_CYCLES`].
pub fn auto_cycles(theta: f64, gamma: f64) -> usize {
    let gap = (gamma * gamma - theta * theta).max(0.0).sqrt();
    if gap == 0.0 {
        return EP_FALLBACK_CYCLES;
    }
    ((10.0 / gap).ceil() as usize).min(MAX_AUTO_CYCLES)
}

/// `0, stride, 2 stride, ..., n_max` (always ending on `n_max`).
pub fn cycle_grid(n_max: usize, stride: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..=n_max).step_by(stride.max(1)).collect();
    if v.last() != Some(&n_max) {
        v.push(n_max);
    }
    v
}

/// Ascending cycle counts spread over `[T/2, T]`, one per stratum.
pub fn window_cycles(t_end: usize, points: usize) -> Vec<usize> {
    let half = t_end / 2;
    let span = t_end - half;
    (0..points)
        .map(|k| half + ((2 * k + 1) * span) / (2 * points))
        .collect()
}

struct Sampling {
    sampler: ShotSampler,
    shots: usize,
    trials: usize,
    root: RngStream,
}

impl Sampling {
    fn from_config(config: &ExperimentConfig) -> Option<Self> {
        (config.mode == Mode::Sampled).then(|| Self {
            sampler: ShotSampler {
                kind: config.parameters.sampler.unwrap_or_default(),
                max_attempts: config
                    .parameters
                    .max_attempts
                    .unwrap_or(DEFAULT_MAX_ATTEMPTS),
            },
            shots: config.shots.expect("validated"),
            trials: config.trials.expect("validated"),
            root: RngStream::from_seed(config.seed.expect("validated")),
        })
    }

    /// Mean and sample std of `M_z` over trials; trial `k` draws from `rng.derive(k)`.
    fn mz(&self, ens: &Ensemble, at: &[usize], rng: &RngStream) -> Result<(f64, f64, u64)> {
        let mut values = Vec::with_capacity(self.trials);
        let mut attempts = 0;
        for k in 0..self.trials {
            let (mz, a) = self
                .sampler
                .trial_mz(ens, at, self.shots, &rng.derive(k as u64))?;
            values.push(mz);
            attempts += a;
        }
        let (mean, std) = mean_std(&values);
        Ok((mean, std, attempts))
    }
}

fn required<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidConfig(vec![format!("parameters.{name}: required")]))
}

fn initial(config: &ExperimentConfig, default: InitialState) -> InitialState {
    config.parameters.initial.map_or(default, Into::into)
}

fn estimator(config: &ExperimentConfig) -> MixedEstimator {
    config
        .parameters
        .estimator
        .map_or_else(Default::default, Into::into)
}

fn sum_attempts<I: IntoIterator<Item = u64>>(it: I) -> u64 {
    it.into_iter().fold(0, u64::saturating_add)
}

pub(crate) fn run(config: &ExperimentConfig) -> Result<Table> {
    match config.kind {
        ExperimentKind::SpectrumScan => spectrum_scan(config),
        ExperimentKind::P0Trace => p0_trace(config),
        ExperimentKind::MzSaturation => mz_saturation(config),
        ExperimentKind::EpTransitionScan => ep_transition_scan(config),
        ExperimentKind::Oscillation => oscillation(config),
        ExperimentKind::Ep4Surface => ep4_surface(config),
    }
}

fn spectrum_scan(config: &ExperimentConfig) -> Result<Table> {
    let p = &config.parameters;
    let theta = required(p.theta, "theta")?;
    let mut t = Table::new(vec![
        "gamma_over_theta",
        "re_lambda_plus",
        "re_lambda_minus",
        "im_lambda_plus",
        "im_lambda_minus",
    ]);
    for r in p.gamma_over_theta.as_ref().expect("validated").values() {
        let s = eigensystem_2level(theta, r * theta)?;
        let (lp, lm) = (s.lambda_plus(), s.lambda_minus());
        t.rows.push(vec![r, lp.re, lm.re, lp.im, lm.im]);
    }
    Ok(t)
}

fn p0_trace(config: &ExperimentConfig) -> Result<Table> {
    let p = &config.parameters;
    let unit = UnitSpec::new(required(p.theta, "theta")?, required(p.phi, "phi")?)?;
    let n_max = required(p.n_max, "n_max")?;
    let ns = cycle_grid(n_max, p.stride.unwrap_or(1));
    let init = initial(config, InitialState::Zero);
    let ens = Ensemble::new(init, unit, &ns, MixedEstimator::EqualWeight)?;
    let h = effective_hamiltonian(&unit);
    let psi0 = StateVector::new_basis_state(1, usize::from(init == InitialState::One))?;
    let sampling = Sampling::from_config(config);

    let rows = (0..ns.len())
        .into_par_iter()
        .map(|k| {
            let n = ns[k];
            let exact = 0.5 * (1.0 + ens.mz(k));
            let (evolved, _) = evolve_effective(&h, &psi0, n as f64)?;
            let heff = evolved.renormalized()?.probability(SYSTEM, 0)?;
            let (mean, std, attempts) = match &sampling {
                None => (exact, 0.0, 0),
                Some(s) => {
                    let (m, sd, a) = s.mz(&ens, &[k], &s.root.derive(k as u64))?;
                    // p0 = (1 + M_z) / 2 for each trial
                    (0.5 * (1.0 + m), 0.5 * sd, a)
                }
            };
            Ok((vec![n as f64, mean, std, exact, heff], attempts))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut t = Table::new(vec![
        "n",
        "p0_mean",
        "p0_std",
        "p0_deterministic",
        "p0_heff",
    ]);
    t.attempts = sum_attempts(rows.iter().map(|r| r.1));
    t.rows = rows.into_iter().map(|r| r.0).collect();
    Ok(t)
}

fn unit_for_ratio(phi: f64, ratio: f64) -> Result<UnitSpec> {
    let gamma = phi * phi / 8.0;
    UnitSpec::new(gamma / ratio, phi)
}

fn mz_saturation(config: &ExperimentConfig) -> Result<Table> {
    let p = &config.parameters;
    let phi = required(p.phi, "phi")?;
    let ratios = p.gamma_over_theta.as_ref().expect("validated").values();
    let init = initial(config, InitialState::Mixed);
    let est = estimator(config);
    let sampling = Sampling::from_config(config);

    let blocks = ratios
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            let unit = unit_for_ratio(phi, r)?;
            let (theta, gamma) = (unit.theta(), unit.gamma());
            let n_max = p.n_max.unwrap_or_else(|| auto_cycles(theta, gamma));
            let stride = p.stride.unwrap_or((n_max / 100).max(1));
            let ns = cycle_grid(n_max, stride);
            let stationary = stationary_mz(theta, gamma)?;
            let ens = Ensemble::new(init, unit, &ns, est)?;
            let point_rng = sampling.as_ref().map(|s| s.root.derive(i as u64));
            let mut rows = Vec::with_capacity(ns.len());
            let mut attempts = 0;
            for (k, &n) in ns.iter().enumerate() {
                let (mz, std) = match (&sampling, &point_rng) {
                    (Some(s), Some(rng)) => {
                        let (m, sd, a) = s.mz(&ens, &[k], &rng.derive(k as u64))?;
                        attempts += a;
                        (m, sd)
                    }
                    _ => (ens.mz(k), 0.0),
                };
                rows.push(vec![r, n as f64, mz, std, stationary]);
            }
            Ok((rows, attempts, n_max))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut t = Table::new(vec![
        "gamma_over_theta",
        "n",
        "mz",
        "mz_std",
        "mz_stationary",
    ]);
    t.attempts = sum_attempts(blocks.iter().map(|b| b.1));
    let n_list: Vec<String> = blocks.iter().map(|b| b.2.to_string()).collect();
    t.metadata.push(("n_max".into(), n_list.join(",")));
    t.rows = blocks.into_iter().flat_map(|b| b.0).collect();
    Ok(t)
}

fn ep_transition_scan(config: &ExperimentConfig) -> Result<Table> {
    let p = &config.parameters;
    let phi = required(p.phi, "phi")?;
    let ratios = p.gamma_over_theta.as_ref().expect("validated").values();
    let init = initial(config, InitialState::Mixed);
    let est = estimator(config);
    let window = p.window_points.unwrap_or(DEFAULT_WINDOW_POINTS);
    let sampling = Sampling::from_config(config);

    let rows = ratios
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            let unit = unit_for_ratio(phi, r)?;
            let (theta, gamma) = (unit.theta(), unit.gamma());
            let (at, theory) = if r >= 1.0 {
                let n = p.n_cycles.unwrap_or_else(|| auto_cycles(theta, gamma));
                let theory = if r > 1.0 {
                    stationary_mz(theta, gamma)?
                } else {
                    0.0
                };
                (vec![n], theory)
            } else {
                let cos_alpha = r.asin().cos();
                let span = (WINDOW_SPAN / (theta * cos_alpha)).ceil() as usize;
                let t_end = span.max(p.n_cycles.unwrap_or(0)).max(2 * window);
                (window_cycles(t_end, window), 0.0)
            };
            let n_cycles = *at.last().expect("non-empty") as f64;
            let ens = Ensemble::new(init, unit, &at, est)?;
            let idx: Vec<usize> = (0..at.len()).collect();
            let (mean, var, attempts, exhausted) = match &sampling {
                None => {
                    let mean = idx.iter().map(|&k| ens.mz(k)).sum::<f64>() / idx.len() as f64;
                    (mean, 0.0, 0, false)
                }
                Some(s) => match s.mz(&ens, &idx, &s.root.derive(i as u64)) {
                    Ok((m, sd, a)) => (m, sd * sd, a, false),
                    Err(Error::Exhausted { n, attempts }) => {
                        log::warn!(
                            "gamma/theta = {r}: no run survived {n} cycles in {attempts} attempts"
                        );
                        (f64::NAN, f64::NAN, 0, true)
                    }
                    Err(e) => return Err(e),
                },
            };
            let flag = if exhausted { 1.0 } else { 0.0 };
            Ok((vec![r, mean, var, theory, n_cycles, flag], attempts))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut t = Table::new(vec![
        "gamma_over_theta",
        "mz_mean",
        "mz_variance",
        "mz_theory",
        "n_cycles",
        "exhausted",
    ]);
    t.attempts = sum_attempts(rows.iter().map(|r| r.1));
    let exhausted = rows.iter().filter(|r| r.0[5] != 0.0).count();
    t.metadata
        .push(("exhausted_points".into(), exhausted.to_string()));
    t.metadata
        .push(("window_points".into(), window.to_string()));
    t.rows = rows.into_iter().map(|r| r.0).collect();
    Ok(t)
}

fn oscillation(config: &ExperimentConfig) -> Result<Table> {
    let p = &config.parameters;
    let theta = required(p.theta, "theta")?;
    let gamma = config.resolved_gamma().expect("validated");
    let init = initial(config, InitialState::Zero);
    let h = crate::engine::two_level_hamiltonian(theta, gamma);
    let members: Vec<StateVector> = match init {
        InitialState::Zero => vec![StateVector::new_basis_state(1, 0)?],
        InitialState::One => vec![StateVector::new_basis_state(1, 1)?],
        InitialState::Mixed => vec![
            StateVector::new_basis_state(1, 0)?,
            StateVector::new_basis_state(1, 1)?,
        ],
    };
    let ts = p.t.as_ref().expect("validated").values();
    let rows = ts
        .par_iter()
        .map(|&t| {
            let closed = mz_oscillation(theta, gamma, t, init)?;
            let mut heff = 0.0;
            for m in &members {
                let (evolved, _) = evolve_effective(&h, m, t)?;
                heff += evolved.expectation_sigma_z(SYSTEM)?;
            }
            Ok(vec![t, closed, heff / members.len() as f64])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(vec!["t", "mz_closed_form", "mz_heff"]);
    table
        .metadata
        .push(("gamma".into(), format!("{gamma:.16e}")));
    table.rows = rows;
    Ok(table)
}

fn ep4_surface(config: &ExperimentConfig) -> Result<Table> {
    let p = &config.parameters;
    let gamma = p.gamma.unwrap_or(1.0);
    let a_vals = p.a.as_ref().expect("validated").values();
    let b_vals = p.b.as_ref().expect("validated").values();
    let mut t = Table::new(vec![
        "a", "b", "re_e_pp", "im_e_pp", "re_e_pm", "im_e_pm", "re_e_mp", "im_e_mp", "re_e_mm",
        "im_e_mm", "min_gap", "spread",
    ]);
    for &a in &a_vals {
        for &b in &b_vals {
            let e = two_qubit_eigenenergies(&TwoQubitModelSpec::new(a, b, gamma)?);
            let mut row = vec![a, b];
            for z in &e {
                row.push(z.re);
                row.push(z.im);
            }
            row.push(min_cluster_diameter(&e, 2));
            row.push(min_cluster_diameter(&e, 4));
            t.rows.push(row);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(cycle_grid(10, 4), vec![0, 4, 8, 10]);
        assert_eq!(cycle_grid(0, 3), vec![0]);
        assert_eq!(cycle_grid(6, 3), vec![0, 3, 6]);
        let w = window_cycles(400, 200);
        assert_eq!(w.len(), 200);
        assert!(w.windows(2).all(|p| p[0] < p[1]));
        assert!(w[0] >= 200 && *w.last().unwrap() <= 400);
    }

    #[test]
    fn auto_cycle_rule() {
        assert_eq!(auto_cycles(1.0, 1.0), EP_FALLBACK_CYCLES);
        assert_eq!(auto_cycles(3.0, 5.0), 3);
        // 10 / sqrt(4e-8 - 1e-8) = 57735.03
        assert_eq!(auto_cycles(1e-4, 2e-4), 57736);
        assert_eq!(auto_cycles(1.0, 1.0 + 1e-15), MAX_AUTO_CYCLES);
    }
}
