//! Deterministic post-selected branches and shot-noise sampling on top of them.

use rand_distr::{Distribution, Geometric};

use crate::engine::{attempt_sampled, run_sampled, Attempt, CircuitRunner, UnitSpec, SYSTEM};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::spectral::{mixed_mz, InitialState, MixedEstimator};
use crate::statevector::StateVector;

use super::config::SamplerName;

/// Branch statistics after `n` kept cycles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Checkpoint {
    pub n: usize,
    pub survival: f64,
    pub mz: f64,
}

impl Checkpoint {
    fn p_zero(&self) -> f64 {
        0.5 * (1.0 + self.mz)
    }
}

/// Post-selected branch of `initial`, recorded at ascending cycle counts.
pub(crate) fn branch(
    initial: &StateVector,
    unit: &UnitSpec,
    at: &[usize],
) -> Result<Vec<Checkpoint>> {
    let mut runner = CircuitRunner::new(initial, unit)?;
    let mut out = Vec::with_capacity(at.len());
    for &n in at {
        if n < runner.cycles() {
            return Err(Error::Argument("checkpoints must be ascending".into()));
        }
        while runner.cycles() < n {
            runner.step_postselected()?;
        }
        out.push(Checkpoint {
            n,
            survival: runner.cumulative_success_probability(),
            mz: runner.sigma_z()?,
        });
    }
    Ok(out)
}

/// The pure states making up an initial condition, each with its branch.
pub(crate) struct Ensemble {
    unit: UnitSpec,
    members: Vec<(StateVector, Vec<Checkpoint>)>,
    estimator: MixedEstimator,
}

impl Ensemble {
    pub fn new(
        initial: InitialState,
        unit: UnitSpec,
        at: &[usize],
        estimator: MixedEstimator,
    ) -> Result<Self> {
        let states: Vec<usize> = match initial {
            InitialState::Zero => vec![0],
            InitialState::One => vec![1],
            InitialState::Mixed => vec![0, 1],
        };
        let members = states
            .into_iter()
            .map(|b| {
                let s = StateVector::new_basis_state(1, b)?;
                let br = branch(&s, &unit, at)?;
                Ok((s, br))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            unit,
            members,
            estimator,
        })
    }

    /// Exact `M_z` at checkpoint `k`.
    pub fn mz(&self, k: usize) -> f64 {
        match self.members.as_slice() {
            [(_, b)] => b[k].mz,
            [(_, b0), (_, b1)] => mixed_mz(
                b0[k].mz,
                b0[k].survival,
                b1[k].mz,
                b1[k].survival,
                self.estimator,
            ),
            _ => unreachable!("one or two members"),
        }
    }

    pub fn checkpoint(&self, member: usize, k: usize) -> Checkpoint {
        self.members[member].1[k]
    }
}

/// Draws heralded shots from an [`Ensemble`].
pub(crate) struct ShotSampler {
    pub kind: SamplerName,
    pub max_attempts: u64,
}

struct Shot {
    zero: bool,
    attempts: u64,
}

impl ShotSampler {
    fn exhausted(&self, n: usize) -> Error {
        Error::Exhausted {
            n,
            attempts: self.max_attempts,
        }
    }

    fn geometric_attempts(&self, survival: f64, n: usize, rng: &mut RngStream) -> Result<u64> {
        if survival >= 1.0 {
            return Ok(1);
        }
        let geo = Geometric::new(survival).map_err(|_| self.exhausted(n))?;
        let attempts = geo.sample(rng.rng()).saturating_add(1);
        if attempts > self.max_attempts {
            return Err(self.exhausted(n));
        }
        Ok(attempts)
    }

    fn shot(&self, ens: &Ensemble, member: usize, k: usize, rng: &mut RngStream) -> Result<Shot> {
        let cp = ens.checkpoint(member, k);
        match self.kind {
            SamplerName::Heralded => {
                let attempts = self.geometric_attempts(cp.survival, cp.n, rng)?;
                Ok(Shot {
                    zero: rng.uniform() < cp.p_zero(),
                    attempts,
                })
            }
            SamplerName::Trajectory => {
                let initial = &ens.members[member].0;
                let rec = run_sampled(initial, &ens.unit, cp.n, rng, self.max_attempts)?;
                let (outcome, _) = rec.final_state.measure(SYSTEM, rng)?;
                Ok(Shot {
                    zero: outcome == 0,
                    attempts: rec.attempts,
                })
            }
        }
    }

    /// A shot whose initial state is redrawn uniformly on every attempt;
    /// members are then represented in proportion to their survival.
    fn pooled_shot(&self, ens: &Ensemble, k: usize, rng: &mut RngStream) -> Result<Shot> {
        let (c0, c1) = (ens.checkpoint(0, k), ens.checkpoint(1, k));
        match self.kind {
            SamplerName::Heralded => {
                let attempts =
                    self.geometric_attempts(0.5 * (c0.survival + c1.survival), c0.n, rng)?;
                let total = c0.survival + c1.survival;
                let cp = if rng.uniform() * total < c0.survival {
                    c0
                } else {
                    c1
                };
                Ok(Shot {
                    zero: rng.uniform() < cp.p_zero(),
                    attempts,
                })
            }
            SamplerName::Trajectory => {
                for attempt in 1..=self.max_attempts {
                    let member = usize::from(rng.uniform() >= 0.5);
                    let initial = &ens.members[member].0;
                    if let Attempt::Success(rec) = attempt_sampled(initial, &ens.unit, c0.n, rng)? {
                        let (outcome, _) = rec.final_state.measure(SYSTEM, rng)?;
                        return Ok(Shot {
                            zero: outcome == 0,
                            attempts: attempt,
                        });
                    }
                }
                Err(self.exhausted(c0.n))
            }
        }
    }

    /// One trial's `M_z` estimate and the attempts it used. With several
    /// checkpoints each shot reads out at one drawn uniformly from `at`, so
    /// the estimate targets the plain average over `at`.
    pub fn trial_mz(
        &self,
        ens: &Ensemble,
        at: &[usize],
        shots: usize,
        rng: &RngStream,
    ) -> Result<(f64, u64)> {
        let mut attempts = 0;
        let mut signed = |shot: Shot| {
            attempts += shot.attempts;
            if shot.zero {
                1.0
            } else {
                -1.0
            }
        };
        let pick = |r: &mut RngStream| match at {
            [k] => *k,
            _ => at[((r.uniform() * at.len() as f64) as usize).min(at.len() - 1)],
        };
        let pooled = ens.members.len() == 2 && ens.estimator == MixedEstimator::SurvivalWeighted;
        let mz = if pooled {
            let mut r = rng.derive(0);
            let mut sum = 0.0;
            for _ in 0..2 * shots {
                let k = pick(&mut r);
                sum += signed(self.pooled_shot(ens, k, &mut r)?);
            }
            sum / (2 * shots) as f64
        } else {
            let mut total = 0.0;
            for m in 0..ens.members.len() {
                let mut r = rng.derive(m as u64);
                let mut sum = 0.0;
                for _ in 0..shots {
                    let k = pick(&mut r);
                    sum += signed(self.shot(ens, m, k, &mut r)?);
                }
                total += sum / shots as f64;
            }
            total / ens.members.len() as f64
        };
        Ok((mz, attempts))
    }
}
