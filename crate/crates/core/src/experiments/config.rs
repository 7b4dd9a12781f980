use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{InitialState, MixedEstimator};

/// Environment variable naming the directory for results without an
/// explicit `output`.
pub const OUTPUT_DIR_ENV: &str = "NHSIM_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExperimentKind {
    SpectrumScan,
    P0Trace,
    MzSaturation,
    EpTransitionScan,
    Oscillation,
    Ep4Surface,
}

impl ExperimentKind {
    pub fn file_stem(&self) -> &'static str {
        match self {
            Self::SpectrumScan => "spectrum_scan",
            Self::P0Trace => "p0_trace",
            Self::MzSaturation => "mz_saturation",
            Self::EpTransitionScan => "ep_transition_scan",
            Self::Oscillation => "oscillation",
            Self::Ep4Surface => "ep4_surface",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Deterministic,
    Sampled,
}

/// A list of values, or `{ start, stop, points }` for an inclusive
/// evenly spaced grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        points: usize,
    },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range {
                start,
                stop,
                points,
            } => match points {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorName {
    #[default]
    EqualWeight,
    SurvivalWeighted,
}

impl From<EstimatorName> for MixedEstimator {
    fn from(e: EstimatorName) -> Self {
        match e {
            EstimatorName::EqualWeight => MixedEstimator::EqualWeight,
            EstimatorName::SurvivalWeighted => MixedEstimator::SurvivalWeighted,
        }
    }
}

/// How sampled runs draw heralded shots.
///
/// `Heralded` uses the fact that every kept run follows the same
/// post-selected branch: the attempt count is geometric in the branch's
/// survival probability and the readout is a Bernoulli draw on its final
/// state. `Trajectory` simulates every attempt cycle by cycle. Both draw
/// from the same distribution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerName {
    #[default]
    Heralded,
    Trajectory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialName {
    Zero,
    One,
    Mixed,
}

impl From<InitialName> for InitialState {
    fn from(i: InitialName) -> Self {
        match i {
            InitialName::Zero => InitialState::Zero,
            InitialName::One => InitialState::One,
            InitialName::Mixed => InitialState::Mixed,
        }
    }
}

/// Named physics parameters; which ones are required depends on the kind.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_over_theta: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cycles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_attempts: Option<u64>,
}

/// Declarative description of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub parameters: Parameters,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            mode: Mode::Deterministic,
            shots: None,
            trials: None,
            seed: None,
            output: None,
            parameters: Parameters::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// `output`, or `<$NHSIM_OUTPUT_DIR or .>/<kind>.csv`.
    pub fn output_path(&self) -> PathBuf {
        match &self.output {
            Some(p) => p.clone(),
            None => {
                let dir = std::env::var_os(OUTPUT_DIR_ENV)
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from("."));
                dir.join(format!("{}.csv", self.kind.file_stem()))
            }
        }
    }

    /// Checks every field the kind needs; the error lists all offenders.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let p = &self.parameters;
        let mut require = |name: &str, present: bool| {
            if !present {
                problems.push(format!("parameters.{name}: required for {:?}", self.kind));
            }
        };
        use ExperimentKind::*;
        match self.kind {
            SpectrumScan => {
                require("theta", p.theta.is_some());
                require("gamma_over_theta", p.gamma_over_theta.is_some());
            }
            P0Trace => {
                require("theta", p.theta.is_some());
                require("phi", p.phi.is_some());
                require("n_max", p.n_max.is_some());
            }
            MzSaturation => {
                require("phi", p.phi.is_some());
                require("gamma_over_theta", p.gamma_over_theta.is_some());
            }
            EpTransitionScan => {
                require("phi", p.phi.is_some());
                require("gamma_over_theta", p.gamma_over_theta.is_some());
            }
            Oscillation => {
                require("theta", p.theta.is_some());
                require("gamma or phi", p.gamma.is_some() ^ p.phi.is_some());
                require("t", p.t.is_some());
            }
            Ep4Surface => {
                require("a", p.a.is_some());
                require("b", p.b.is_some());
            }
        }

        let finite = |name: &str, v: Option<f64>, problems: &mut Vec<String>| {
            if let Some(x) = v {
                if !x.is_finite() {
                    problems.push(format!("parameters.{name}: must be finite, got {x}"));
                }
            }
        };
        finite("theta", p.theta, &mut problems);
        finite("phi", p.phi, &mut problems);
        finite("gamma", p.gamma, &mut problems);
        if let Some(th) = p.theta {
            if th <= 0.0 {
                problems.push(format!("parameters.theta: must be > 0, got {th}"));
            }
        }
        if let Some(phi) = p.phi {
            if phi <= 0.0 {
                problems.push(format!("parameters.phi: must be > 0, got {phi}"));
            }
        }
        if let Some(g) = p.gamma {
            if self.kind == Ep4Surface && g <= 0.0 {
                problems.push(format!("parameters.gamma: must be > 0, got {g}"));
            } else if g < 0.0 {
                problems.push(format!("parameters.gamma: must be >= 0, got {g}"));
            }
        }
        for (name, grid) in [
            ("gamma_over_theta", &p.gamma_over_theta),
            ("t", &p.t),
            ("a", &p.a),
            ("b", &p.b),
        ] {
            if let Some(g) = grid {
                let v = g.values();
                if v.is_empty() {
                    problems.push(format!("parameters.{name}: grid is empty"));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    problems.push(format!("parameters.{name}: values must be finite"));
                }
            }
        }
        if let Some(g) = &p.gamma_over_theta {
            let v = g.values();
            if self.kind == SpectrumScan {
                if v.iter().any(|&r| r < 0.0) {
                    problems.push("parameters.gamma_over_theta: values must be >= 0".into());
                }
            } else if v.iter().any(|&r| r <= 0.0) {
                problems.push("parameters.gamma_over_theta: values must be > 0".into());
            }
            match self.kind {
                MzSaturation if v.iter().any(|&r| r <= 1.0) => problems.push(
                    "parameters.gamma_over_theta: saturation needs every value > 1 (overdamped side)"
                        .into(),
                ),
                EpTransitionScan if !v.iter().any(|&r| r > 1.0) => problems.push(
                    "parameters.gamma_over_theta: scan needs at least one value > 1".into(),
                ),
                _ => {}
            }
        }
        if let Some(t) = &p.t {
            if t.values().iter().any(|&x| x < 0.0) {
                problems.push("parameters.t: times must be >= 0".into());
            }
        }
        if self.kind == Oscillation {
            if let (Some(th), Some(g)) = (p.theta, self.resolved_gamma()) {
                if g >= th {
                    problems.push(format!(
                        "parameters.gamma: oscillation needs gamma < theta, got gamma={g}, theta={th}"
                    ));
                }
            }
        }
        if self.kind == P0Trace && p.initial == Some(InitialName::Mixed) {
            problems.push("parameters.initial: P0_TRACE needs a pure initial state".into());
        }
        if p.stride == Some(0) {
            problems.push("parameters.stride: must be >= 1".into());
        }
        if p.window_points == Some(0) {
            problems.push("parameters.window_points: must be >= 1".into());
        }
        if p.max_attempts == Some(0) {
            problems.push("parameters.max_attempts: must be >= 1".into());
        }

        if self.mode == Mode::Sampled {
            if matches!(self.kind, SpectrumScan | Oscillation | Ep4Surface) {
                problems.push(format!(
                    "mode: sampled is not available for {:?}",
                    self.kind
                ));
            }
            match self.shots {
                None => problems.push("shots: required in sampled mode".into()),
                Some(0) => problems.push("shots: must be >= 1".into()),
                _ => {}
            }
            match self.trials {
                None => problems.push("trials: required in sampled mode".into()),
                Some(t) if t < 2 => problems.push(format!("trials: must be >= 2, got {t}")),
                _ => {}
            }
            if self.seed.is_none() {
                problems.push("seed: required in sampled mode".into());
            }
        }

        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }

    /// Decay rate from `gamma`, else `phi^2/8`.
    pub fn resolved_gamma(&self) -> Option<f64> {
        let p = &self.parameters;
        p.gamma.or(p.phi.map(|phi| phi * phi / 8.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P0: &str = r#"
kind = "P0_TRACE"
mode = "sampled"
shots = 100
trials = 10
seed = 7
output = "out/p0.csv"

[parameters]
theta = 0.1
phi = 0.1
n_max = 100
"#;

    #[test]
    fn parses_and_validates() {
        let c = ExperimentConfig::from_toml(P0).unwrap();
        assert_eq!(c.kind, ExperimentKind::P0Trace);
        assert_eq!(c.mode, Mode::Sampled);
        assert_eq!(c.parameters.n_max, Some(100));
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = P0.replace("theta = 0.1", "theta = 0.1\nbogus = 3");
        assert!(matches!(
            ExperimentConfig::from_toml(&bad),
            Err(Error::ConfigParse(_))
        ));
        let bad = format!("colour = 1\n{P0}");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn missing_seed_is_named() {
        let c = ExperimentConfig::from_toml(&P0.replace("seed = 7\n", "")).unwrap();
        match c.validate() {
            Err(Error::InvalidConfig(fields)) => {
                assert!(fields.iter().any(|f| f.starts_with("seed")), "{fields:?}")
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn all_offenders_listed() {
        let mut c = ExperimentConfig::new(ExperimentKind::MzSaturation);
        c.mode = Mode::Sampled;
        c.parameters.gamma_over_theta = Some(Grid::List(vec![1.0, 2.0]));
        let Err(Error::InvalidConfig(fields)) = c.validate() else {
            panic!("expected invalid config");
        };
        let joined = fields.join("\n");
        for name in [
            "parameters.phi",
            "gamma_over_theta",
            "shots",
            "trials",
            "seed",
        ] {
            assert!(joined.contains(name), "{name} missing from {joined}");
        }
    }

    #[test]
    fn grid_forms() {
        let g: Grid = toml::from_str::<Parameters>("t = { start = 0.0, stop = 1.0, points = 5 }")
            .unwrap()
            .t
            .unwrap();
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g: Grid = toml::from_str::<Parameters>("t = [3.0, 1.0]")
            .unwrap()
            .t
            .unwrap();
        assert_eq!(g.values(), vec![3.0, 1.0]);
    }

    #[test]
    fn echo_round_trips() {
        let c = ExperimentConfig::from_toml(P0).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn oscillation_regime_checked() {
        let mut c = ExperimentConfig::new(ExperimentKind::Oscillation);
        c.parameters.theta = Some(0.1);
        c.parameters.gamma = Some(0.2);
        c.parameters.t = Some(Grid::List(vec![0.0]));
        assert!(c.validate().is_err());
        c.parameters.gamma = Some(0.05);
        c.validate().unwrap();
        c.parameters.phi = Some(0.1);
        assert!(c.validate().is_err());
    }
}
