use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "nhsim",
    version,
    about = "Post-selected non-Hermitian qubit simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues, eigenvectors and regime of the two-level effective Hamiltonian.
    Spectrum(SpectrumArgs),
    /// Locate an exceptional point numerically.
    EpFind(EpFindArgs),
    /// Run an experiment config and write its CSV table.
    Run(RunArgs),
    /// The four eigenenergies of the two-qubit coupling model.
    Ep4(Ep4Args),
    /// Closed-form <sigma_z>(t) below the exceptional point.
    Oscillation(OscillationArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Human,
    Csv,
}

/// Decay rate, given directly or as the ancilla coupling angle.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DecayArgs {
    /// Decay rate Gamma.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Ancilla coupling angle phi (Gamma = phi^2 / 8).
    #[arg(long)]
    pub phi: Option<f64>,
}

impl DecayArgs {
    pub fn gamma(&self) -> f64 {
        match (self.gamma, self.phi) {
            (Some(g), _) => g,
            (None, Some(phi)) => phi * phi / 8.0,
            (None, None) => unreachable!("clap enforces the group"),
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub theta: f64,
    #[command(flatten)]
    pub decay: DecayArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Scan Gamma for fixed theta (second-order point).
    TwoLevel,
    /// Scan a = b for the two-qubit model (fourth-order point).
    TwoQubit,
}

#[derive(Debug, Args)]
pub struct EpFindArgs {
    #[arg(long, value_enum, default_value = "two-level")]
    pub model: Model,
    /// Rotation angle (two-level model).
    #[arg(long, required_if_eq("model", "two-level"))]
    pub theta: Option<f64>,
    /// Decay rate (two-qubit model).
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Lower end of the scanned range [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    /// Upper end of the scanned range [default: 2 theta, or 0.8 for two-qubit].
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    /// Largest eigenvalue cluster diameter accepted as an EP.
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML experiment config.
    #[arg(long)]
    pub config: PathBuf,
    /// Output path, overriding the config's `output`.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed, overriding the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct Ep4Args {
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Initial {
    Zero,
    One,
    Mixed,
}

#[derive(Debug, Args)]
pub struct OscillationArgs {
    #[arg(long)]
    pub theta: f64,
    #[command(flatten)]
    pub decay: DecayArgs,
    /// Times in cycles, comma separated.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub t: Vec<f64>,
    #[arg(long, value_enum, default_value = "zero")]
    pub initial: Initial,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}
