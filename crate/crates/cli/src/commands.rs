use std::io::Write;

use nhsim_core::engine::two_level_hamiltonian;
use nhsim_core::experiments::{run_experiment, ExperimentConfig};
use nhsim_core::linalg::min_cluster_diameter;
use nhsim_core::spectral::TwoQubitModelSpec;
use nhsim_core::{
    eigensystem_2level, find_ep, mz_oscillation, two_qubit_eigenenergies, Complex64, InitialState,
    Result,
};

use crate::args::{
    Command, Ep4Args, EpFindArgs, Format, Initial, Model, OscillationArgs, RunArgs, SpectrumArgs,
};

pub fn dispatch(command: Command, out: &mut impl Write) -> Result<()> {
    match command {
        Command::Spectrum(a) => spectrum(&a, out),
        Command::EpFind(a) => ep_find(&a, out),
        Command::Run(a) => run(&a, out),
        Command::Ep4(a) => ep4(&a, out),
        Command::Oscillation(a) => oscillation(&a, out),
    }
}

/// `re+imj` with 17 significant digits in each part.
fn complex(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}j", z.re, z.im)
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv<W: Write>(out: &mut W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn spectrum(a: &SpectrumArgs, out: &mut impl Write) -> Result<()> {
    let gamma = a.decay.gamma();
    let s = eigensystem_2level(a.theta, gamma)?;
    let vec = |k: usize| {
        s.eigenvector(k)
            .into_iter()
            .map(complex)
            .collect::<Vec<_>>()
    };
    let (vp, vm) = (vec(0), vec(1));
    match a.format {
        Format::Human => {
            writeln!(out, "theta        = {}", real(a.theta))?;
            writeln!(out, "gamma        = {}", real(gamma))?;
            writeln!(out, "regime       = {}", s.regime)?;
            writeln!(out, "alpha        = {}", real(s.alpha))?;
            writeln!(out, "defective    = {}", s.defective)?;
            writeln!(out, "lambda_plus  = {}", complex(s.lambda_plus()))?;
            writeln!(out, "lambda_minus = {}", complex(s.lambda_minus()))?;
            writeln!(out, "v_plus       = [{}, {}]", vp[0], vp[1])?;
            writeln!(out, "v_minus      = [{}, {}]", vm[0], vm[1])?;
        }
        Format::Csv => write_csv(
            out,
            &[
                "theta",
                "gamma",
                "regime",
                "alpha",
                "defective",
                "lambda_plus",
                "lambda_minus",
                "v_plus_0",
                "v_plus_1",
                "v_minus_0",
                "v_minus_1",
            ],
            &[vec![
                real(a.theta),
                real(gamma),
                s.regime.label().to_string(),
                real(s.alpha),
                s.defective.to_string(),
                complex(s.lambda_plus()),
                complex(s.lambda_minus()),
                vp[0].clone(),
                vp[1].clone(),
                vm[0].clone(),
                vm[1].clone(),
            ]],
        )?,
    }
    Ok(())
}

fn ep_find(a: &EpFindArgs, out: &mut impl Write) -> Result<()> {
    let (loc, label) = match a.model {
        Model::TwoLevel => {
            let theta = a.theta.expect("required by clap");
            let range = (a.lo.unwrap_or(0.0), a.hi.unwrap_or(2.0 * theta));
            let loc = find_ep(
                |g| Ok(two_level_hamiltonian(theta, g).matrix().clone()),
                range,
                2,
                a.tolerance,
            )?;
            (loc, "gamma")
        }
        Model::TwoQubit => {
            let gamma = a.gamma;
            let range = (a.lo.unwrap_or(0.0), a.hi.unwrap_or(0.8));
            let loc = find_ep(
                |x| {
                    Ok(TwoQubitModelSpec::new(x, x, gamma)?
                        .hamiltonian()
                        .matrix()
                        .clone())
                },
                range,
                4,
                a.tolerance,
            )?;
            (loc, "a")
        }
    };
    match a.format {
        Format::Human => {
            write!(out, "{label} = {}", real(loc.param))?;
            if let (Model::TwoLevel, Some(theta)) = (a.model, a.theta) {
                write!(out, " (gamma/theta = {})", real(loc.param / theta))?;
            }
            writeln!(out, ", gap = {}", real(loc.gap))?;
        }
        Format::Csv => write_csv(
            out,
            &["parameter", "value", "gap"],
            &[vec![label.to_string(), real(loc.param), real(loc.gap)]],
        )?,
    }
    Ok(())
}

fn run(a: &RunArgs, out: &mut impl Write) -> Result<()> {
    let mut config = ExperimentConfig::load(&a.config)?;
    if let Some(p) = &a.output {
        config.output = Some(p.clone());
    }
    if let Some(s) = a.seed {
        config.seed = Some(s);
    }
    let path = config.output_path();
    let result = run_experiment(&config)?;
    writeln!(
        out,
        "wrote {}: {} rows, {} attempts, {:.3?}",
        path.display(),
        result.rows.len(),
        result.attempts,
        result.wall_time
    )?;
    Ok(())
}

fn ep4(a: &Ep4Args, out: &mut impl Write) -> Result<()> {
    let e = two_qubit_eigenenergies(&TwoQubitModelSpec::new(a.a, a.b, a.gamma)?);
    let gap = min_cluster_diameter(&e, 2);
    let labels = ["E(+,+)", "E(+,-)", "E(-,+)", "E(-,-)"];
    match a.format {
        Format::Human => {
            for (l, z) in labels.iter().zip(&e) {
                writeln!(out, "{l}  = {}", complex(*z))?;
            }
            writeln!(out, "min_gap = {}", real(gap))?;
        }
        Format::Csv => {
            let mut row: Vec<String> = e.iter().map(|z| complex(*z)).collect();
            row.push(real(gap));
            write_csv(out, &["e_pp", "e_pm", "e_mp", "e_mm", "min_gap"], &[row])?;
        }
    }
    Ok(())
}

fn oscillation(a: &OscillationArgs, out: &mut impl Write) -> Result<()> {
    let gamma = a.decay.gamma();
    let initial = match a.initial {
        Initial::Zero => InitialState::Zero,
        Initial::One => InitialState::One,
        Initial::Mixed => InitialState::Mixed,
    };
    let rows =
        a.t.iter()
            .map(|&t| {
                Ok(vec![
                    real(t),
                    real(mz_oscillation(a.theta, gamma, t, initial)?),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
    match a.format {
        Format::Human => {
            writeln!(out, "{:>24}  {:>24}", "t", "mz")?;
            for r in &rows {
                writeln!(out, "{:>24}  {:>24}", r[0], r[1])?;
            }
        }
        Format::Csv => write_csv(out, &["t", "mz"], &rows)?,
    }
    Ok(())
}
