//! `qaxioms` command-line interface.
//!
//! Exit codes: 0 success, 1 invalid input, 2 inadmissible (singular)
//! operator, 3 numeric-contract violation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::evolution::{evolve_linear_b, evolve_manual_norm_a, evolve_unitary, theorem1_lab, EvolutionOperator};
use crate::linalg::{classify_operator, singular_values, ComplexMatrix, OperatorClass, DEFAULT_CLASSIFY_TOL};
use crate::measurement::{
    born_probabilities_a, born_probabilities_b, sample_measurement, Observable, OutcomeDistribution,
};
use crate::signaling::{
    error_rate_sweep, no_communication_check, run_protocol, sweep_to_tsv, SignalingConfig, DEFAULT_EPSILON,
    DEFAULT_TRIALS,
};
use crate::states::{normalize, AnyState, RawState, UnitState};

/// Cross-formulation agreement demanded of every `measure` run.
const FORMULATION_AGREEMENT_TOL: f64 = 1e-12;
const NO_COMM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// Standard evolution; unitary operators only.
    Unitary,
    /// Any invertible operator on raw vectors, no renormalization.
    LinearB,
    /// Any invertible operator followed by rescaling to unit norm.
    ManualNormA,
}

#[derive(Debug, Parser)]
#[command(
    name = "qaxioms",
    version,
    about = "Unitary vs. linear time evolution in finite-dimensional quantum mechanics"
)]
pub struct CliConfig {
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a matrix as unitary, proportional-unitary, invertible or singular.
    Classify {
        matrix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CLASSIFY_TOL)]
        tol: f64,
    },
    /// Evolve a state through an operator with one of the three engines.
    Evolve {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Unitary)]
        engine: Engine,
    },
    /// Outcome distributions of an observable, optionally with one seeded sample.
    Measure {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Bell-pair signaling with a non-unitary gate on Alice's qubit.
    BellSignal {
        #[arg(long, default_value_t = DEFAULT_EPSILON, allow_negative_numbers = true)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        bit: u8,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random unitary gates on Alice's qubit leave Bob's marginal uniform.
    NoCommCheck {
        #[arg(long, default_value_t = 100)]
        unitaries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sampled and analytic unitarity checks for one operator.
    TheoremCheck {
        matrix: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Transmission error rate as a function of epsilon.
    Sweep {
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"
        )]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    InvalidInput = 1,
    Inadmissible = 2,
    NumericContract = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("failed to write output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Core(Error::SingularOperator(_)) => ExitStatus::Inadmissible,
            CliError::Core(Error::NumericContract(_)) => ExitStatus::NumericContract,
            _ => ExitStatus::InvalidInput,
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn positive(name: &str, value: f64) -> Result<(), CliError> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} must be positive, got {value}")).into());
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn tsv(rows: &[(&str, String)]) -> String {
    let mut out = String::from("key\tvalue\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k}\t{v}");
    }
    out
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn fmt_vector(entries: &[Complex64]) -> String {
    let parts: Vec<String> = entries.iter().map(|&z| fmt_complex(z)).collect();
    format!("({})", parts.join(", "))
}

/// Rendered output plus the exit status it should end with.
struct Rendered {
    text: String,
    status: ExitStatus,
}

impl From<String> for Rendered {
    fn from(text: String) -> Self {
        Rendered {
            text,
            status: ExitStatus::Success,
        }
    }
}

fn cmd_classify(format: Format, path: &Path, tol: f64) -> Result<Rendered, CliError> {
    positive("--tol", tol)?;
    let m: ComplexMatrix = read_json(path)?;
    let class = classify_operator(&m, tol)?;
    let gram = m.adjoint().matmul(&m)?;
    let gram_residual = gram.distance_to_scaled_identity(Complex64::new(1.0, 0.0))?;
    let sv = singular_values(&m);
    let condition = sv[0] / sv[sv.len() - 1];
    let text = match format {
        Format::Json => to_json(&json!({
            "verdict": class.verdict(),
            "class": class,
            "gram_residual": gram_residual,
            "singular_values": sv,
        })),
        Format::Tsv => tsv(&[
            ("verdict", class.verdict().to_string()),
            ("gram_residual", gram_residual.to_string()),
            ("sigma_max", sv[0].to_string()),
            ("sigma_min", sv[sv.len() - 1].to_string()),
        ]),
        Format::Human => {
            let mut out = format!("{}\n", class.verdict());
            let _ = writeln!(out, "  ||U^dagger U - I||_F = {gram_residual:e}");
            let _ = writeln!(out, "  singular values: {sv:?}");
            let _ = writeln!(out, "  condition number: {condition}");
            if let Some(c) = class.scale_modulus() {
                let _ = writeln!(out, "  |c| = {c}");
            }
            let _ = writeln!(out, "  class: {}", serde_json::to_string(&class).expect("serializable"));
            out
        }
    };
    let status = if class.is_singular() {
        ExitStatus::Inadmissible
    } else {
        ExitStatus::Success
    };
    Ok(Rendered { text, status })
}

fn cmd_evolve(format: Format, op_path: &Path, state_path: &Path, engine: Engine) -> Result<Rendered, CliError> {
    let m: ComplexMatrix = read_json(op_path)?;
    let label = op_path.display().to_string();
    let op = EvolutionOperator::new(m, label)?;
    let state: AnyState = read_json(state_path)?;
    let out = match (engine, state) {
        (Engine::Unitary, AnyState::Raw(s)) => AnyState::Raw(evolve_unitary(&s, &op)?),
        (Engine::Unitary, AnyState::Unit(u)) => AnyState::Unit(evolve_unitary(&u, &op)?),
        (Engine::Unitary, AnyState::Ray(r)) => AnyState::Unit(evolve_unitary(&r.to_unit(), &op)?),
        (Engine::LinearB, s) => AnyState::Raw(evolve_linear_b(&RawState::new(s.vector().clone())?, &op)?),
        (Engine::ManualNormA, AnyState::Raw(s)) => AnyState::Unit(evolve_manual_norm_a(&normalize(&s)?, &op)?),
        (Engine::ManualNormA, AnyState::Unit(u)) => AnyState::Unit(evolve_manual_norm_a(&u, &op)?),
        (Engine::ManualNormA, AnyState::Ray(r)) => AnyState::Unit(evolve_manual_norm_a(&r.to_unit(), &op)?),
    };
    let text = match format {
        Format::Json => to_json(&json!({
            "operator_class": op.class(),
            "state": out,
        })),
        Format::Tsv => {
            let mut s = String::from("index\tre\tim\n");
            for (i, z) in out.vector().entries().iter().enumerate() {
                let _ = writeln!(s, "{i}\t{}\t{}", z.re, z.im);
            }
            s
        }
        Format::Human => format!(
            "operator: {}\nresult ({:?}): {}\nnorm: {}\n",
            op.class().verdict(),
            out.representation(),
            fmt_vector(out.vector().entries()),
            crate::linalg::norm(out.vector()),
        ),
    };
    Ok(text.into())
}

fn cmd_measure(format: Format, state_path: &Path, obs_path: &Path, seed: Option<u64>) -> Result<Rendered, CliError> {
    let state: AnyState = read_json(state_path)?;
    let obs: Observable = read_json(obs_path)?;
    let raw = RawState::new(state.vector().clone())?;
    let unit: UnitState = match &state {
        AnyState::Raw(s) => normalize(s)?,
        AnyState::Unit(u) => u.clone(),
        AnyState::Ray(r) => r.to_unit(),
    };
    let dist_a = born_probabilities_a(&unit, &obs)?;
    let dist_b = born_probabilities_b(&raw, &obs)?;
    let gap = dist_a.max_deviation(&dist_b)?;
    if gap > FORMULATION_AGREEMENT_TOL {
        return Err(Error::NumericContract(format!(
            "formulations disagree by {gap:e} (tolerance {FORMULATION_AGREEMENT_TOL:e})"
        ))
        .into());
    }
    let sample = match (seed, &state) {
        (None, _) => None,
        (Some(seed), AnyState::Raw(s)) => {
            let r = sample_measurement(s, &obs, seed)?;
            Some((r.observed_eigenvalue, AnyState::Raw(r.post_state)))
        }
        (Some(seed), _) => {
            let r = sample_measurement(&unit, &obs, seed)?;
            Some((r.observed_eigenvalue, AnyState::Unit(r.post_state)))
        }
    };
    let text = match format {
        Format::Json => {
            let mut v = json!({
                "formulation_a": dist_a,
                "formulation_b": dist_b,
            });
            if let Some((ev, post)) = &sample {
                v["sample"] = json!({
                    "observed_eigenvalue": ev,
                    "post_state": post,
                    "rng_seed_used": seed,
                });
            }
            to_json(&v)
        }
        Format::Tsv => render_distributions_tsv(&dist_a, &dist_b),
        Format::Human => {
            let mut out = String::from("eigenvalue      P_A (unit vectors)      P_B (raw vectors)\n");
            for (a, b) in dist_a.outcomes.iter().zip(&dist_b.outcomes) {
                let _ = writeln!(out, "{:<15} {:<23} {}", a.eigenvalue, a.probability, b.probability);
            }
            if let Some((ev, post)) = &sample {
                let _ = writeln!(
                    out,
                    "sampled outcome: {ev}\npost-measurement state: {}",
                    fmt_vector(post.vector().entries())
                );
            }
            out
        }
    };
    Ok(text.into())
}

fn render_distributions_tsv(a: &OutcomeDistribution, b: &OutcomeDistribution) -> String {
    let mut out = String::from("eigenvalue\tp_a\tp_b\n");
    for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
        let _ = writeln!(out, "{}\t{}\t{}", x.eigenvalue, x.probability, y.probability);
    }
    out
}

fn cmd_bell_signal(format: Format, epsilon: f64, bit: u8, trials: u64, seed: u64) -> Result<Rendered, CliError> {
    let cfg = SignalingConfig::new(epsilon, bit, trials, seed)?;
    let r = run_protocol(&cfg)?;
    let text = match format {
        Format::Json => to_json(&r),
        Format::Tsv => r.to_tsv(),
        Format::Human => {
            let e2 = epsilon * epsilon;
            let b = &r.analytic_bob_distribution;
            let a = &r.manual_norm_bob_distribution;
            let rho = r.reduced_density_unnormalized.matrix();
            let mut out = String::new();
            let _ = writeln!(out, "Alice sends bit {bit} with epsilon = {epsilon}");
            let _ = writeln!(
                out,
                "Bob's reduced density matrix (unnormalized): diag({}, {})",
                rho.get(0, 0).re,
                rho.get(1, 1).re
            );
            let _ = writeln!(
                out,
                "outcome  formula              P_B (raw)            P_A (manual norm)    count"
            );
            let formula = if bit == 0 {
                [1.0 / (1.0 + e2), e2 / (1.0 + e2)]
            } else {
                [e2 / (1.0 + e2), 1.0 / (1.0 + e2)]
            };
            for (k, f) in formula.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{k:<8} {f:<20} {:<20} {:<20} {}",
                    b.outcomes[k].probability, a.outcomes[k].probability, r.empirical_counts[k]
                );
            }
            let _ = writeln!(
                out,
                "error rate: analytic {} (eps^2/(1+eps^2)), empirical {} over {trials} trials (seed {seed})",
                r.analytic_error_rate, r.empirical_error_rate
            );
            out
        }
    };
    Ok(text.into())
}

fn cmd_no_comm(format: Format, unitaries: usize, seed: u64) -> Result<Rendered, CliError> {
    let r = no_communication_check(unitaries, seed)?;
    let text = match format {
        Format::Json => to_json(&r),
        Format::Tsv => tsv(&[
            ("n_unitaries", r.n_unitaries.to_string()),
            ("seed", r.seed.to_string()),
            ("max_marginal_deviation", r.max_marginal_deviation.to_string()),
        ]),
        Format::Human => format!(
            "{} random unitary gates on Alice's qubit\nmax deviation of Bob's marginal from (1/2, 1/2): {:e}\n{}\n",
            r.n_unitaries,
            r.max_marginal_deviation,
            if r.max_marginal_deviation <= NO_COMM_TOL {
                "no communication: Bob's statistics unchanged"
            } else {
                "VIOLATION"
            }
        ),
    };
    if r.max_marginal_deviation > NO_COMM_TOL {
        return Ok(Rendered {
            text,
            status: ExitStatus::NumericContract,
        });
    }
    Ok(text.into())
}

fn cmd_theorem_check(format: Format, path: &Path, samples: usize, seed: u64) -> Result<Rendered, CliError> {
    let m: ComplexMatrix = read_json(path)?;
    let op = EvolutionOperator::new(m, path.display().to_string())?;
    let r = theorem1_lab(&op, samples, seed)?;
    let text = match format {
        Format::Json => to_json(&json!({
            "verdict": r.verdict(),
            "report": r,
        })),
        Format::Tsv => {
            let mut rows = vec![
                ("verdict", r.verdict().to_string()),
                ("class", r.operator_class.verdict().to_string()),
                ("max_unit_norm_deviation", r.max_unit_norm_deviation.to_string()),
                ("polarization_residual", r.polarization_residual.to_string()),
                ("gram_residual", r.gram_residual.to_string()),
            ];
            if let Some(d) = r.witness_deviation {
                rows.push(("witness_deviation", d.to_string()));
            }
            tsv(&rows)
        }
        Format::Human => {
            let mut out = format!("{}\n", r.verdict());
            let _ = writeln!(out, "  class: {}", r.operator_class.verdict());
            let _ = writeln!(
                out,
                "  max | ||U psi|| - 1 | over {} sampled unit vectors: {:e}",
                r.n_samples, r.max_unit_norm_deviation
            );
            let _ = writeln!(out, "  ||U^dagger U - I||_F = {:e}", r.gram_residual);
            let _ = writeln!(
                out,
                "  polarization reconstruction residual: {:e}",
                r.polarization_residual
            );
            if let (Some(w), Some(d)) = (&r.witness, r.witness_deviation) {
                let _ = writeln!(out, "  witness: {}  (| ||U w|| - 1 | = {d})", fmt_vector(w.entries()));
            }
            out
        }
    };
    let status = if matches!(r.operator_class, OperatorClass::Singular) {
        ExitStatus::Inadmissible
    } else {
        ExitStatus::Success
    };
    Ok(Rendered { text, status })
}

fn cmd_sweep(format: Format, epsilons: &[f64], trials: u64, seed: u64) -> Result<Rendered, CliError> {
    let rows = error_rate_sweep(epsilons, trials, seed)?;
    let text = match format {
        Format::Json => to_json(&rows),
        Format::Tsv => sweep_to_tsv(&rows),
        Format::Human => {
            let mut out = String::from("epsilon   analytic error          empirical error\n");
            for r in &rows {
                let _ = writeln!(out, "{:<9} {:<23} {}", r.epsilon, r.analytic_error, r.empirical_error);
            }
            out
        }
    };
    Ok(text.into())
}

/// Runs a parsed command, writing its output to `stdout` unless `--out` is set.
pub fn execute(cli: &CliConfig, stdout: &mut dyn Write) -> Result<ExitStatus, CliError> {
    let f = cli.format;
    let rendered = match &cli.command {
        Command::Classify { matrix, tol } => cmd_classify(f, matrix, *tol)?,
        Command::Evolve {
            operator,
            state,
            engine,
        } => cmd_evolve(f, operator, state, *engine)?,
        Command::Measure {
            state,
            observable,
            seed,
        } => cmd_measure(f, state, observable, *seed)?,
        Command::BellSignal {
            epsilon,
            bit,
            trials,
            seed,
        } => cmd_bell_signal(f, *epsilon, *bit, *trials, *seed)?,
        Command::NoCommCheck { unitaries, seed } => cmd_no_comm(f, *unitaries, *seed)?,
        Command::TheoremCheck { matrix, samples, seed } => cmd_theorem_check(f, matrix, *samples, *seed)?,
        Command::Sweep { epsilons, trials, seed } => cmd_sweep(f, epsilons, *trials, *seed)?,
    };
    match &cli.out {
        Some(path) => fs::write(path, &rendered.text)?,
        None => stdout.write_all(rendered.text.as_bytes())?,
    }
    Ok(rendered.status)
}

/// Parses `args` and runs the command. Usage errors exit with 1, not
/// clap's default 2, which is reserved for singular operators.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match CliConfig::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    ExitStatus::Success
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    ExitStatus::InvalidInput
                }
            };
        }
    };
    match execute(&cli, stdout) {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_status()
        }
    }
}

pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock()).code()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (ExitStatus, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let status = run(
            std::iter::once("qaxioms").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (status, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        let (status, _, err) = run_args(&["no-such-command"]);
        assert_eq!(status, ExitStatus::InvalidInput);
        assert!(!err.is_empty());
        let (status, out, _) = run_args(&["--help"]);
        assert_eq!(status, ExitStatus::Success);
        assert!(out.contains("bell-signal"));
    }

    #[test]
    fn epsilon_out_of_range_exits_one() {
        for eps in ["0", "1", "-0.5", "1.5"] {
            let (status, _, err) = run_args(&["bell-signal", "--epsilon", eps, "--trials", "10"]);
            assert_eq!(status, ExitStatus::InvalidInput, "eps={eps}");
            assert!(err.contains("epsilon"));
        }
    }

    #[test]
    fn exit_status_mapping() {
        assert_eq!(
            CliError::from(Error::SingularOperator("x".into())).exit_status(),
            ExitStatus::Inadmissible
        );
        assert_eq!(
            CliError::from(Error::NumericContract("x".into())).exit_status(),
            ExitStatus::NumericContract
        );
        assert_eq!(
            CliError::from(Error::ZeroVector).exit_status(),
            ExitStatus::InvalidInput
        );
    }

    #[test]
    fn tolerances_must_be_positive() {
        let (status, _, _) = run_args(&["classify", "does-not-matter.json", "--tol", "0"]);
        assert_eq!(status, ExitStatus::InvalidInput);
    }
}
