//! `pqcm` — command-line front end for the pqcm-core toolkit.
//!
//! Every subcommand reads JSON, writes a JSON report (and a manifest) into
//! the output directory, and communicates verdicts through exit codes:
//!
//! - `0`  success / affirmative verdict
//! - `10` domain-negative verdict (dependent set, infeasible γ, impossible
//!   cloner)
//! - `2`  input or config error
//! - `1`  internal error
//!
//! Reports contain no timestamps, so a rerun with the same seed and inputs
//! is byte-identical; wall-clock data lives in the manifest only.

use clap::{Args, Parser, Subcommand, ValueEnum};
use pqcm_core::audit::{run_signalling_audit, trials_to_csv, AuditConfig, ClonerMode};
use pqcm_core::bloch::common_amplitude_basis;
use pqcm_core::cloning::{clone_feasibility, impossibility_certificate, max_equal_gamma};
use pqcm_core::discrimination::{optimize_usd, UsdObjective};
use pqcm_core::ensemble::{PhaseEnsembleSpec, PhasePoint};
use pqcm_core::independence::{
    is_linearly_independent, phase_determinant, two_copy_independence,
};
use pqcm_core::io::{EnsembleFile, StateFile, StateInput};
use pqcm_core::rsp::{
    enumerate_rsp_outcomes, run_rsp, run_rsp_real_qubit, SharedEntangledState,
};
use pqcm_core::state::PureState;
use pqcm_core::{Error as CoreError, PureState64};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

const EXIT_OK: i32 = 0;
const EXIT_INTERNAL: i32 = 1;
const EXIT_INPUT: i32 = 2;
const EXIT_NEGATIVE: i32 = 10;

#[derive(Parser)]
#[command(name = "pqcm", version, about = "Probabilistic-cloning and no-signalling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Directory for the report, manifest, and auxiliary files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Stdout payload format (`csv` only where a tabular form exists).
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Average,
    WorstCase,
}

#[derive(Subcommand)]
enum Command {
    /// Rank test (and, for ensemble inputs, the phase-determinant test).
    CheckIndependence {
        /// State file or ensemble file (JSON).
        #[arg(long)]
        input: PathBuf,
        /// Relative rank tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Rescale non-normalized state vectors instead of rejecting them.
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cloning feasibility, maximal equal γ, or the impossibility
    /// certificate for (d+1)-state sets.
    CloneFeasibility {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated success probabilities to test.
        #[arg(long, value_delimiter = ',', conflicts_with = "max_equal")]
        gamma: Option<Vec<f64>>,
        /// Find the largest uniform feasible γ instead.
        #[arg(long)]
        max_equal: bool,
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Optimize unambiguous discrimination of the input states.
    Usd {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated priors (default uniform).
        #[arg(long, value_delimiter = ',')]
        priors: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Average)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run or enumerate remote state preparation.
    Rsp {
        /// Schmidt coefficients of the shared state.
        #[arg(long, value_delimiter = ',', required_unless_present = "real_target")]
        alpha: Option<Vec<f64>>,
        /// Target phases (radians), one per Schmidt coefficient.
        #[arg(long, value_delimiter = ',', required_unless_present = "real_target")]
        phases: Option<Vec<f64>>,
        /// Deterministically iterate every measurement outcome.
        #[arg(long)]
        enumerate: bool,
        /// Number of sampled runs (ignored with --enumerate).
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Real amplitudes of a qubit target for the 1-ebit/1-cbit variant.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["alpha", "phases", "enumerate"])]
        real_target: Option<Vec<f64>>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Common-amplitude-basis decomposition of three qubit states.
    Circle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Two-copy independence check for a (d+1)-state set.
    TwoCopy {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Full signalling audit from a config file.
    Audit {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Wall-clock and provenance record written next to every report.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    config_path: Option<String>,
    seed: Option<u64>,
    tool_version: String,
    started_at: String,
    finished_at: String,
    outputs: Vec<String>,
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::NotIndependent(_)
            | CoreError::Infeasible { .. }
            | CoreError::NotABasis => EXIT_NEGATIVE,
            CoreError::InvalidState
            | CoreError::InvalidDimension(_)
            | CoreError::DimensionMismatch(_, _)
            | CoreError::InvalidArgument(_)
            | CoreError::DegenerateTriple(_, _)
            | CoreError::InvalidShape { .. }
            | CoreError::PreconditionFailed(_)
            | CoreError::NotInEnsemble(_)
            | CoreError::NotRealAmplitude(_)
            | CoreError::UnsupportedDimension(_, _)
            | CoreError::ConfigError(_)
            | CoreError::EmptyData => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(format!("io error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::input(format!("malformed JSON: {e}"))
    }
}

fn main() {
    let cli = Cli::parse();
    let started_at = chrono::Utc::now().to_rfc3339();
    let outcome = std::panic::catch_unwind(move || dispatch(cli.command, started_at));
    match outcome {
        Ok(Ok(code)) => std::process::exit(code),
        Ok(Err(e)) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
        Err(_) => std::process::exit(EXIT_INTERNAL),
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn load_states(path: &Path, normalize: bool) -> Result<(Vec<PureState64>, Option<EnsembleFile<f64>>), CliError> {
    let text = read_to_string(path)?;
    let input: StateInput<f64> = serde_json::from_str(&text)?;
    match input {
        StateInput::Raw(file) => Ok((file.to_states(normalize)?, None)),
        StateInput::Ensemble(file) => Ok((file.states()?, Some(file))),
    }
}

fn write_outputs(
    common: &CommonArgs,
    command: &str,
    config_path: Option<&Path>,
    seed: Option<u64>,
    started_at: String,
    report_json: &str,
    extra: &[(String, String)],
) -> Result<(), CliError> {
    std::fs::create_dir_all(&common.out)?;
    let report_path = common.out.join(format!("{command}-report.json"));
    std::fs::write(&report_path, report_json)?;
    let mut outputs = vec![report_path.display().to_string()];
    for (name, contents) in extra {
        let path = common.out.join(name);
        std::fs::write(&path, contents)?;
        outputs.push(path.display().to_string());
    }
    let manifest_path = common.out.join(format!("{command}-manifest.json"));
    outputs.push(manifest_path.display().to_string());
    let manifest = RunManifest {
        command: command.to_string(),
        config_path: config_path.map(|p| p.display().to_string()),
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_at,
        finished_at: chrono::Utc::now().to_rfc3339(),
        outputs,
    };
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

fn to_pretty<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn dispatch(command: Command, started_at: String) -> Result<i32, CliError> {
    match command {
        Command::CheckIndependence {
            input,
            tol,
            normalize,
            common,
        } => cmd_check_independence(&input, tol, normalize, &common, started_at),
        Command::CloneFeasibility {
            input,
            gamma,
            max_equal,
            normalize,
            common,
        } => cmd_clone_feasibility(&input, gamma, max_equal, normalize, &common, started_at),
        Command::Usd {
            input,
            priors,
            objective,
            seed,
            normalize,
            common,
        } => cmd_usd(&input, priors, objective, seed, normalize, &common, started_at),
        Command::Rsp {
            alpha,
            phases,
            enumerate,
            trials,
            seed,
            real_target,
            common,
        } => cmd_rsp(alpha, phases, enumerate, trials, seed, real_target, &common, started_at),
        Command::Circle {
            input,
            normalize,
            common,
        } => cmd_circle(&input, normalize, &common, started_at),
        Command::TwoCopy {
            input,
            normalize,
            common,
        } => cmd_two_copy(&input, normalize, &common, started_at),
        Command::Audit { config, common } => cmd_audit(&config, &common, started_at),
    }
}

#[derive(Serialize)]
struct IndependenceReport {
    independent: bool,
    min_singular_value: f64,
    max_singular_value: f64,
    tolerance_used: f64,
    singular_values: Vec<f64>,
    /// Present when the input was an ensemble file with a square system.
    phase_determinant: Option<[f64; 2]>,
    determinant_modulus: Option<f64>,
    determinant_agrees: Option<bool>,
}

fn cmd_check_independence(
    input: &Path,
    tol: f64,
    normalize: bool,
    common: &CommonArgs,
    started_at: String,
) -> Result<i32, CliError> {
    let (states, ensemble) = load_states(input, normalize)?;
    let verdict = is_linearly_independent(&states, tol)?;

    let mut det_pair = None;
    let mut det_mod = None;
    let mut det_agrees = None;
    if let Some(file) = &ensemble {
        let points = file.phase_points()?;
        if points.len() == points[0].dim() {
            let det = phase_determinant(&points)?;
            det_pair = Some([det.re, det.im]);
            det_mod = Some(det.norm());
            det_agrees = Some((det.norm() > 1e-9) == verdict.independent);
        }
    }

    let report = IndependenceReport {
        independent: verdict.independent,
        min_singular_value: verdict.min_singular_value,
        max_singular_value: verdict.max_singular_value,
        tolerance_used: verdict.tolerance_used,
        singular_values: verdict.singular_values.clone(),
        phase_determinant: det_pair,
        determinant_modulus: det_mod,
        determinant_agrees: det_agrees,
    };
    let json = to_pretty(&report)?;
    print!("{json}");
    write_outputs(common, "check-independence", Some(input), None, started_at, &json, &[])?;
    Ok(if verdict.independent { EXIT_OK } else { EXIT_NEGATIVE })
}

#[derive(Serialize)]
#[serde(untagged)]
enum FeasibilityReport {
    MaxEqual {
        max_equal_gamma: f64,
        states: usize,
    },
    Verdict(pqcm_core::CloningFeasibility64),
    Impossible {
        verdict: &'static str,
        certificate: pqcm_core::ImpossibilityCertificate64,
    },
}

fn cmd_clone_feasibility(
    input: &Path,
    gamma: Option<Vec<f64>>,
    max_equal: bool,
    normalize: bool,
    common: &CommonArgs,
    started_at: String,
) -> Result<i32, CliError> {
    let (states, _) = load_states(input, normalize)?;
    let dim = states[0].dim();

    // A (d+1)-state set is the impossibility regime: emit the certificate.
    let (report, code) = if states.len() == dim + 1 {
        let certificate = impossibility_certificate(&states)?;
        (
            FeasibilityReport::Impossible {
                verdict: "probabilistic exact cloning impossible",
                certificate,
            },
            EXIT_NEGATIVE,
        )
    } else if max_equal {
        let g = max_equal_gamma(&states)?;
        (
            FeasibilityReport::MaxEqual {
                max_equal_gamma: g,
                states: states.len(),
            },
            EXIT_OK,
        )
    } else {
        let gammas = gamma.ok_or_else(|| {
            CliError::input("pass --gamma g1,g2,... or --max-equal (or a (d+1)-state set)")
        })?;
        let verdict = clone_feasibility(&states, &gammas)?;
        let code = if verdict.feasible { EXIT_OK } else { EXIT_NEGATIVE };
        (FeasibilityReport::Verdict(verdict), code)
    };

    let json = to_pretty(&report)?;
    print!("{json}");
    write_outputs(common, "clone-feasibility", Some(input), None, started_at, &json, &[])?;
    Ok(code)
}

fn cmd_usd(
    input: &Path,
    priors: Option<Vec<f64>>,
    objective: ObjectiveArg,
    seed: u64,
    normalize: bool,
    common: &CommonArgs,
    started_at: String,
) -> Result<i32, CliError> {
    let (states, _) = load_states(input, normalize)?;
    let objective = match objective {
        ObjectiveArg::Average => UsdObjective::Average,
        ObjectiveArg::WorstCase => UsdObjective::WorstCase,
    };
    let result = optimize_usd(&states, priors.as_deref(), objective, seed)?;
    let json = to_pretty(&result)?;
    print!("{json}");
    write_outputs(common, "usd", Some(input), Some(seed), started_at, &json, &[])?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RspReport {
    dim: usize,
    cbits_sent: f64,
    transcripts: Vec<pqcm_core::RspTranscript64>,
    /// Final states in the raw state-file schema, re-readable as input.
    final_states: StateFile<f64>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_rsp(
    alpha: Option<Vec<f64>>,
    phases: Option<Vec<f64>>,
    enumerate: bool,
    trials: usize,
    seed: u64,
    real_target: Option<Vec<f64>>,
    common: &CommonArgs,
    started_at: String,
) -> Result<i32, CliError> {
    let mut runs = Vec::new();
    let dim;
    if let Some(target) = real_target {
        let state = PureState::from_real(&target)?;
        dim = state.dim();
        for t in 0..trials.max(1) as u64 {
            runs.push(run_rsp_real_qubit(&state, seed.wrapping_add(t))?);
        }
    } else {
        let alpha = alpha.ok_or_else(|| CliError::input("--alpha is required"))?;
        let phases = phases.ok_or_else(|| CliError::input("--phases is required"))?;
        let spec = PhaseEnsembleSpec::new(alpha)?;
        dim = spec.dim();
        let shared = SharedEntangledState::new(spec)?;
        let target = PhasePoint::new(phases);
        if enumerate {
            runs = enumerate_rsp_outcomes(&shared, &target)?;
        } else {
            for t in 0..trials.max(1) as u64 {
                runs.push(run_rsp(&shared, &target, seed.wrapping_add(t))?);
            }
        }
    }

    let final_states: Vec<PureState64> = runs.iter().map(|(s, _)| s.clone()).collect();
    let transcripts: Vec<pqcm_core::RspTranscript64> =
        runs.into_iter().map(|(_, t)| t).collect();
    let report = RspReport {
        dim,
        cbits_sent: transcripts[0].cbits_sent,
        final_states: StateFile::from_states(&final_states)?,
        transcripts,
    };

    match common.format {
        OutputFormat::Json => {
            let json = to_pretty(&report)?;
            print!("{json}");
            write_outputs(common, "rsp", None, Some(seed), started_at, &json, &[])?;
        }
        OutputFormat::Csv => {
            let mut csv = String::from("outcome,cbits_sent,final_fidelity\n");
            for t in &report.transcripts {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    t.outcome, t.cbits_sent, t.final_fidelity
                ));
            }
            print!("{csv}");
            let json = to_pretty(&report)?;
            write_outputs(
                common,
                "rsp",
                None,
                Some(seed),
                started_at,
                &json,
                &[("rsp-transcripts.csv".to_string(), csv)],
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_circle(
    input: &Path,
    normalize: bool,
    common: &CommonArgs,
    started_at: String,
) -> Result<i32, CliError> {
    let (states, _) = load_states(input, normalize)?;
    if states.len() != 3 {
        return Err(CliError::input(format!(
            "field `states` must hold exactly 3 qubit states, got {}",
            states.len()
        )));
    }
    let decomposition = common_amplitude_basis(&states[0], &states[1], &states[2])?;
    let json = to_pretty(&decomposition)?;
    print!("{json}");
    write_outputs(common, "circle", Some(input), None, started_at, &json, &[])?;
    Ok(EXIT_OK)
}

fn cmd_two_copy(
    input: &Path,
    normalize: bool,
    common: &CommonArgs,
    started_at: String,
) -> Result<i32, CliError> {
    let (states, _) = load_states(input, normalize)?;
    let verdict = two_copy_independence(&states)?;
    let json = to_pretty(&verdict)?;
    print!("{json}");
    write_outputs(common, "two-copy", Some(input), None, started_at, &json, &[])?;
    Ok(if verdict.independent { EXIT_OK } else { EXIT_NEGATIVE })
}

/// On-disk audit config: `{"dim", "alpha", "message_states", "trials",
/// "seed", "cloner_mode"}` with phases in radians.
#[derive(Deserialize)]
struct AuditConfigFile {
    dim: usize,
    alpha: Vec<f64>,
    message_states: Vec<Vec<f64>>,
    trials: usize,
    seed: u64,
    cloner_mode: ClonerMode,
}

fn cmd_audit(config: &Path, common: &CommonArgs, started_at: String) -> Result<i32, CliError> {
    let text = read_to_string(config)?;
    let file: AuditConfigFile = serde_json::from_str(&text)?;
    let cfg = AuditConfig {
        dim: file.dim,
        spec: PhaseEnsembleSpec::new(file.alpha)
            .map_err(|e| CliError::input(format!("field `alpha`: {e}")))?,
        message_states: file.message_states.into_iter().map(PhasePoint::new).collect(),
        trials: file.trials,
        seed: file.seed,
        cloner_mode: file.cloner_mode,
    };
    let (report, trials) = run_signalling_audit(&cfg)?;
    let json = to_pretty(&report)?;
    let csv = trials_to_csv(&trials);

    match common.format {
        OutputFormat::Json => println!(
            "classical cost {:.6} bits | conditional info {:.6} bits | violation = {}",
            report.classical_cost_bits, report.conditional_info_bits, report.violation
        ),
        OutputFormat::Csv => print!("{csv}"),
    }
    write_outputs(
        common,
        "audit",
        Some(config),
        Some(cfg.seed),
        started_at,
        &json,
        &[("audit-trials.csv".to_string(), csv)],
    )?;
    Ok(EXIT_OK)
}
