//! `exclusion`: command-line front end for the exclusion toolkit.
//!
//! Exit codes: 0 excludable (or success), 3 not excludable, 1 usage or input
//! error, 2 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use exclusion_core::cfs::{cfs_excludable, cfs_from_overlaps, CfsReport};
use exclusion_core::experiments::{
    run_2d_gap, run_equivalence_3x3, run_family_theorem_scan, write_report, ExperimentConfig,
    GridSpec,
};
use exclusion_core::family::{
    build_family_povm, f_lhs, family_states, j3_worst_case, ExcludedPairParams, FamilyParams,
};
use exclusion_core::linalg::{Overlaps, PureState};
use exclusion_core::qcqp::{min_over_assignments, AssignmentResult, FrameAssignment, QcqpSolution};
use exclusion_core::sdp::{
    solve_exclusion_sdp, validate_povm, ExclusionInstance, Povm, SdpSolution, SdpStatus,
    ValidationReport,
};
use exclusion_core::{Error, SCHEMA};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_NOT_EXCLUDABLE: u8 = 3;

const INSTANCE_HINT: &str = r#"expected {"schema": "exclusion/1", "dim": d, "states": [[[re, im], ...], ...], "weights": [...]}"#;

#[derive(Parser)]
#[command(
    name = "exclusion",
    version,
    about = "Decide perfect exclusion of quantum states"
)]
struct Cli {
    /// JSON file with eps_zero, gap_tol, restarts and seed.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the exclusion SDP for an instance file.
    Sdp { instance: PathBuf },
    /// Minimize over projective measurements (all frame assignments).
    Proj { instance: PathBuf },
    /// Evaluate the closed-form criterion for three states in three dimensions.
    Cfs {
        instance: Option<PathBuf>,
        /// Overlap magnitudes |⟨a|b⟩| |⟨a|c⟩| |⟨b|c⟩| instead of an instance file.
        #[arg(long, num_args = 3, value_names = ["J1", "J2", "J3"], conflicts_with = "instance")]
        overlaps: Option<Vec<f64>>,
    },
    /// Build a member of the extremal POVM family and, optionally, the states it excludes.
    Family {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, requires = "c1")]
        b1: Option<f64>,
        #[arg(long, requires = "b1")]
        c1: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        vartheta: f64,
        /// Phase of c₃; defaults to the worst case ϑ + π.
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Run a batch experiment and write summary.json and instances.jsonl.
    Experiment {
        #[arg(long, value_enum)]
        name: ExperimentName,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Defaults to the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Grid points per axis for familyscan.
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Check a POVM file, or the POVM inside `sdp` output.
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentName {
    Equiv3x3,
    Gap2d,
    Familyscan,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CliConfig {
    eps_zero: f64,
    gap_tol: f64,
    restarts: usize,
    seed: u64,
}

impl Default for CliConfig {
    fn default() -> Self {
        let base = ExperimentConfig::default();
        Self {
            eps_zero: base.eps_zero,
            gap_tol: base.sdp.gap_tol,
            restarts: base.qcqp.restarts,
            seed: 0,
        }
    }
}

impl CliConfig {
    fn experiment(&self) -> Result<ExperimentConfig, Failure> {
        let mut cfg = ExperimentConfig {
            eps_zero: self.eps_zero,
            ..ExperimentConfig::default()
        };
        cfg.sdp.gap_tol = self.gap_tol;
        cfg.qcqp.restarts = self.restarts;
        cfg.qcqp.seed = self.seed;
        cfg.validate()
            .map_err(|e| Failure::usage(format!("invalid config: {e}")))?;
        Ok(cfg)
    }
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Numerical(_)) {
            EXIT_NUMERICAL
        } else {
            EXIT_USAGE
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn emit<T: Serialize>(command: &str, body: T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(&Envelope {
        schema: SCHEMA,
        command,
        body,
    })
    .map_err(|e| Failure {
        code: EXIT_NUMERICAL,
        message: format!("cannot serialize output: {e}"),
    })?;
    println!("{text}");
    Ok(())
}

fn verdict_code(excludable: bool) -> u8 {
    if excludable {
        EXIT_OK
    } else {
        EXIT_NOT_EXCLUDABLE
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<ExclusionInstance, Failure> {
    serde_json::from_str(&read_text(path)?).map_err(|e| {
        Failure::usage(format!(
            "malformed instance {}: {e}; {INSTANCE_HINT}",
            path.display()
        ))
    })
}

fn load_config(path: Option<&Path>) -> Result<CliConfig, Failure> {
    let Some(path) = path else {
        return Ok(CliConfig::default());
    };
    let cfg: CliConfig = serde_json::from_str(&read_text(path)?).map_err(|e| {
        Failure::usage(format!(
            "malformed config {}: {e}; expected {{\"eps_zero\", \"gap_tol\", \"restarts\", \"seed\"}}",
            path.display()
        ))
    })?;
    cfg.experiment()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct SdpOutput<'a> {
    eps_zero: f64,
    verdict: Option<bool>,
    #[serde(flatten)]
    solution: &'a SdpSolution,
}

#[derive(Serialize)]
struct ProjOutput<'a> {
    eps_zero: f64,
    verdict: Option<bool>,
    value: f64,
    assignment: &'a FrameAssignment,
    best: &'a QcqpSolution,
    per_assignment: &'a [AssignmentResult],
}

#[derive(Serialize)]
struct CfsOutput {
    eps_zero: f64,
    #[serde(flatten)]
    report: CfsReport,
}

#[derive(Serialize)]
struct PairOutput {
    pair: ExcludedPairParams,
    instance: ExclusionInstance,
    j3_worst_case: f64,
    f: f64,
    kernel_residuals: [f64; 3],
    cfs: CfsReport,
}

#[derive(Serialize)]
struct FamilyOutput {
    params: FamilyParams,
    povm: Povm,
    validation: ValidationReport,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pair: Option<PairOutput>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PovmDocument {
    Solution { povm: Povm },
    Bare(Povm),
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let config = load_config(cli.config.as_deref())?;
    let exp = config.experiment()?;
    let eps = config.eps_zero;

    match cli.command {
        Command::Sdp { instance } => {
            let inst = load_instance(&instance)?;
            let sol = solve_exclusion_sdp(&inst, &exp.sdp)?;
            let verdict = sol.verdict(eps);
            emit(
                "sdp",
                SdpOutput {
                    eps_zero: eps,
                    verdict,
                    solution: &sol,
                },
            )?;
            Ok(match (sol.status, verdict) {
                (SdpStatus::Optimal, Some(v)) => verdict_code(v),
                _ => EXIT_NUMERICAL,
            })
        }
        Command::Proj { instance } => {
            let inst = load_instance(&instance)?;
            let states = inst.pure_states()?;
            let sweep = min_over_assignments(&states, &exp.qcqp)?;
            let verdict = sweep.verdict(eps);
            emit(
                "proj",
                ProjOutput {
                    eps_zero: eps,
                    verdict,
                    value: sweep.value,
                    assignment: &sweep.assignment,
                    best: &sweep.best,
                    per_assignment: &sweep.per_assignment,
                },
            )?;
            Ok(verdict.map_or(EXIT_NUMERICAL, verdict_code))
        }
        Command::Cfs { instance, overlaps } => {
            let report = match (instance, overlaps) {
                (_, Some(j)) => cfs_from_overlaps(
                    Overlaps {
                        j1: j[0],
                        j2: j[1],
                        j3: j[2],
                    },
                    eps,
                )?,
                (Some(path), None) => {
                    let states = load_instance(&path)?.pure_states()?;
                    let [a, b, c] = <[PureState; 3]>::try_from(states).map_err(|s| {
                        Failure::usage(format!("cfs needs exactly 3 states, got {}", s.len()))
                    })?;
                    cfs_excludable(&a, &b, &c, eps)?
                }
                (None, None) => {
                    return Err(Failure::usage(
                        "cfs needs an instance file or --overlaps J1 J2 J3",
                    ))
                }
            };
            let code = verdict_code(report.excludable);
            emit(
                "cfs",
                CfsOutput {
                    eps_zero: eps,
                    report,
                },
            )?;
            Ok(code)
        }
        Command::Family {
            x,
            r,
            theta,
            b1,
            c1,
            vartheta,
            gamma,
        } => {
            let params = FamilyParams::new(x, r, theta)?;
            let povm = build_family_povm(&params);
            let validation = validate_povm(&povm);
            let pair = match (b1, c1) {
                (Some(b1), Some(c1)) => {
                    let q = match gamma {
                        Some(g) => ExcludedPairParams::new(&params, b1, c1, vartheta, g)?,
                        None => ExcludedPairParams::worst_case(&params, b1, c1, vartheta)?,
                    };
                    let states = family_states(&params, &q)?;
                    let kernel_residuals = std::array::from_fn(|k| {
                        povm.elements[k].matrix().mul_vec(states[k].vec()).norm()
                    });
                    let [a, b, c] = &states;
                    Some(PairOutput {
                        pair: q,
                        j3_worst_case: j3_worst_case(&params, b1, c1)?,
                        f: f_lhs(&params, b1, c1)?,
                        kernel_residuals,
                        cfs: cfs_excludable(a, b, c, eps)?,
                        instance: ExclusionInstance::pure(states.to_vec())?,
                    })
                }
                _ => None,
            };
            let code = pair
                .as_ref()
                .map_or(EXIT_OK, |p| verdict_code(p.cfs.excludable));
            emit(
                "family",
                FamilyOutput {
                    params,
                    povm,
                    validation,
                    pair,
                },
            )?;
            Ok(code)
        }
        Command::Experiment {
            name,
            trials,
            seed,
            out,
            points,
        } => {
            let seed = seed.unwrap_or(config.seed);
            match name {
                ExperimentName::Equiv3x3 => {
                    let report = run_equivalence_3x3(trials, seed, &exp)?;
                    write_report(&out, &report, &report.records)?;
                    emit("experiment", &report)?;
                }
                ExperimentName::Gap2d => {
                    let report = run_2d_gap(trials, seed, &exp)?;
                    write_report(&out, &report, &report.records)?;
                    emit("experiment", &report)?;
                }
                ExperimentName::Familyscan => {
                    let report = run_family_theorem_scan(&GridSpec::with_points(points))?;
                    write_report(&out, &report, &report.records)?;
                    emit("experiment", &report)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Validate { file } => {
            let doc: PovmDocument = serde_json::from_str(&read_text(&file)?).map_err(|e| {
                Failure::usage(format!(
                    "malformed POVM {}: {e}; expected {{\"elements\": [matrix, ...]}} or sdp output",
                    file.display()
                ))
            })?;
            let povm = match doc {
                PovmDocument::Solution { povm } | PovmDocument::Bare(povm) => povm,
            };
            let report = validate_povm(&povm);
            let code = if report.valid {
                EXIT_OK
            } else {
                EXIT_NOT_EXCLUDABLE
            };
            emit("validate", report)?;
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
