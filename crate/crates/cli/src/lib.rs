//! Command-line front end. [`run`] parses arguments, executes one command and
//! returns the exit code together with everything that would be printed, so
//! the binary and the tests share one code path.
//!
//! Exit codes: 0 pass, 10 diagnostic-negative, 11 not Nash, 12 oracle
//! mismatch, 2 input error, 3 resource cap, 1 internal numerical failure.

pub mod document;
pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sre_core::diagnostics::{
    classify_deviation, exposed_indifference_sets, sre_membership, DeviationKind,
    DiagnosticConfig, DiagnosticError,
};
use sre_core::gallery::{self, Params};
use sre_core::nash::{nash_support_enumeration, NashError};
use sre_core::oracle::{sample_exposure, OracleError, SamplingConfig};
use sre_core::uncertainty::{box_region, shrinking_diagnostic, u_validity, UncertaintyError};
use sre_core::{PopulationGame, StateVector};
use thiserror::Error;

use document::{load_region, GameDocument};
use report::{ConfigEcho, DiagnosticReport, OracleRow, Payload};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_NEGATIVE: i32 = 10;
pub const EXIT_NOT_NASH: i32 = 11;
pub const EXIT_MISMATCH: i32 = 12;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "SRE_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("resource cap: {0}")]
    Cap(String),
    #[error("numerical failure: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Cap(_) => EXIT_CAP,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<DiagnosticError> for CliError {
    fn from(e: DiagnosticError) -> Self {
        match e {
            DiagnosticError::Game(g) => CliError::Input(g.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<UncertaintyError> for CliError {
    fn from(e: UncertaintyError) -> Self {
        match e {
            UncertaintyError::Lp(_) | UncertaintyError::Unbounded(_) => {
                CliError::Internal(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Diagnostic(d) => d.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sre",
    version,
    about = "State-robust equilibrium diagnostics for affine population games"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Gaps within this band of zero count as ties
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol_zero: f64,
    /// A tie is exposed when its tangent program value exceeds this
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol_psi: f64,
    /// Seed for the sampling oracle
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the machine-readable report instead of tables
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default: SRE_THREADS, else all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct GameArgs {
    /// Game document (JSON)
    #[arg(long, conflicts_with = "gallery", required_unless_present = "gallery")]
    game: Option<PathBuf>,
    /// Built-in example game
    #[arg(long)]
    gallery: Option<String>,
    /// Gallery parameter, e.g. `--param q=3,2,0 --param lambda=2`
    #[arg(long = "param", value_parser = parse_param, requires = "gallery")]
    params: Vec<(String, Vec<f64>)>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct StateArgs {
    /// Named state from the document or gallery entry
    #[arg(long)]
    state: Option<String>,
    /// Explicit coordinates, comma separated, blocks in declaration order
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coords: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full SRE battery at one state
    Check {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Nash candidates by support enumeration
    Nash {
        #[command(flatten)]
        game: GameArgs,
        /// Run the battery on every candidate
        #[arg(long)]
        classify: bool,
        /// Maximum number of support profiles
        #[arg(long, default_value_t = sre_core::nash::DEFAULT_PROFILE_CAP)]
        cap: u64,
    },
    /// Validity of a state over an uncertainty region
    Uvalid {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        region: RegionArgs,
        /// Read the named region from this document instead
        #[arg(long, requires = "region")]
        regions_from: Option<PathBuf>,
    },
    /// Sampling cross-check of the battery
    Oracle {
        #[command(flatten)]
        game: GameArgs,
        #[command(flatten)]
        state: StateArgs,
        /// Samples per radius
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Strictly decreasing sampling radii
        #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-3, 1e-4])]
        radii: Vec<f64>,
    },
    /// Print a gallery game as a document
    Gallery {
        /// One of the built-in names
        name: String,
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, Vec<f64>)>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct RegionArgs {
    /// Named region from the game document, or from --regions-from
    #[arg(long)]
    region: Option<String>,
    /// Sup-norm box of this radius around the state
    #[arg(long = "box")]
    box_radius: Option<f64>,
    /// Shrinking boxes: initial radius and number of halvings
    #[arg(long, num_args = 2, value_names = ["R0", "M"])]
    shrink: Option<Vec<f64>>,
}

fn parse_param(s: &str) -> Result<(String, Vec<f64>), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let values = value
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{key}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((key.trim().to_string(), values))
}

/// What a run prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_PASS,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let threads = cli.global.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
    });
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(CliError::Input(format!("cannot start {n} threads: {e}"))),
        },
        None => execute(&cli),
    };
    match result {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

struct Loaded {
    source: String,
    document: GameDocument,
    game: PopulationGame,
}

fn params_map(params: &[(String, Vec<f64>)]) -> Params {
    params.iter().cloned().collect::<BTreeMap<_, _>>()
}

fn describe_params(params: &Params) -> String {
    params
        .iter()
        .map(|(k, v)| {
            let vs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("{k}={}", vs.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn gallery_document(name: &str, params: &Params) -> Result<GameDocument, CliError> {
    let g = gallery::by_name(name, params).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(GameDocument::from_gallery(&g))
}

fn load(args: &GameArgs) -> Result<Loaded, CliError> {
    let (source, document) = match (&args.game, &args.gallery) {
        (Some(path), _) => (path.display().to_string(), GameDocument::load(path)?),
        (None, Some(name)) => {
            let params = params_map(&args.params);
            let mut source = format!("gallery:{name}");
            if !params.is_empty() {
                source = format!("{source} {}", describe_params(&params));
            }
            (source, gallery_document(name, &params)?)
        }
        (None, None) => return Err(CliError::Input("need --game or --gallery".into())),
    };
    let game = document.to_game()?;
    Ok(Loaded {
        source,
        document,
        game,
    })
}

fn resolve_state(loaded: &Loaded, args: &StateArgs) -> Result<StateVector, CliError> {
    match (&args.state, &args.coords) {
        (Some(name), _) => loaded.document.state(&loaded.game, name),
        (None, Some(coords)) => loaded
            .game
            .state(coords.clone())
            .map_err(|e| CliError::Input(format!("--coords: {e}"))),
        (None, None) => Err(CliError::Input("need --state or --coords".into())),
    }
}

fn diagnostic_config(global: &GlobalArgs) -> Result<DiagnosticConfig, CliError> {
    for (flag, v) in [("--tol-zero", global.tol_zero), ("--tol-psi", global.tol_psi)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(CliError::Input(format!("{flag} must be a nonnegative number")));
        }
    }
    Ok(DiagnosticConfig {
        zero_tol: global.tol_zero,
        psi_tol: global.tol_psi,
        ..DiagnosticConfig::default()
    })
}

fn execute(cli: &Cli) -> Result<(i32, String), CliError> {
    let cfg = diagnostic_config(&cli.global)?;
    let (command, loaded, payload, code) = match &cli.command {
        Command::Gallery { name, params } => {
            let doc = gallery_document(name, &params_map(params))?;
            return Ok((EXIT_PASS, doc.to_json() + "\n"));
        }
        Command::Check { game, state } => {
            let loaded = load(game)?;
            let x = resolve_state(&loaded, state)?;
            let verdict = sre_membership(&loaded.game, &x, &cfg)?;
            let code = match (verdict.is_nash, verdict.is_sre) {
                (_, true) => EXIT_PASS,
                (true, false) => EXIT_NEGATIVE,
                (false, _) => EXIT_NOT_NASH,
            };
            let payload = Payload::Check {
                state: x.into_coords(),
                verdict,
            };
            ("check", loaded, payload, code)
        }
        Command::Nash {
            game,
            classify,
            cap,
        } => {
            let loaded = load(game)?;
            let enumeration = nash_support_enumeration(&loaded.game, cfg.zero_tol, *cap)
                .map_err(|e| match e {
                    NashError::CapExceeded { .. } => CliError::Cap(format!(
                        "{e}; raise --cap, or test specific states with `sre check`"
                    )),
                })?;
            let (verdicts, decomposition) = if *classify {
                let states: Vec<StateVector> =
                    enumeration.candidates.iter().map(|c| c.state.clone()).collect();
                let verdicts = states
                    .iter()
                    .map(|x| sre_membership(&loaded.game, x, &cfg))
                    .collect::<Result<Vec<_>, _>>()?;
                let decomposition = exposed_indifference_sets(&loaded.game, &states, &cfg)?;
                (Some(verdicts), Some(decomposition))
            } else {
                (None, None)
            };
            let payload = Payload::Nash {
                enumeration,
                verdicts,
                decomposition,
            };
            ("nash", loaded, payload, EXIT_PASS)
        }
        Command::Uvalid {
            game,
            state,
            region,
            regions_from,
        } => {
            let loaded = load(game)?;
            let x = resolve_state(&loaded, state)?;
            let (payload, valid) = if let Some(shrink) = &region.shrink {
                let (r0, m) = (shrink[0], shrink[1]);
                if m.fract() != 0.0 || !(1.0..=60.0).contains(&m) {
                    return Err(CliError::Input(
                        "--shrink M must be a whole number between 1 and 60".into(),
                    ));
                }
                let report = shrinking_diagnostic(&loaded.game, &x, r0, m as u32, &cfg)?;
                let valid = report.verdict;
                (
                    Payload::Shrink {
                        state: x.into_coords(),
                        r0,
                        m_max: m as u32,
                        report,
                    },
                    valid,
                )
            } else {
                let (label, poly) = match (&region.box_radius, &region.region) {
                    (Some(r), _) => (format!("box {r}"), box_region(&loaded.game, &x, *r)?),
                    (None, Some(name)) => match regions_from {
                        Some(path) => (
                            format!("{name} from {}", path.display()),
                            load_region(path, name, loaded.game.dim())?,
                        ),
                        None => (name.clone(), loaded.document.region(name)?),
                    },
                    (None, None) => return Err(CliError::Input("need a region".into())),
                };
                let report = u_validity(&loaded.game, &x, &poly, &cfg)?;
                let valid = report.valid;
                (
                    Payload::Uvalid {
                        state: x.into_coords(),
                        region: label,
                        report,
                    },
                    valid,
                )
            };
            let code = if valid { EXIT_PASS } else { EXIT_NEGATIVE };
            ("uvalid", loaded, payload, code)
        }
        Command::Oracle {
            game,
            state,
            samples,
            radii,
        } => {
            let loaded = load(game)?;
            let x = resolve_state(&loaded, state)?;
            let sampling = SamplingConfig {
                radii: radii.clone(),
                samples_per_radius: *samples,
                seed: cli.global.seed,
            };
            let evidence = sample_exposure(&loaded.game, &x, &sampling)?;
            let rows = evidence
                .into_iter()
                .map(|sample| {
                    let v = classify_deviation(&loaded.game, &x, sample.deviation, &cfg)?;
                    let exposed = matches!(
                        v.kind,
                        DeviationKind::ExposedZeroGap | DeviationKind::PositiveGap
                    );
                    Ok(OracleRow {
                        agrees: exposed == sample.evidence.is_exposed(),
                        kind: v.kind,
                        sample,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let agreement = rows.iter().all(|r| r.agrees);
            let code = if agreement { EXIT_PASS } else { EXIT_MISMATCH };
            let payload = Payload::Oracle {
                state: x.into_coords(),
                sampling,
                rows,
                agreement,
            };
            ("oracle", loaded, payload, code)
        }
    };
    let report = DiagnosticReport {
        tool: "sre".into(),
        version: report::VERSION.into(),
        command: command.into(),
        source: loaded.source,
        config: ConfigEcho {
            zero_tol: cfg.zero_tol,
            psi_tol: cfg.psi_tol,
            seed: cli.global.seed,
        },
        labels: loaded
            .game
            .deviations()
            .into_iter()
            .map(|d| (d, loaded.game.label(d)))
            .collect(),
        payload,
    };
    let text = if cli.global.json {
        serde_json::to_string_pretty(&report).expect("reports always serialize") + "\n"
    } else {
        report::render_text(&report)
    };
    Ok((code, text))
}
