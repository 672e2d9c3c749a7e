//! Argument parsing and subcommand dispatch.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation error, 3 selftest or
//! acceptance failure. The resolved configuration, seeds included, is
//! echoed to standard error on every run so standard output stays
//! machine-readable.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use renewal_core::adversary::{self, Budgets, Scheme, StageState};
use renewal_core::path::sample_path;
use renewal_core::{LawSpec, RenewalLaw, SchemeConfig, SchemeKind, StartMode};
use serde_json::json;

use crate::audit::{AdversaryRun, StageAuditDoc};
use crate::config::{parse_law, ExperimentConfig};
use crate::experiment::run_experiment;
use crate::report::{emit_report, Format};
use crate::{dump, selftest};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_FAILURE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "renewal", version, about = "Universal residual-time estimators for binary renewal processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the mean, renewal probability, tails and conditional residual means of a law.
    LawInfo(LawInfoArgs),
    /// Generate a path and write it as a 0/1 line with a JSON sidecar.
    Simulate(SimulateArgs),
    /// Run a seeded Monte Carlo experiment and emit the scored events.
    Evaluate(EvaluateArgs),
    /// Build adversarial stages against a scheme and verify them.
    Adversary(AdversaryArgs),
    /// Run the built-in oracle and invariant checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Stationary,
    Renewal,
}

impl From<ModeArg> for StartMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Stationary => StartMode::Stationary,
            ModeArg::Renewal => StartMode::AtRenewal,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Poly,
    Log,
    Offline,
    Eps,
}

impl From<SchemeArg> for SchemeKind {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Poly => SchemeKind::Poly,
            SchemeArg::Log => SchemeKind::Log,
            SchemeArg::Offline => SchemeKind::Offline,
            SchemeArg::Eps => SchemeKind::Eps,
        }
    }
}

#[derive(Debug, Args)]
struct LawInfoArgs {
    /// Law as inline JSON or a path to a JSON file.
    #[arg(long)]
    law: Option<String>,
    /// Experiment config to take the law from.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    law: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Last position `N`; the path covers `0..=N`.
    #[arg(long)]
    length: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Dump file; the sidecar goes to `<out>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    law: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    length: Option<usize>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Declared moment exponent; only used to warn about `gamma`.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AdversaryArgs {
    #[arg(long, value_enum, default_value = "poly")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 0.3)]
    gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fresh-seed replicates for verification.
    #[arg(long, default_value_t = 10_000)]
    replicates: usize,
    /// Largest horizon considered by the search.
    #[arg(long, default_value_t = 1 << 16)]
    length: usize,
    /// Number of stages to build on top of the initial law.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    stages: u8,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Validation(String),
    Failed,
}

type Outcome = Result<(), Failure>;

fn validation(e: impl std::fmt::Display) -> Failure {
    Failure::Validation(e.to_string())
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::LawInfo(a) => law_info(a, out, err),
        Command::Simulate(a) => simulate(a, out, err),
        Command::Evaluate(a) => evaluate(a, out, err),
        Command::Adversary(a) => adversary_cmd(a, out, err),
        Command::Selftest(a) => selftest_cmd(a, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Validation(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_VALIDATION
        }
        Err(Failure::Failed) => EXIT_FAILURE,
    }
}

fn emit(bytes: &[u8], target: &Option<PathBuf>, out: &mut dyn Write) -> Outcome {
    match target {
        Some(path) => fs::write(path, bytes).map_err(|e| validation(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(bytes).map_err(|e| validation(format!("cannot write output: {e}"))),
    }
}

fn echo(err: &mut dyn Write, value: &serde_json::Value) {
    let _ = writeln!(err, "config: {value}");
}

fn load_config(path: &Option<PathBuf>) -> Result<Option<ExperimentConfig>, Failure> {
    path.as_deref()
        .map(ExperimentConfig::from_file)
        .transpose()
        .map_err(validation)
}

fn resolve_law(law: &Option<String>, config: Option<&ExperimentConfig>) -> Result<LawSpec, Failure> {
    match (law, config) {
        (Some(arg), _) => parse_law(arg).map_err(validation),
        (None, Some(c)) => Ok(c.law.clone()),
        (None, None) => Err(Failure::Usage("a law is required: pass --law or --config".into())),
    }
}

fn build(spec: &LawSpec) -> Result<RenewalLaw, Failure> {
    spec.build().map_err(|e| validation(format!("invalid law: {e}")))
}

/// The law-info text.
pub fn law_report(law: &RenewalLaw) -> String {
    let mut s = String::new();
    let k = law.support_max();
    s += &format!("law: {}\n", law.provenance());
    s += &format!("support max K = {k}\n");
    s += &format!("mu = {}\n", law.mean());
    s += &format!("P(X_0=0) = 1/(1+mu) = {}\n", law.kac_zero_prob());
    let tails: Vec<String> = (0..10).map(|l| law.tail(l).to_string()).collect();
    s += &format!("tails T_0..T_9 = {}\n", tails.join(" "));
    s += "L\tT_L\tmu_L\n";
    for l in 0..=k.min(20) {
        match law.mu_l(l) {
            Ok(mu) => s += &format!("{l}\t{}\t{mu}\n", law.tail(l)),
            Err(_) => s += &format!("{l}\t0\tunreachable\n"),
        }
    }
    s
}

fn law_info(a: LawInfoArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let config = load_config(&a.config)?;
    let spec = resolve_law(&a.law, config.as_ref())?;
    echo(err, &json!({ "command": "law-info", "law": spec }));
    let law = build(&spec)?;
    emit(law_report(&law).as_bytes(), &a.out, out)
}

fn simulate(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let config = load_config(&a.config)?;
    let spec = resolve_law(&a.law, config.as_ref())?;
    let seed = a.seed.or(config.as_ref().map(|c| c.seed)).unwrap_or(0);
    let length = a.length.or(config.as_ref().map(|c| c.length)).unwrap_or(1000);
    let mode = a.mode.map(StartMode::from).or(config.as_ref().map(|c| c.mode)).unwrap_or(StartMode::Stationary);
    echo(err, &json!({ "command": "simulate", "law": spec, "seed": seed, "length": length, "mode": mode }));
    let law = build(&spec)?;
    let path = sample_path(&law, length, mode, seed);
    match &a.out {
        Some(file) => {
            let side = dump::write_dump(&path, &spec, file).map_err(validation)?;
            let _ = writeln!(err, "wrote {} and {}", file.display(), side.display());
            Ok(())
        }
        None => {
            let text = dump::bits_line(&path.bits) + &dump::sidecar_json(&path, &spec) + "\n";
            emit(text.as_bytes(), &None, out)
        }
    }
}

fn evaluate(a: EvaluateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let base = load_config(&a.config)?;
    let law = resolve_law(&a.law, base.as_ref())?;
    let mut c = base.unwrap_or_else(|| ExperimentConfig::new(law.clone(), SchemeKind::Poly, 10_000, 1, 0));
    c.law = law;
    if let Some(s) = a.scheme {
        c.scheme = s.into();
    }
    if let Some(v) = a.seed {
        c.seed = v;
        c.replicate_seeds = None;
    }
    if let Some(v) = a.replicates {
        c.replicates = v;
        c.replicate_seeds = None;
    }
    if let Some(v) = a.length {
        c.length = v;
    }
    if let Some(v) = a.gamma {
        c.params.gamma = v;
    }
    if let Some(v) = a.epsilon {
        c.params.epsilon = v;
    }
    if a.alpha.is_some() {
        c.params.declared_alpha = a.alpha;
    }
    if let Some(m) = a.mode {
        c.mode = m.into();
    }
    let seeds: Vec<u64> = (0..c.replicates).map(|r| c.replicate_seed(r)).collect();
    echo(err, &json!({ "command": "evaluate", "config": c, "replicate_seeds": seeds }));
    let (_, warnings) = c.validate().map_err(validation)?;
    for w in &warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let report = run_experiment(&c).map_err(validation)?;
    emit(&emit_report(&report, a.format), &a.out, out)
}

fn adversary_cmd(a: AdversaryArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let params = SchemeConfig {
        gamma: a.gamma,
        epsilon: a.epsilon,
        declared_alpha: a.alpha,
    };
    let kind = SchemeKind::from(a.scheme);
    let warnings = params.validate(kind).map_err(validation)?;
    if a.replicates < 100 {
        return Err(validation("verification needs at least 100 replicates"));
    }
    let budgets = Budgets {
        max_horizon: a.length,
        seed: a.seed,
        ..Budgets::default()
    };
    let verify_seed = renewal_core::rng::derive_seed(a.seed, u64::MAX);
    let config = json!({
        "command": "adversary",
        "scheme": kind,
        "params": params,
        "stages": a.stages,
        "budgets": budgets,
        "verify_replicates": a.replicates,
        "verify_seed": verify_seed,
    });
    echo(err, &config);
    for w in &warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let scheme = Scheme { kind, config: params };
    let mut state: StageState = adversary::stage0(60).map_err(validation)?;
    let mut error = None;
    for _ in 0..a.stages {
        match adversary::advance_stage(&state, &scheme, &budgets) {
            Ok(next) => state = next,
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
    }
    let verify = if state.stage > 0 {
        Some(adversary::verify_stage(&state, &scheme, a.replicates, verify_seed).map_err(validation)?)
    } else {
        None
    };
    let _ = writeln!(err, "reached stage {} with markers {:?}", state.stage, state.markers);
    if let Some(e) = &error {
        let _ = writeln!(err, "stopped: {e}");
    }
    if let Some(v) = &verify {
        let _ = writeln!(err, "joint fooling {:.4} ci [{:.4}, {:.4}]", v.joint_fooling.est, v.joint_fooling.ci.0, v.joint_fooling.ci.1);
        for c in &v.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(err, "{tag} {} measured={} bound={}", c.name, c.measured, c.bound);
        }
    }
    let ok = error.is_none() && verify.as_ref().is_some_and(|v| v.all_pass());
    let run = AdversaryRun {
        config,
        stages: StageAuditDoc::all(&state),
        verify,
        error,
    };
    let mut bytes = serde_json::to_vec(&run).map_err(validation)?;
    bytes.push(b'\n');
    emit(&bytes, &a.out, out)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Failed)
    }
}

fn selftest_cmd(a: SelftestArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    echo(err, &json!({ "command": "selftest", "seed": a.seed }));
    let results = selftest::run_all(a.seed);
    let mut text = String::new();
    for r in &results {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        text += &format!("{tag} {}: {}\n", r.name, r.detail);
    }
    emit(text.as_bytes(), &a.out, out)?;
    if results.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Failed)
    }
}
