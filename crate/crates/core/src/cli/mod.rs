//! Command-line front end. `main` only forwards to [`run`].

mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::closed_form::fmt_rational;
use crate::exec::Exec;
use crate::model::{Mode, NetworkConfig};
use crate::numeric::{run_trials, CheckerKind, DEFAULT_TOL};
use crate::oracle::{formula_pudof, oracle_eta, Guard, OracleError, OracleOptions};
use crate::report::{run_sweep, write_csv, SweepRow, CSV_HEADER};
use crate::schemes::{build_scheme, evaluate};
use crate::witness::WitnessDoc;

pub use config::{load_sweep_config, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Agreement needed for `verify` to succeed.
pub const AGREEMENT_THRESHOLD: f64 = 0.99;

#[derive(Debug, Parser)]
#[command(name = "cellzf", version, about = "Zero-forcing cell association schemes, oracle and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build and check the scheme for one configuration.
    Scheme(SchemeArgs),
    /// Exhaustively search a small network for the optimum.
    Oracle(OracleArgs),
    /// Evaluate schemes (and optionally the oracle) over a parameter grid.
    Sweep(SweepArgs),
    /// Cross-check combinatorial verdicts against random channel realizations.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct NetworkArgs {
    #[arg(long = "K")]
    k: usize,
    #[arg(long = "L")]
    l: usize,
    #[arg(long = "Nc")]
    nc: usize,
    #[arg(long, value_parser = parse_mode)]
    mode: Mode,
}

impl NetworkArgs {
    fn config(&self) -> Result<NetworkConfig, CliError> {
        NetworkConfig::new(self.k, self.l, self.nc).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SchemeArgs {
    #[command(flatten)]
    net: NetworkArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include the association and plans (JSON only).
    #[arg(long)]
    witness: bool,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    net: NetworkArgs,
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Let downlink transmit sets draw on every base station.
    #[arg(long)]
    widen: bool,
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// File of key=value lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "K")]
    k: Option<String>,
    #[arg(long = "L")]
    l: Option<String>,
    #[arg(long = "Nc")]
    nc: Option<String>,
    /// Comma-separated list of modes.
    #[arg(long)]
    modes: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    oracle: Option<bool>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write 0 in the elapsed_ms column.
    #[arg(long)]
    mask_elapsed: bool,
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    net: NetworkArgs,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    sequential: bool,
    /// Compare against a deliberately broken checker.
    #[arg(long, hide = true)]
    tamper: bool,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn exec(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
    Guard(String),
    Verification(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
            CliError::Guard(_) => EXIT_GUARD,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) | CliError::Guard(m) | CliError::Verification(m) => m,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Parse `args` (including the program name), run the command and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Scheme(a) => cmd_scheme(&a, stdout),
        Command::Oracle(a) => cmd_oracle(&a, stdout, stderr),
        Command::Sweep(a) => cmd_sweep(&a, stdout, stderr),
        Command::Verify(a) => cmd_verify(&a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, body: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, body),
        None => stdout.write_all(body).map_err(runtime),
    }
}

fn write_file(path: &Path, body: &[u8]) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn cmd_scheme(a: &SchemeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = a.net.config()?;
    if a.witness && a.format == Format::Csv {
        return Err(CliError::Usage("--witness needs --format json".into()));
    }
    let mode = a.net.mode;
    let scheme = build_scheme(&cfg, mode).map_err(runtime)?;
    let eval = evaluate(&cfg, &scheme).map_err(runtime)?;
    let formula = formula_pudof(cfg.l(), cfg.nc(), mode);
    let body = match a.format {
        Format::Json => {
            let mut v = json!({
                "config": {"K": cfg.k(), "L": cfg.l(), "Nc": cfg.nc()},
                "mode": mode,
                "scheme_eta_dl": eval.eta_downlink(),
                "scheme_eta_ul": eval.eta_uplink(),
                "eta": fmt_rational(&eval.eta),
                "pudof": fmt_rational(&eval.pudof.value()),
                "formula_pudof": fmt_rational(&formula.value()),
                "decode_depth": eval.decode_depth(),
            });
            if a.witness {
                v["witness"] = serde_json::to_value(WitnessDoc::from_scheme(&cfg, &scheme, &eval)).map_err(runtime)?;
            }
            let mut s = serde_json::to_string_pretty(&v).map_err(runtime)?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let row = SweepRow {
                mode,
                k: cfg.k(),
                l: cfg.l(),
                nc: cfg.nc(),
                scheme_eta_dl: eval.eta_downlink(),
                scheme_eta_ul: eval.eta_uplink(),
                scheme_pudof: eval.pudof,
                formula_pudof: formula,
                oracle_eta: None,
                gap: None,
                decode_depth: eval.decode_depth(),
                elapsed_ms: 0,
            };
            let mut buf = Vec::new();
            write_csv(&mut buf, &[row], true).map_err(runtime)?;
            buf
        }
    };
    emit(&a.out, stdout, &body)
}

fn cmd_oracle(a: &OracleArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let cfg = a.net.config()?;
    let opts = OracleOptions {
        guard: Guard { max_nodes: a.max_nodes, ..Guard::default() },
        exec: exec(a.sequential),
        widen_helpers: a.widen,
    };
    let result = oracle_eta(&cfg, a.net.mode, &opts).map_err(|e| match e {
        OracleError::Guard { .. } | OracleError::NodeLimit { .. } => CliError::Guard(e.to_string()),
    })?;
    let _ = writeln!(
        stderr,
        "oracle {} {cfg}: eta {} nodes_explored {} elapsed_ms {}",
        a.net.mode,
        fmt_rational(&result.eta),
        result.nodes_explored,
        result.elapsed.as_millis()
    );
    let mut body = WitnessDoc::from_oracle(&result).to_json();
    body.push('\n');
    emit(&a.out, stdout, body.as_bytes())
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let mut conf = match &a.config {
        Some(path) => load_sweep_config(path).map_err(CliError::Usage)?,
        None => SweepConfig::default(),
    };
    let flags = [
        ("K", a.k.clone()),
        ("L", a.l.clone()),
        ("Nc", a.nc.clone()),
        ("modes", a.modes.clone()),
        ("oracle", a.oracle.map(|o| o.to_string())),
        ("seed", a.seed.map(|s| s.to_string())),
        ("format", a.format.map(|f| if f == Format::Json { "json" } else { "csv" }.to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            conf.set(key, &v).map_err(CliError::Usage)?;
        }
    }
    if a.out.is_some() {
        conf.out = a.out.clone();
    }
    let mut spec = conf.spec;
    spec.exec = exec(a.sequential);
    let out = run_sweep(&spec).map_err(runtime)?;
    for n in &out.notices {
        let _ = writeln!(stderr, "notice: {n}");
    }
    let body = if conf.json {
        let rows: Vec<Value> = out
            .rows
            .iter()
            .map(|r| {
                let mut rec = r.record();
                if a.mask_elapsed {
                    rec[11] = "0".into();
                }
                Value::Object(
                    CSV_HEADER.iter().zip(rec).map(|(k, v)| (k.to_string(), Value::String(v))).collect::<Map<_, _>>(),
                )
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).map_err(runtime)?;
        s.push('\n');
        s.into_bytes()
    } else {
        let mut buf = Vec::new();
        write_csv(&mut buf, &out.rows, a.mask_elapsed).map_err(runtime)?;
        buf
    };
    emit(&conf.out, stdout, &body)
}

fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = a.net.config()?;
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let checker = if a.tamper { CheckerKind::Tampered } else { CheckerKind::Honest };
    let s = run_trials(&cfg, a.net.mode, a.trials, a.seed, a.tol, checker, exec(a.sequential)).map_err(runtime)?;
    let agreement = s.agreement();
    writeln!(
        stdout,
        "agreement {agreement:.2} ({}/{} trials), redraws {}, unresolved {}",
        s.agreements, s.trials, s.redraws, s.unresolved
    )
    .map_err(runtime)?;
    if !s.disagreements.is_empty() {
        writeln!(stdout, "disagreeing trials: {:?}", s.disagreements).map_err(runtime)?;
    }
    if agreement < AGREEMENT_THRESHOLD {
        return Err(CliError::Verification(format!(
            "agreement {agreement:.2} below {AGREEMENT_THRESHOLD:.2}; the combinatorial checker and the numeric engine disagree"
        )));
    }
    Ok(())
}
