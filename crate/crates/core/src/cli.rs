//! Command-line front end.
//!
//! Parsing (clap) produces a [`RunConfig`]; [`run`] validates it and returns
//! the exit code together with the emitted text, so the whole pipeline can be
//! exercised without spawning a process.
//!
//! Exit codes: 0 success, 1 validation error, 2 verification failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::channels::{protect_with, AmplitudeDamping, P1Choice};
use crate::error::{Error, Result};
use crate::output::{pairing_document, protocol_document, rows_csv, teleport_document, Document, OutputFormat};
use crate::protocols::{
    bell_generate_with, search_pairings, teleport_case, w_generate_with, BellParams, PairSplit, Pairing,
    PatternOrder, TeleportCase, WParams,
};
use crate::qstate::{cr, Complex};
use crate::report::{NormalizationMode, ProtocolReport};
use crate::sweep::{self, Grid, SweepProtocol};
use crate::verify;

pub const DEFAULT_SEED: u64 = 20_240_607;

/// Input amplitudes whose squared norm is this close to 1 are rescaled;
/// anything further off is rejected.
pub const INPUT_NORM_SLACK: f64 = 1e-3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Protect,
    Bell,
    Wstate,
    Teleport,
    Sweep,
    Verify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Protect => "protect",
            Command::Bell => "bell",
            Command::Wstate => "wstate",
            Command::Teleport => "teleport",
            Command::Sweep => "sweep",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Real(f64),
    Text(String),
    Flag(bool),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Real(x) => write!(f, "{x}"),
            ParamValue::Text(s) => f.write_str(s),
            ParamValue::Flag(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub parameters: BTreeMap<String, ParamValue>,
    pub mode: NormalizationMode,
    pub seed: u64,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            parameters: BTreeMap::new(),
            mode: NormalizationMode::Paper,
            seed: DEFAULT_SEED,
            output_format: OutputFormat::Json,
            output_path: None,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }
}

impl From<f64> for ParamValue {
    fn from(x: f64) -> Self {
        ParamValue::Real(x)
    }
}

impl From<&str> for ParamValue {
    fn from(s: &str) -> Self {
        ParamValue::Text(s.to_string())
    }
}

impl From<bool> for ParamValue {
    fn from(b: bool) -> Self {
        ParamValue::Flag(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairingChoice {
    Fixed(Pairing),
    Search,
}

impl Default for PairingChoice {
    fn default() -> Self {
        PairingChoice::Fixed(Pairing::DEFAULT)
    }
}

impl FromStr for PairingChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "search" {
            return Ok(PairingChoice::Search);
        }
        let (split, order) = match s.strip_suffix("~swapped") {
            Some(head) => (head, PatternOrder::Swapped),
            None => (s, PatternOrder::Forward),
        };
        let split = PairSplit::from_str(split).map_err(|_| {
            format!("unknown pairing `{s}` (expected 02-13|03-12|01-23|search)")
        })?;
        Ok(PairingChoice::Fixed(Pairing { split, order }))
    }
}

/// Resolved protocol inputs. Unset values fall back to the documented
/// defaults when a protocol runs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Inputs {
    pub p: Option<f64>,
    pub gamma_tau: Option<f64>,
    pub r: Option<f64>,
    pub p1: P1Choice,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub amps: Option<[f64; 4]>,
    pub clone_angle: Option<f64>,
    pub u: Option<f64>,
    pub sigma_x: bool,
    pub case: Option<TeleportCase>,
    pub x: Option<f64>,
    pub s: Option<f64>,
    pub pairing: PairingChoice,
    pub mode: NormalizationMode,
}

fn missing(name: &str) -> Error {
    Error::Config(format!("missing required parameter `{name}`"))
}

/// Rescale a real amplitude vector whose norm is within [`INPUT_NORM_SLACK`]
/// of 1 (so four-digit inputs like 0.7071 are accepted).
pub fn normalize_input(name: &str, amps: &[f64]) -> Result<Vec<f64>> {
    if amps.iter().any(|a| !a.is_finite()) {
        return Err(Error::Config(format!("`{name}` has a non-finite entry")));
    }
    let n: f64 = amps.iter().map(|a| a * a).sum();
    if (n - 1.0).abs() > INPUT_NORM_SLACK {
        return Err(Error::Config(format!(
            "`{name}` has squared norm {n}, expected 1"
        )));
    }
    let k = n.sqrt();
    Ok(amps.iter().map(|a| a / k).collect())
}

impl Inputs {
    pub fn p(&self) -> Result<f64> {
        self.p.ok_or_else(|| missing("p"))
    }

    pub fn channel(&self) -> Result<AmplitudeDamping> {
        match (self.gamma_tau, self.r) {
            (Some(_), Some(_)) => Err(Error::Config(
                "`gamma_tau` and `r` are mutually exclusive".into(),
            )),
            (Some(gt), None) => AmplitudeDamping::from_gamma_tau(gt),
            (None, Some(r)) => AmplitudeDamping::from_r(r),
            (None, None) => Err(missing("gamma_tau")),
        }
    }

    pub fn protect(&self) -> Result<ProtocolReport> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ab = normalize_input(
            "alpha,beta",
            &[self.alpha.unwrap_or(h), self.beta.unwrap_or(h)],
        )?;
        protect_with(cr(ab[0]), cr(ab[1]), self.p()?, &self.channel()?, self.p1)
    }

    pub fn bell(&self) -> Result<ProtocolReport> {
        let amps = normalize_input("amps", &self.amps.unwrap_or([0.5, -0.5, 0.5, 0.5]))?;
        let amps: [Complex; 4] = [cr(amps[0]), cr(amps[1]), cr(amps[2]), cr(amps[3])];
        bell_generate_with(&BellParams {
            amps,
            p: self.p()?,
            channel: self.channel()?,
            p1: self.p1,
            mode: self.mode,
        })
    }

    pub fn wstate(&self) -> Result<ProtocolReport> {
        w_generate_with(&WParams {
            angle: self.clone_angle.unwrap_or(std::f64::consts::FRAC_PI_4),
            u: self.u.unwrap_or(std::f64::consts::FRAC_1_SQRT_2),
            p: self.p()?,
            channel: self.channel()?,
            p1: self.p1,
            mode: self.mode,
            sigma_x: self.sigma_x,
        })
    }

    pub fn teleport_document(&self) -> Result<Document> {
        let case = self.case.ok_or_else(|| missing("case"))?;
        let x = self.x.ok_or_else(|| missing("x"))?;
        let s = self.s.ok_or_else(|| missing("s"))?;
        Ok(match self.pairing {
            PairingChoice::Fixed(pairing) => teleport_document(&teleport_case(case, x, s, pairing)?),
            PairingChoice::Search => pairing_document(&search_pairings(case, x, s)?),
        })
    }

    /// Set a numeric input by its parameter name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "p" => self.p = Some(value),
            "gamma_tau" => self.gamma_tau = Some(value),
            "r" => self.r = Some(value),
            "p1" => self.p1 = P1Choice::Fixed(value),
            "alpha" => self.alpha = Some(value),
            "beta" => self.beta = Some(value),
            "clone_angle" => self.clone_angle = Some(value),
            "u" => self.u = Some(value),
            "x" => self.x = Some(value),
            "s" => self.s = Some(value),
            other => return Err(Error::Config(format!("unknown numeric parameter `{other}`"))),
        }
        Ok(())
    }
}

/// Parameter names each command accepts.
pub fn allowed_parameters(command: Command) -> &'static [&'static str] {
    match command {
        Command::Protect => &["p", "gamma_tau", "r", "p1", "alpha", "beta"],
        Command::Bell => &["p", "gamma_tau", "r", "p1", "amps"],
        Command::Wstate => &["p", "gamma_tau", "r", "p1", "clone_angle", "u", "sigma_x"],
        Command::Teleport => &["case", "x", "s", "pairing"],
        Command::Sweep => &[
            "protocol", "grid", "p", "gamma_tau", "r", "p1", "alpha", "beta", "amps", "clone_angle",
            "u", "sigma_x", "case", "x", "s", "pairing",
        ],
        Command::Verify => &[],
    }
}

fn real(key: &str, v: &ParamValue) -> Result<f64> {
    match v {
        ParamValue::Real(x) => Ok(*x),
        ParamValue::Text(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{s}` as a number"))),
        ParamValue::Flag(_) => Err(Error::Config(format!("`{key}` expects a number"))),
    }
}

fn text(v: &ParamValue) -> String {
    v.to_string()
}

fn parse_amps(key: &str, v: &ParamValue) -> Result<[f64; 4]> {
    let s = text(v);
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(Error::Config(format!("`{key}` expects four comma-separated reals, got `{s}`")));
    }
    let mut out = [0.0; 4];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{part}`")))?;
    }
    Ok(out)
}

/// Check parameter names against the command and build [`Inputs`].
pub fn inputs_from(config: &RunConfig) -> Result<Inputs> {
    let allowed = allowed_parameters(config.command);
    let mut inputs = Inputs {
        mode: config.mode,
        ..Inputs::default()
    };
    for (key, value) in &config.parameters {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "parameter `{key}` does not apply to `{}`",
                config.command.as_str()
            )));
        }
        match key.as_str() {
            "protocol" | "grid" => {}
            "p1" => {
                inputs.p1 = match value {
                    ParamValue::Text(s) if s == "auto" => P1Choice::Auto,
                    other => P1Choice::Fixed(real(key, other)?),
                }
            }
            "amps" => inputs.amps = Some(parse_amps(key, value)?),
            "sigma_x" => {
                inputs.sigma_x = match value {
                    ParamValue::Flag(b) => *b,
                    other => matches!(text(other).as_str(), "true" | "1"),
                }
            }
            "case" => {
                inputs.case = Some(
                    text(value)
                        .parse()
                        .map_err(|e: String| Error::Config(format!("`case`: {e}")))?,
                )
            }
            "pairing" => {
                inputs.pairing = text(value)
                    .parse()
                    .map_err(|e: String| Error::Config(format!("`pairing`: {e}")))?
            }
            name => {
                let x = real(name, value)?;
                if !x.is_finite() {
                    return Err(Error::Config(format!("`{name}` must be finite")));
                }
                inputs.set(name, x)?;
            }
        }
    }
    Ok(inputs)
}

/// Exit code plus emitted text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl RunOutcome {
    fn invalid(err: impl fmt::Display) -> Self {
        RunOutcome {
            code: EXIT_INVALID,
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        }
    }
}

fn render(doc: &Document, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => doc.to_json(),
        OutputFormat::Csv => doc.to_csv(),
    }
}

fn execute(config: &RunConfig) -> Result<(i32, String, String)> {
    let inputs = inputs_from(config)?;
    let format = config.output_format;
    let single = |doc: Document| Ok((EXIT_OK, render(&doc, format), String::new()));
    match config.command {
        Command::Protect => single(protocol_document(&inputs.protect()?)),
        Command::Bell => single(protocol_document(&inputs.bell()?)),
        Command::Wstate => single(protocol_document(&inputs.wstate()?)),
        Command::Teleport => single(inputs.teleport_document()?),
        Command::Sweep => {
            let protocol: SweepProtocol = config
                .parameters
                .get("protocol")
                .map(text)
                .ok_or_else(|| missing("protocol"))?
                .parse()
                .map_err(Error::Config)?;
            let grid: Grid = config
                .parameters
                .get("grid")
                .map(text)
                .ok_or_else(|| missing("grid"))?
                .parse()?;
            let table = sweep::sweep(protocol, &inputs, &grid)?;
            let out = match format {
                OutputFormat::Csv => rows_csv(table.columns, &table.rows),
                OutputFormat::Json => table.document(protocol, &inputs, &grid).to_json(),
            };
            Ok((EXIT_OK, out, String::new()))
        }
        Command::Verify => {
            let report = verify::run_all(config.seed);
            let code = if report.all_passed() { EXIT_OK } else { EXIT_VERIFY_FAILED };
            let out = match format {
                OutputFormat::Json => report.document(config.seed).to_json(),
                OutputFormat::Csv => report.csv(),
            };
            Ok((code, out, report.summary_table()))
        }
    }
}

/// Run a validated configuration. Output goes to `output_path` when set,
/// otherwise into `stdout`.
pub fn run(config: &RunConfig) -> RunOutcome {
    let (code, out, stderr) = match execute(config) {
        Ok(x) => x,
        Err(e) => return RunOutcome::invalid(e),
    };
    match &config.output_path {
        Some(path) => match std::fs::write(path, &out) {
            Ok(()) => RunOutcome {
                code,
                stdout: String::new(),
                stderr,
            },
            Err(e) => RunOutcome::invalid(format!("cannot write {}: {e}", path.display())),
        },
        None => RunOutcome {
            code,
            stdout: out,
            stderr,
        },
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qsim",
    version,
    about = "Weak-measurement protection, Bell/W-type generation and teleportation case checks",
    allow_negative_numbers = true
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Protect an unknown qubit through amplitude damping.
    Protect(ProtocolArgs),
    /// Generate a Bell pair by sending the second qubit through the channel.
    Bell(ProtocolArgs),
    /// Generate a W-type state via economical cloning and protected transmission.
    Wstate(ProtocolArgs),
    /// Evaluate one teleportation case over the Bell outcome table.
    Teleport(ProtocolArgs),
    /// Evaluate a protocol over a parameter grid.
    Sweep(SweepArgs),
    /// Run every acceptance check and print a summary.
    Verify(CommonArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long, default_value = "paper")]
    mode: NormalizationMode,
    #[arg(long, env = "QSIM_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "json")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProtocolArgs {
    /// Pre-weak measurement strength.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, conflicts_with = "r")]
    gamma_tau: Option<f64>,
    /// Damping magnitude, 1 − e^{−Γτ}.
    #[arg(long)]
    r: Option<f64>,
    /// Post-weak strength, or `auto` for the recovery-optimal value.
    #[arg(long)]
    p1: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Two-qubit amplitudes `α,β,γ,δ` of α|00⟩+β|01⟩+γ|10⟩+δ|11⟩.
    #[arg(long)]
    amps: Option<String>,
    #[arg(long)]
    clone_angle: Option<f64>,
    /// Non-maximal Hadamard parameter in (0,1).
    #[arg(long)]
    u: Option<f64>,
    /// Apply σx on the first qubit after W-type generation.
    #[arg(long)]
    sigma_x: bool,
    /// Ia, Ib, IIa, IIb, IIIa, IIIb, IVa or IVb.
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    /// 02-13, 03-12, 01-23 (optionally with `~swapped`) or `search`.
    #[arg(long)]
    pairing: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    protocol: String,
    /// `name=start:stop:step`, comma-separated; stop is inclusive.
    #[arg(long)]
    grid: String,
    #[command(flatten)]
    params: ProtocolArgs,
}

fn protocol_config(command: Command, a: ProtocolArgs) -> RunConfig {
    let mut cfg = RunConfig::new(command);
    cfg.mode = a.common.mode;
    cfg.seed = a.common.seed;
    cfg.output_format = a.common.format;
    cfg.output_path = a.common.out;
    let reals = [
        ("p", a.p),
        ("gamma_tau", a.gamma_tau),
        ("r", a.r),
        ("alpha", a.alpha),
        ("beta", a.beta),
        ("clone_angle", a.clone_angle),
        ("u", a.u),
        ("x", a.x),
        ("s", a.s),
    ];
    for (k, v) in reals {
        if let Some(v) = v {
            cfg.parameters.insert(k.into(), ParamValue::Real(v));
        }
    }
    let texts = [("p1", a.p1), ("amps", a.amps), ("case", a.case), ("pairing", a.pairing)];
    for (k, v) in texts {
        if let Some(v) = v {
            cfg.parameters.insert(k.into(), ParamValue::Text(v));
        }
    }
    if a.sigma_x {
        cfg.parameters.insert("sigma_x".into(), ParamValue::Flag(true));
    }
    cfg
}

/// Parse command-line arguments into a [`RunConfig`].
pub fn parse_args<I, T>(args: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    Ok(match cli.command {
        Sub::Protect(a) => protocol_config(Command::Protect, a),
        Sub::Bell(a) => protocol_config(Command::Bell, a),
        Sub::Wstate(a) => protocol_config(Command::Wstate, a),
        Sub::Teleport(a) => protocol_config(Command::Teleport, a),
        Sub::Sweep(a) => {
            let mut cfg = protocol_config(Command::Sweep, a.params);
            cfg.parameters.insert("protocol".into(), ParamValue::Text(a.protocol));
            cfg.parameters.insert("grid".into(), ParamValue::Text(a.grid));
            cfg
        }
        Sub::Verify(c) => {
            let mut cfg = RunConfig::new(Command::Verify);
            cfg.mode = c.mode;
            cfg.seed = c.seed;
            cfg.output_format = c.format;
            cfg.output_path = c.out;
            cfg
        }
    })
}

/// Parse and run; clap usage errors map to exit code 1, help and version to 0.
pub fn run_args<I, T>(args: I) -> RunOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                RunOutcome {
                    code: EXIT_INVALID,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                RunOutcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}
