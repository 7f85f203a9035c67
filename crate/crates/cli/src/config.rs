//! Command-line flags, the flat `key=value` config file, and their merge.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qfeedback_core::optimizer::OptimizationConfig;
use qfeedback_core::ModelParams;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

const EXIT_HELP: &str = "\
Exit status:
  0  success
  2  usage or configuration error (bad flag, bad config file, constraint such as η ≠ 0 violated)
  3  numerical failure (degenerate steady state, tolerance breach, failed scan point or validation check)

Config files hold one `key = value` per line, keys named like the long flags
without dashes (alpha, J, lambda, alpha-range, ...). `#` starts a comment.
Flags given on the command line override the file.";

#[derive(Debug, Parser)]
#[command(name = "qfeedback", version, about = "Two driven, decaying, Ising-coupled atoms with homodyne feedback", after_help = EXIT_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Stationary density matrix, with or without feedback.
    Steady,
    /// Closed (pure-state) or open (master-equation) time evolution.
    Evolve,
    /// Concurrence of the stationary or closed-evolved state.
    Concurrence,
    /// C0, the λ-optimized Cfb and their difference over an (α, J) grid.
    Scan,
    /// Run the oracle suite.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Closed,
    Open,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Driving strength α.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Ising coupling J.
    #[arg(long = "J", global = true, allow_negative_numbers = true)]
    pub j: Option<f64>,
    /// Feedback strength λ. Omitted or 0 selects the generator without feedback.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Final dimensionless time τ = J·t for closed evolution [default: 10].
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Final time (units of 1/γ) for open evolution [default: 50].
    #[arg(long = "t-final", global = true)]
    pub t_final: Option<f64>,
    /// RK4 step for open evolution [default: 0.01].
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// α grid as MIN:MAX:N [default: 0.05:2:40].
    #[arg(
        long = "alpha-range",
        global = true,
        value_name = "MIN:MAX:N",
        allow_hyphen_values = true
    )]
    pub alpha_range: Option<String>,
    /// J grid as MIN:MAX:N [default: 0.05:5:40].
    #[arg(
        long = "J-range",
        global = true,
        value_name = "MIN:MAX:N",
        allow_hyphen_values = true
    )]
    pub j_range: Option<String>,
    /// λ search interval as MIN:MAX [default: -8:8].
    #[arg(
        long = "lambda-bounds",
        global = true,
        value_name = "MIN:MAX",
        allow_hyphen_values = true
    )]
    pub lambda_bounds: Option<String>,
    /// Number of coarse λ grid points before refinement [default: 161].
    #[arg(long = "coarse-points", global = true)]
    pub coarse_points: Option<usize>,
    /// Final bracket width of the λ refinement [default: 1e-6].
    #[arg(long = "refine-tol", global = true)]
    pub refine_tol: Option<f64>,
    /// Also report the closed-form no-feedback result.
    #[arg(long, global = true)]
    pub analytic: bool,
    /// Evolution mode [default: closed].
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Number of output rows for evolve [default: 200].
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Output format [default: csv].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Flat key=value file with defaults for any of the flags above.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridRange {
    pub fn values(&self) -> Vec<f64> {
        qfeedback_core::optimizer::linspace(self.min, self.max, self.count)
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: ModelParams,
    /// `None` when no λ was given anywhere.
    pub lambda: Option<f64>,
    pub tau: f64,
    pub t_final: f64,
    pub dt: f64,
    pub alpha_range: GridRange,
    pub j_range: GridRange,
    pub optimization: OptimizationConfig,
    pub analytic: bool,
    pub tau_given: bool,
    pub mode: Mode,
    pub samples: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, UsageError> {
        let file = match &cli.flags.config {
            Some(path) => read_config_file(path)?,
            None => ConfigFile::default(),
        };
        resolve(cli.command, &cli.flags, &file)
    }

    /// True when the feedback generator should be used.
    pub fn feedback(&self) -> bool {
        self.lambda.is_some_and(|l| l != 0.0)
    }
}

const KEYS: &[&str] = &[
    "alpha",
    "J",
    "lambda",
    "tau",
    "t-final",
    "dt",
    "alpha-range",
    "J-range",
    "lambda-bounds",
    "coarse-points",
    "refine-tol",
    "analytic",
    "mode",
    "samples",
    "output",
    "format",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return usage(format!(
                    "config line {}: expected key=value, got {raw:?}",
                    n + 1
                ));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return usage(format!(
                    "config line {}: unknown key {key:?} (known: {})",
                    n + 1,
                    KEYS.join(", ")
                ));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return usage(format!("config line {}: duplicate key {key:?}", n + 1));
            }
        }
        Ok(Self { entries })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

fn read_config_file(path: &Path) -> Result<ConfigFile, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    ConfigFile::parse(&text)
}

fn parse_f64(key: &str, s: &str) -> Result<f64, UsageError> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => usage(format!("{key}: expected a finite number, got {s:?}")),
    }
}

fn parse_usize(key: &str, s: &str) -> Result<usize, UsageError> {
    s.trim()
        .parse()
        .map_err(|_| UsageError(format!("{key}: expected a nonnegative integer, got {s:?}")))
}

pub fn parse_range(key: &str, s: &str) -> Result<GridRange, UsageError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, count] = parts[..] else {
        return usage(format!("{key}: expected MIN:MAX:N, got {s:?}"));
    };
    let range = GridRange {
        min: parse_f64(key, min)?,
        max: parse_f64(key, max)?,
        count: parse_usize(key, count)?,
    };
    if range.count < 1 {
        return usage(format!("{key}: N must be at least 1"));
    }
    if range.min > range.max {
        return usage(format!("{key}: MIN must not exceed MAX"));
    }
    Ok(range)
}

pub fn parse_bounds(key: &str, s: &str) -> Result<(f64, f64), UsageError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max] = parts[..] else {
        return usage(format!("{key}: expected MIN:MAX, got {s:?}"));
    };
    Ok((parse_f64(key, min)?, parse_f64(key, max)?))
}

fn parse_bool(key: &str, s: &str) -> Result<bool, UsageError> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => usage(format!("{key}: expected true or false, got {s:?}")),
    }
}

fn parse_enum<T: ValueEnum>(key: &str, s: &str) -> Result<T, UsageError> {
    T::from_str(s.trim(), true).map_err(|_| UsageError(format!("{key}: invalid value {s:?}")))
}

pub fn resolve(
    command: Command,
    flags: &Flags,
    file: &ConfigFile,
) -> Result<RunConfig, UsageError> {
    // Flag value if present, else the parsed file entry, else None.
    fn pick<T>(
        flag: Option<T>,
        file: &ConfigFile,
        key: &str,
        parse: impl Fn(&str, &str) -> Result<T, UsageError>,
    ) -> Result<Option<T>, UsageError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => file.get(key).map(|s| parse(key, s)).transpose(),
        }
    }
    let num = |flag: Option<f64>, key: &str| -> Result<Option<f64>, UsageError> {
        match flag {
            Some(x) if !x.is_finite() => usage(format!("--{key}: expected a finite number")),
            other => pick(other, file, key, parse_f64),
        }
    };

    let alpha = num(flags.alpha, "alpha")?.unwrap_or(1.0);
    let j = num(flags.j, "J")?.unwrap_or(1.0);
    let lambda = num(flags.lambda, "lambda")?;
    let tau = num(flags.tau, "tau")?;
    let t_final = num(flags.t_final, "t-final")?.unwrap_or(50.0);
    let dt = num(flags.dt, "dt")?.unwrap_or(0.01);

    let alpha_range = match &flags.alpha_range {
        Some(s) => parse_range("alpha-range", s)?,
        None => pick(None, file, "alpha-range", parse_range)?.unwrap_or(GridRange {
            min: 0.05,
            max: 2.0,
            count: 40,
        }),
    };
    let j_range = match &flags.j_range {
        Some(s) => parse_range("J-range", s)?,
        None => pick(None, file, "J-range", parse_range)?.unwrap_or(GridRange {
            min: 0.05,
            max: 5.0,
            count: 40,
        }),
    };
    let defaults = OptimizationConfig::default();
    let (lambda_min, lambda_max) = match &flags.lambda_bounds {
        Some(s) => parse_bounds("lambda-bounds", s)?,
        None => pick(None, file, "lambda-bounds", parse_bounds)?
            .unwrap_or((defaults.lambda_min, defaults.lambda_max)),
    };
    let optimization = OptimizationConfig {
        lambda_min,
        lambda_max,
        coarse_points: pick(flags.coarse_points, file, "coarse-points", parse_usize)?
            .unwrap_or(defaults.coarse_points),
        refine_tol: num(flags.refine_tol, "refine-tol")?.unwrap_or(defaults.refine_tol),
        ..defaults
    };
    optimization
        .validate()
        .map_err(|e| UsageError(e.to_string()))?;

    let analytic = flags.analytic || pick(None, file, "analytic", parse_bool)?.unwrap_or(false);
    let mode = pick(flags.mode, file, "mode", parse_enum)?.unwrap_or(Mode::Closed);
    let format = pick(flags.format, file, "format", parse_enum)?.unwrap_or(Format::Csv);
    let samples = pick(flags.samples, file, "samples", parse_usize)?.unwrap_or(200);
    let output = match &flags.output {
        Some(p) => Some(p.clone()),
        None => file.get("output").map(PathBuf::from),
    };

    if samples < 1 {
        return usage("samples must be at least 1");
    }
    if !(dt > 0.0) {
        return usage(format!("dt must be positive, got {dt}"));
    }
    if t_final < 0.0 {
        return usage(format!("t-final must be nonnegative, got {t_final}"));
    }
    if tau.is_some_and(|t| t < 0.0) {
        return usage("tau must be nonnegative");
    }

    Ok(RunConfig {
        command,
        params: ModelParams::new(alpha, j).with_lambda(lambda.unwrap_or(0.0)),
        lambda,
        tau: tau.unwrap_or(10.0),
        tau_given: tau.is_some(),
        t_final,
        dt,
        alpha_range,
        j_range,
        optimization,
        analytic,
        mode,
        samples,
        output,
        format,
    })
}
