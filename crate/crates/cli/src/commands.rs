//! One function per subcommand. Each returns the artifact text; nothing is
//! written until the computation has finished.

use std::fmt;

use qfeedback_core::algebra::{basis_state, max_abs, r, GG};
use qfeedback_core::entanglement::concurrence;
use qfeedback_core::hamiltonian::{evolve_closed, marker_variance, marker_variance_numeric};
use qfeedback_core::master_equation::{
    analytic_steady_state, liouvillian_fb, liouvillian_nofb, propagate_with, steady_state,
};
use qfeedback_core::optimizer::scan_grid;
use qfeedback_core::validation::{run_validation, ValidationReport};
use qfeedback_core::{concurrence_pure, DensityMatrix, Error, Superoperator};

use crate::config::{Format, Mode, RunConfig, UsageError, EXIT_NUMERIC, EXIT_USAGE};
use crate::format::{decimal, Cell, Table};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) | CliError::Io(_) => EXIT_NUMERIC,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e.0)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

/// What a command produced: the artifact, messages for stderr, and whether
/// the run should end with the numerical-failure status.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifact: String,
    pub notes: Vec<String>,
    pub failed: bool,
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&table.to_json_value()).expect("serializable");
            s.push('\n');
            s
        }
    }
}

fn generator(cfg: &RunConfig) -> Superoperator {
    if cfg.feedback() {
        liouvillian_fb(&cfg.params)
    } else {
        liouvillian_nofb(&cfg.params)
    }
}

pub fn steady(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.analytic && cfg.feedback() {
        return Err(CliError::Usage(
            "--analytic needs λ = 0: the closed form covers only the no-feedback state".into(),
        ));
    }
    let rho = steady_state(&generator(cfg))?;
    let m = rho.matrix();
    let exact = if cfg.analytic {
        Some(analytic_steady_state(&cfg.params)?.into_inner())
    } else {
        None
    };

    let mut header = vec!["row", "col", "re", "im"];
    if exact.is_some() {
        header.extend(["re_analytic", "im_analytic", "abs_deviation"]);
    }
    let mut table = Table::new(header);
    for row in 0..4 {
        for col in 0..4 {
            let z = m[(row, col)];
            let mut cells = vec![
                Cell::Int(row + 1),
                Cell::Int(col + 1),
                Cell::Num(z.re),
                Cell::Num(z.im),
            ];
            if let Some(e) = &exact {
                let w = e[(row, col)];
                cells.extend([Cell::Num(w.re), Cell::Num(w.im), Cell::Num((z - w).norm())]);
            }
            table.push(cells);
        }
    }
    let mut out = Outcome {
        artifact: render(&table, cfg.format),
        ..Outcome::default()
    };
    if let Some(e) = &exact {
        out.notes.push(format!(
            "max deviation from closed form: {:.3e}",
            max_abs(&(m - e))
        ));
    }
    Ok(out)
}

fn sample_times(end: f64, samples: usize) -> Vec<f64> {
    if samples == 1 {
        return vec![0.0];
    }
    (0..samples)
        .map(|k| {
            if k == samples - 1 {
                end
            } else {
                end * k as f64 / (samples - 1) as f64
            }
        })
        .collect()
}

pub fn evolve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.mode {
        Mode::Closed => evolve_closed_mode(cfg),
        Mode::Open => evolve_open_mode(cfg),
    }
}

fn evolve_closed_mode(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = &cfg.params;
    if p.j == 0.0 || p.alpha == 0.0 {
        return Err(CliError::Usage(format!(
            "closed mode needs η = α/J to be defined and nonzero (α = {}, J = {})",
            p.alpha, p.j
        )));
    }
    let mut table = Table::new(vec!["tau", "var_analytic", "var_numeric", "concurrence"]);
    for tau in sample_times(cfg.tau, cfg.samples) {
        let psi = evolve_closed(p, tau)?;
        table.push(vec![
            Cell::Num(tau),
            Cell::Num(marker_variance(p, tau)?),
            Cell::Num(marker_variance_numeric(p, tau)?),
            Cell::Num(concurrence_pure(&psi)?),
        ]);
    }
    Ok(Outcome {
        artifact: render(&table, cfg.format),
        ..Outcome::default()
    })
}

fn evolve_open_mode(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let start = DensityMatrix::from_pure(&basis_state(GG))?;
    let mut trajectory = Vec::new();
    let (_, drift) = propagate_with(&start, &generator(cfg), cfg.t_final, cfg.dt, |t, rho| {
        trajectory.push((t, *rho));
    })?;

    let last = trajectory.len() - 1;
    let mut picked: Vec<usize> = (0..cfg.samples)
        .map(|k| {
            if cfg.samples == 1 {
                0
            } else {
                (k as f64 * last as f64 / (cfg.samples - 1) as f64).round() as usize
            }
        })
        .collect();
    picked.dedup();

    let mut table = Table::new(vec!["t", "trace", "min_eig", "concurrence"]);
    for k in picked {
        let (t, m) = trajectory[k];
        let tr = m.trace();
        let normalized = (m + m.adjoint()) * r(0.5) / tr;
        let rho = DensityMatrix::new(normalized)?;
        table.push(vec![
            Cell::Num(t),
            Cell::Num(tr.re),
            Cell::Num(rho.min_eigenvalue()),
            Cell::Num(concurrence(&rho)?.value),
        ]);
    }
    Ok(Outcome {
        artifact: render(&table, cfg.format),
        notes: vec![format!("max trace drift: {drift:.3e}")],
        failed: false,
    })
}

pub fn concurrence_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = &cfg.params;
    let mut table = Table::new(vec!["alpha", "J", "lambda", "tau", "concurrence"]);
    let lambda = if cfg.feedback() { p.lambda } else { 0.0 };
    let (tau, value) = if cfg.tau_given {
        if p.j == 0.0 || p.alpha == 0.0 {
            return Err(CliError::Usage("closed evolution needs η = α/J ≠ 0".into()));
        }
        (
            Cell::Num(cfg.tau),
            concurrence_pure(&evolve_closed(p, cfg.tau)?)?,
        )
    } else if cfg.analytic && !cfg.feedback() {
        (Cell::Empty, concurrence(&analytic_steady_state(p)?)?.value)
    } else {
        (
            Cell::Empty,
            concurrence(&steady_state(&generator(cfg))?)?.value,
        )
    };
    table.push(vec![
        Cell::Num(p.alpha),
        Cell::Num(p.j),
        Cell::Num(lambda),
        tau,
        Cell::Num(value),
    ]);
    Ok(Outcome {
        artifact: render(&table, cfg.format),
        ..Outcome::default()
    })
}

pub const SCAN_HEADER: [&str; 6] = ["alpha", "J", "C0", "Cfb", "lambda_opt", "delta"];

pub fn scan(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let records = scan_grid(
        &cfg.alpha_range.values(),
        &cfg.j_range.values(),
        &cfg.optimization,
    )?;
    let any_error = records.iter().any(|rec| rec.error.is_some());
    let mut header = SCAN_HEADER.to_vec();
    if any_error {
        header.push("error");
    }
    let mut table = Table::new(header);
    let mut notes = Vec::new();
    for rec in &records {
        let mut row = vec![
            Cell::Num(rec.alpha),
            Cell::Num(rec.j),
            Cell::Num(rec.c0),
            Cell::Num(rec.cfb),
            Cell::Num(rec.lambda_opt),
            Cell::Num(rec.delta),
        ];
        if any_error {
            row.push(rec.error.as_deref().map_or(Cell::Empty, Cell::Text));
        }
        table.push(row);
        if let Some(e) = &rec.error {
            notes.push(format!(
                "point α = {}, J = {} failed: {e}",
                rec.alpha, rec.j
            ));
        }
        if rec.at_boundary {
            notes.push(format!(
                "warning: optimum at the λ search bound for α = {}, J = {} (λ = {})",
                rec.alpha,
                rec.j,
                decimal(rec.lambda_opt)
            ));
        }
    }
    Ok(Outcome {
        artifact: render(&table, cfg.format),
        notes,
        failed: any_error,
    })
}

pub fn validation_table(report: &ValidationReport, format: Format) -> String {
    let mut table = Table::new(vec!["check", "deviation", "threshold", "status"]);
    for check in &report.checks {
        table.push(vec![
            Cell::Text(check.name),
            Cell::Num(check.deviation),
            Cell::Num(check.threshold),
            Cell::Text(if check.passed() { "PASS" } else { "FAIL" }),
        ]);
    }
    render(&table, format)
}

/// Human-readable report: one line per check.
pub fn validation_text(report: &ValidationReport) -> String {
    let width = report
        .checks
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for check in &report.checks {
        let status = if check.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{status}  {:<width$}  deviation {:>10.3e}  threshold {:.0e}",
            check.name, check.deviation, check.threshold
        ));
        if let Some(e) = &check.error {
            out.push_str(&format!("  ({e})"));
        }
        out.push('\n');
    }
    let failed = report.failures().count();
    out.push_str(&format!(
        "{} checks, {} passed, {failed} failed\n",
        report.checks.len(),
        report.checks.len() - failed
    ));
    out
}

/// Text report on stdout; the table goes to `--output` when given.
pub fn validate(cfg: &RunConfig) -> Result<(Outcome, String), CliError> {
    let report = run_validation();
    let outcome = Outcome {
        artifact: validation_table(&report, cfg.format),
        notes: Vec::new(),
        failed: !report.all_passed(),
    };
    Ok((outcome, validation_text(&report)))
}
