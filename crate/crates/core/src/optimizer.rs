//! Feedback-strength optimization of the stationary concurrence and
//! (α, J) grid scans.
//!
//! `C_fb(α, J) = max_λ C(ρ_ss(α, J, λ))` is found by a coarse scan over a
//! bounded λ interval followed by golden-section refinement inside the
//! bracket around the best coarse point. Concurrence has a kink where
//! `ξ₁ − ξ₂ − ξ₃ − ξ₄` crosses zero, so the refinement is derivative free.

use crate::algebra::max_abs;
use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::hamiltonian::ModelParams;
use crate::master_equation::{
    analytic_steady_state, liouvillian_fb, liouvillian_nofb, steady_state,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Number of evenly spaced λ values in the coarse scan, endpoints included.
    pub coarse_points: usize,
    /// λ resolution of the golden-section stage.
    pub refine_tol: f64,
    /// Always evaluate λ = 0, so `C_fb ≥ C₀` holds regardless of the grid.
    pub include_zero: bool,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        Self {
            lambda_min: -8.0,
            lambda_max: 8.0,
            coarse_points: 161,
            refine_tol: 1e-6,
            include_zero: true,
        }
    }
}

impl OptimizationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_min < self.lambda_max) {
            return Err(Error::Config(format!(
                "lambda bounds must satisfy min < max, got [{}, {}]",
                self.lambda_min, self.lambda_max
            )));
        }
        if self.coarse_points < 3 {
            return Err(Error::Config(format!(
                "coarse_points must be at least 3, got {}",
                self.coarse_points
            )));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::Config(format!(
                "refine_tol must be positive, got {}",
                self.refine_tol
            )));
        }
        Ok(())
    }

    fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.coarse_points;
        let step = (self.lambda_max - self.lambda_min) / (n - 1) as f64;
        (0..n).map(move |k| {
            if k == n - 1 {
                self.lambda_max
            } else {
                self.lambda_min + step * k as f64
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaOptimum {
    pub lambda_opt: f64,
    pub cfb: f64,
    /// The maximizer sits within `refine_tol` of a search bound, so the true
    /// maximum may lie outside the interval.
    pub at_boundary: bool,
    pub evaluations: usize,
}

/// One (α, J) point of a scan. Numeric fields are NaN when `error` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub alpha: f64,
    pub j: f64,
    pub c0: f64,
    pub cfb: f64,
    pub lambda_opt: f64,
    pub delta: f64,
    pub at_boundary: bool,
    pub error: Option<String>,
}

/// `C₀`, the concurrence of the closed-form no-feedback steady state.
pub fn stationary_concurrence(p: &ModelParams) -> Result<f64> {
    Ok(concurrence(&analytic_steady_state(p)?)?.value)
}

/// [`stationary_concurrence`] after checking the closed form against the
/// numeric null-space solution (elementwise, 1e-10).
pub fn stationary_concurrence_validated(p: &ModelParams) -> Result<f64> {
    let exact = analytic_steady_state(p)?;
    let numeric = steady_state(&liouvillian_nofb(p))?;
    let dev = max_abs(&(exact.matrix() - numeric.matrix()));
    if dev > 1e-10 {
        return Err(Error::Contract(format!(
            "closed-form steady state deviates from numeric solution by {dev:.3e}"
        )));
    }
    Ok(concurrence(&exact)?.value)
}

/// Stationary concurrence of the feedback master equation at the given λ.
pub fn feedback_concurrence(p: &ModelParams, lambda: f64) -> Result<f64> {
    let rho = steady_state(&liouvillian_fb(&p.with_lambda(lambda)))?;
    Ok(concurrence(&rho)?.value)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    lambda: f64,
    value: f64,
}

impl Candidate {
    /// Higher concurrence wins; ties go to the smaller |λ|, then the smaller λ.
    fn beats(&self, other: &Candidate) -> bool {
        if self.value != other.value {
            return self.value > other.value;
        }
        let (a, b) = (self.lambda.abs(), other.lambda.abs());
        if a != b {
            return a < b;
        }
        self.lambda < other.lambda
    }
}

/// Maximizes a unimodal function on `[lo, hi]` down to a bracket of width `tol`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// `C_fb = max_λ C(ρ_ss^fb)` for fixed (α, J); `p.lambda` is ignored.
pub fn optimize_lambda(p: &ModelParams, cfg: &OptimizationConfig) -> Result<LambdaOptimum> {
    cfg.validate()?;
    let mut evaluations = 0;
    let mut eval = |lambda: f64| {
        evaluations += 1;
        feedback_concurrence(p, lambda)
    };

    let mut best: Option<Candidate> = None;
    let offer = |cand: Candidate, best: &mut Option<Candidate>| {
        if best.as_ref().is_none_or(|b| cand.beats(b)) {
            *best = Some(cand);
        }
    };

    if cfg.include_zero {
        let value = eval(0.0)?;
        offer(Candidate { lambda: 0.0, value }, &mut best);
    }

    let grid: Vec<f64> = cfg.grid().collect();
    let mut grid_best = 0;
    let mut grid_values = Vec::with_capacity(grid.len());
    for (k, &lambda) in grid.iter().enumerate() {
        let value = eval(lambda)?;
        grid_values.push(value);
        let cand = Candidate { lambda, value };
        if k == 0
            || cand.beats(&Candidate {
                lambda: grid[grid_best],
                value: grid_values[grid_best],
            })
        {
            grid_best = k;
        }
        offer(cand, &mut best);
    }

    let lo = grid[grid_best.saturating_sub(1)];
    let hi = grid[(grid_best + 1).min(grid.len() - 1)];
    let (lambda, value) = golden_section_max(&mut eval, lo, hi, cfg.refine_tol)?;
    offer(Candidate { lambda, value }, &mut best);

    let best = best.expect("coarse scan has at least three points");
    let at_boundary = (best.lambda - cfg.lambda_min).abs() <= cfg.refine_tol
        || (cfg.lambda_max - best.lambda).abs() <= cfg.refine_tol;
    Ok(LambdaOptimum {
        lambda_opt: best.lambda,
        cfb: best.value,
        at_boundary,
        evaluations,
    })
}

/// `C₀`, `C_fb` and the optimal λ at one (α, J) point. Failures are recorded
/// in the returned record.
pub fn scan_point(alpha: f64, j: f64, cfg: &OptimizationConfig) -> ScanRecord {
    let p = ModelParams::new(alpha, j);
    let outcome =
        stationary_concurrence(&p).and_then(|c0| optimize_lambda(&p, cfg).map(|opt| (c0, opt)));
    match outcome {
        Ok((c0, opt)) => ScanRecord {
            alpha,
            j,
            c0,
            cfb: opt.cfb,
            lambda_opt: opt.lambda_opt,
            delta: opt.cfb - c0,
            at_boundary: opt.at_boundary,
            error: None,
        },
        Err(e) => ScanRecord {
            alpha,
            j,
            c0: f64::NAN,
            cfb: f64::NAN,
            lambda_opt: f64::NAN,
            delta: f64::NAN,
            at_boundary: false,
            error: Some(e.to_string()),
        },
    }
}

/// Scans every (α, J) pair, α-major with J varying fastest. Points are
/// independent and may be computed in parallel; the output order depends
/// only on the inputs.
pub fn scan_grid(alphas: &[f64], js: &[f64], cfg: &OptimizationConfig) -> Result<Vec<ScanRecord>> {
    if alphas.is_empty() || js.is_empty() {
        return Err(Error::Config(
            "scan grid needs at least one α and one J".into(),
        ));
    }
    cfg.validate()?;
    let points: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| js.iter().map(move |&j| (a, j)))
        .collect();

    #[cfg(feature = "parallel")]
    let records = {
        use rayon::prelude::*;
        points
            .par_iter()
            .map(|&(a, j)| scan_point(a, j, cfg))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let records = points.iter().map(|&(a, j)| scan_point(a, j, cfg)).collect();

    Ok(records)
}

/// `n` evenly spaced values from `min` to `max` inclusive (`[min]` when `n == 1`).
pub fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![min],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    max
                } else {
                    min + (max - min) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}
