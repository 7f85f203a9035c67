//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a flat `Float64Array` with a fixed number of values
//! per record so the page can read it without any serialization layer.
//! Errors are thrown as JavaScript strings.

use qfeedback_core::hamiltonian::{evolve_closed, marker_variance};
use qfeedback_core::optimizer::{
    feedback_concurrence, linspace, scan_grid, stationary_concurrence,
};
use qfeedback_core::{concurrence_pure, ModelParams, OptimizationConfig};
use wasm_bindgen::prelude::*;

/// `[τ, Var 𝒪, C]` per sample of the closed evolution from |gg⟩.
pub fn closed_curves(alpha: f64, j: f64, tau_max: f64, samples: usize) -> Result<Vec<f64>, String> {
    let p = ModelParams::new(alpha, j);
    if p.alpha == 0.0 || p.j == 0.0 {
        return Err("closed evolution needs α ≠ 0 and J ≠ 0".into());
    }
    let mut out = Vec::with_capacity(3 * samples);
    for tau in linspace(0.0, tau_max, samples) {
        let psi = evolve_closed(&p, tau).map_err(|e| e.to_string())?;
        out.push(tau);
        out.push(marker_variance(&p, tau).map_err(|e| e.to_string())?);
        out.push(concurrence_pure(&psi).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// Stationary concurrence against λ: `[C₀, λ₀, C(λ₀), λ₁, C(λ₁), …]`.
/// Points where the steady state cannot be computed hold NaN.
pub fn lambda_landscape(
    alpha: f64,
    j: f64,
    lambda_min: f64,
    lambda_max: f64,
    samples: usize,
) -> Result<Vec<f64>, String> {
    let p = ModelParams::new(alpha, j);
    let c0 = stationary_concurrence(&p).map_err(|e| e.to_string())?;
    let mut out = vec![c0];
    for lambda in linspace(lambda_min, lambda_max, samples) {
        out.push(lambda);
        out.push(feedback_concurrence(&p, lambda).unwrap_or(f64::NAN));
    }
    Ok(out)
}

/// `[α, J, C₀, C_fb, λ_opt, Δ]` per grid point, α-major with J fastest.
pub fn heatmap(
    alpha_min: f64,
    alpha_max: f64,
    alpha_count: usize,
    j_min: f64,
    j_max: f64,
    j_count: usize,
    coarse_points: usize,
) -> Result<Vec<f64>, String> {
    let cfg = OptimizationConfig {
        coarse_points,
        ..OptimizationConfig::default()
    };
    let records = scan_grid(
        &linspace(alpha_min, alpha_max, alpha_count),
        &linspace(j_min, j_max, j_count),
        &cfg,
    )
    .map_err(|e| e.to_string())?;
    Ok(records
        .iter()
        .flat_map(|r| [r.alpha, r.j, r.c0, r.cfb, r.lambda_opt, r.delta])
        .collect())
}

/// Concurrence of the stationary state at fixed λ, 0 meaning no feedback.
pub fn steady_concurrence(alpha: f64, j: f64, lambda: f64) -> Result<f64, String> {
    let p = ModelParams::new(alpha, j);
    if lambda == 0.0 {
        stationary_concurrence(&p).map_err(|e| e.to_string())
    } else {
        feedback_concurrence(&p, lambda).map_err(|e| e.to_string())
    }
}

#[wasm_bindgen(js_name = closedCurves)]
pub fn closed_curves_js(
    alpha: f64,
    j: f64,
    tau_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsValue> {
    closed_curves(alpha, j, tau_max, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = lambdaLandscape)]
pub fn lambda_landscape_js(
    alpha: f64,
    j: f64,
    lambda_min: f64,
    lambda_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsValue> {
    lambda_landscape(alpha, j, lambda_min, lambda_max, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = heatmap)]
pub fn heatmap_js(
    alpha_min: f64,
    alpha_max: f64,
    alpha_count: usize,
    j_min: f64,
    j_max: f64,
    j_count: usize,
    coarse_points: usize,
) -> Result<Vec<f64>, JsValue> {
    heatmap(
        alpha_min,
        alpha_max,
        alpha_count,
        j_min,
        j_max,
        j_count,
        coarse_points,
    )
    .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = steadyConcurrence)]
pub fn steady_concurrence_js(alpha: f64, j: f64, lambda: f64) -> Result<f64, JsValue> {
    steady_concurrence(alpha, j, lambda).map_err(|e| JsValue::from_str(&e))
}
