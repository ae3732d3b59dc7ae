//! Browser bindings for the band demo page. Every export takes plain numbers
//! and strings and returns a JSON document; errors come back as strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use surrband::bands::{target_level_widths, AdaptiveProcedure};
use surrband::bounds::w_target;
use surrband::simulate::{gen_data, make_spoiler, run, Procedure, Scenario};
use surrband::specfun::{econst, kappa, qconst, tau_inv};
use surrband::surrogate::{optimal_tuning, optimal_tuning_nested, surrogate_set};
use surrband::{BandParams, NestedScale, Subspace, TuningRule};

type Out = Result<String, String>;

fn to_json(v: &impl Serialize) -> Out {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn parse_dims(dims: &str) -> Result<Vec<usize>, String> {
    dims.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|e| format!("dims: {s:?}: {e}")))
        .collect()
}

fn truth(kind: &str, n: usize, scale: &NestedScale, params: &BandParams) -> Result<Vec<f64>, String> {
    Ok(match kind {
        "blocks" => (0..n).map(|i| [0.0, 1.5, -1.0, 0.5][i * 4 / n]).collect(),
        "smooth" => (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * (i + 1) as f64 / n as f64).sin())
            .collect(),
        "spoiler" => {
            let t = &params.tuning;
            make_spoiler(&scale.levels()[0], t.eps2[0], t.eps_inf[0], 0.5).map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown truth {other:?}; use blocks, smooth or spoiler")),
    })
}

fn nested_setup(n: usize, dims: &str, alpha: f64, gamma: f64, sigma: f64) -> Result<(NestedScale, BandParams), String> {
    let scale = NestedScale::dyadic(n, &parse_dims(dims)?).map_err(|e| e.to_string())?;
    let split = BandParams::equal_split(alpha, scale.len());
    let tuning = optimal_tuning_nested(&scale, alpha, &split, gamma, sigma, TuningRule::Achievable)
        .map_err(|e| e.to_string())?;
    let params = BandParams { alpha, gamma, sigma, alpha_split: split, tuning };
    Ok((scale, params))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct BandView {
    x: Vec<f64>,
    y: Vec<f64>,
    truth: Vec<f64>,
    lower: Vec<f64>,
    center: Vec<f64>,
    upper: Vec<f64>,
    width: f64,
    selected_level: Option<usize>,
    statistics: Vec<f64>,
    thresholds: Vec<f64>,
    level_widths: Vec<f64>,
    target_widths: Vec<f64>,
    surrogate_covered: bool,
    truth_covered: bool,
}

pub fn adaptive_band_impl(n: usize, dims: &str, alpha: f64, gamma: f64, sigma: f64, kind: &str, seed: u64) -> Out {
    let (scale, params) = nested_setup(n, dims, alpha, gamma, sigma)?;
    let f = truth(kind, n, &scale, &params)?;
    let procedure = AdaptiveProcedure::nested(&scale, &params).map_err(|e| e.to_string())?;
    let y = gen_data(&f, sigma, seed, 0);
    let band = procedure.fit(&y).map_err(|e| e.to_string())?;
    let set = surrogate_set(&f, &scale, &params.tuning).map_err(|e| e.to_string())?;
    to_json(&BandView {
        x: (1..=n).map(|i| i as f64 / n as f64).collect(),
        surrogate_covered: set.intersects(&band.lower, &band.upper),
        truth_covered: band.covers(&f),
        level_widths: procedure.level_widths(),
        target_widths: target_level_widths(&scale, &params).map_err(|e| e.to_string())?,
        y,
        truth: f,
        lower: band.lower,
        center: band.center,
        upper: band.upper,
        width: band.width,
        selected_level: band.selected_level,
        statistics: band.statistics,
        thresholds: band.thresholds,
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ConstantsView {
    tau_inv: f64,
    kappa: f64,
    q: f64,
    e: f64,
    omega: f64,
    w_f: f64,
    eps2_achievable: f64,
    eps2_lower_bound: f64,
    eps_inf: f64,
}

pub fn constants_impl(n: usize, d: usize, alpha: f64, gamma: f64) -> Out {
    let err = |e: surrband::Error| e.to_string();
    let s = Subspace::blocks(n, d).map_err(err)?;
    if d >= n {
        return Err("require d < n".into());
    }
    let ach = optimal_tuning(&s, alpha, gamma, 1.0, TuningRule::Achievable).map_err(err)?;
    let lb = optimal_tuning(&s, alpha, gamma, 1.0, TuningRule::LowerBound).map_err(err)?;
    to_json(&ConstantsView {
        tau_inv: tau_inv(1.0 - 2.0 * alpha - gamma).map_err(err)?,
        kappa: kappa(alpha, gamma).map_err(err)?,
        q: qconst(n - d, alpha / 2.0, gamma).map_err(err)?,
        e: econst(n - d, alpha / 2.0, gamma).map_err(err)?,
        omega: s.omega(),
        w_f: w_target(s.omega(), alpha, gamma, 1.0).map_err(err)?,
        eps2_achievable: ach.eps2[0],
        eps2_lower_bound: lb.eps2[0],
        eps_inf: ach.eps_inf[0],
    })
}

pub fn coverage_impl(n: usize, dims: &str, alpha: f64, gamma: f64, kind: &str, reps: u32, seed: u64) -> Out {
    let (scale, params) = nested_setup(n, dims, alpha, gamma, 1.0)?;
    let f = truth(kind, n, &scale, &params)?;
    let s = Scenario {
        truth: f,
        sigma: 1.0,
        procedure: Procedure::AdaptiveNested,
        scale: Some(scale),
        params,
        reps: u64::from(reps),
        seed,
    };
    to_json(&run(&s, None, 1).map_err(|e| e.to_string())?)
}

/// Simulated data and the nested adaptive band for one draw.
#[wasm_bindgen(js_name = adaptiveBand)]
pub fn adaptive_band(n: usize, dims: &str, alpha: f64, gamma: f64, sigma: f64, truth: &str, seed: u64) -> Result<String, JsValue> {
    adaptive_band_impl(n, dims, alpha, gamma, sigma, truth, seed).map_err(|e| JsValue::from_str(&e))
}

/// Tuning constants and target width for `d` dyadic blocks.
#[wasm_bindgen]
pub fn constants(n: usize, d: usize, alpha: f64, gamma: f64) -> Result<String, JsValue> {
    constants_impl(n, d, alpha, gamma).map_err(|e| JsValue::from_str(&e))
}

/// Monte Carlo coverage and level histogram of the nested procedure.
#[wasm_bindgen]
pub fn coverage(n: usize, dims: &str, alpha: f64, gamma: f64, truth: &str, reps: u32, seed: u64) -> Result<String, JsValue> {
    coverage_impl(n, dims, alpha, gamma, truth, reps, seed).map_err(|e| JsValue::from_str(&e))
}
