//! Browser bindings: three interactive views over the core toolkit.
//!
//! Every entry point returns a JSON string; failures come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use gdistill::gaussian::lossy_channel;
use gdistill::random::{random_state, StateKind};
use gdistill::{
    distill_pipeline, is_npt, rc_value, rows, standard_form_params, symmetrize, tmss_cm,
    PipelineOptions, StdFormParams, DEFAULT_TOL,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

type Res = Result<Value, gdistill::Error>;

fn respond(r: Res) -> String {
    r.unwrap_or_else(|e| json!({ "error": e.to_string() })).to_string()
}

fn lossy_tmss(r: f64, eta: f64) -> Result<gdistill::CorrelationMatrix, gdistill::Error> {
    lossy_channel(&tmss_cm(r)?, 1, eta)
}

fn asymptote(p: &StdFormParams) -> f64 {
    let n = 0.5 * (p.n_a + p.n_b);
    (n - p.k_x) * (n + p.k_p) - 1.0
}

pub fn tmss_explorer_value(r: f64, eta: f64, probe_max: f64, points: u32) -> Res {
    let g = lossy_tmss(r, eta)?;
    let npt = is_npt(&g, DEFAULT_TOL)?;
    let params = standard_form_params(&g)?;
    let points = points.clamp(2, 512);
    let curve = (0..points)
        .map(|i| {
            let probe = probe_max * i as f64 / (points - 1) as f64;
            rc_value(&g, probe).map(|v| [probe, v.value])
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(json!({
        "params": params,
        "npt": npt,
        "gamma": rows(g.entries()),
        "rc_curve": curve,
        "asymptotic_value": asymptote(&params),
    }))
}

/// Two-mode squeezed vacuum with squeezing `r`, B's mode sent through a
/// channel of transmissivity `eta`, and the reduction-criterion value
/// against probes of squeezing `0..=probe_max`.
#[wasm_bindgen]
pub fn tmss_explorer(r: f64, eta: f64, probe_max: f64, points: u32) -> String {
    respond(tmss_explorer_value(r, eta, probe_max, points))
}

pub fn symmetrize_lossy_value(r: f64, eta_a: f64, eta_b: f64) -> Res {
    let g = lossy_channel(&lossy_tmss(r, eta_b)?, 0, eta_a)?;
    let before = standard_form_params(&g)?;
    let rep = symmetrize(&g, DEFAULT_TOL)?;
    Ok(json!({
        "before": before,
        "after": rep.params_out,
        "theta": rep.theta,
        "transmissivity": rep.theta.cos().powi(2),
        "swapped_sides": rep.swapped_sides,
        "scale_factor": rep.scale_factor,
        "residual_in": rep.insep_residual_in,
        "residual_out": rep.insep_residual_out,
        "asymptote_after": asymptote(&rep.params_out),
    }))
}

/// Symmetrizes a two-mode squeezed vacuum whose sides went through losses
/// `eta_a` and `eta_b`.
#[wasm_bindgen]
pub fn symmetrize_lossy(r: f64, eta_a: f64, eta_b: f64) -> String {
    respond(symmetrize_lossy_value(r, eta_a, eta_b))
}

pub fn random_pipeline_value(modes_a: usize, modes_b: usize, seed: u64, kind: &str) -> Res {
    let kind: StateKind = kind.parse()?;
    let g = random_state(modes_a.clamp(1, 4), modes_b.clamp(1, 4), seed, kind)?;
    let report = distill_pipeline(&g, &PipelineOptions { seed, ..PipelineOptions::default() })?;
    Ok(json!({
        "gamma": rows(g.entries()),
        "report": report.to_json(),
    }))
}

/// Draws a random state and runs the full pipeline on it.
#[wasm_bindgen]
pub fn random_pipeline(modes_a: u32, modes_b: u32, seed: u32, kind: &str) -> String {
    respond(random_pipeline_value(modes_a as usize, modes_b as usize, seed as u64, kind))
}
